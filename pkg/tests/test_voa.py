import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusq.exactq import ParameterError
from torusq.qseries import QSeries, divide_by_eta
from torusq.thetas import Psi, eichler_series
from torusq.voa import (
    ALPHA,
    RHO,
    IdentityFailure,
    Sl2Weight,
    VoaLabel,
    ab_char_1t,
    ab_char_st,
    central_charge,
    char_Jmod,
    char_lattice,
    char_singlet,
    char_singlet_bilateral,
    char_singlet_eichler,
    char_X,
    delta,
    dot_reflection,
    jmod_numerator,
    singlet_1t_closed,
    sl2_weight_multiplicity,
    weyl_character,
)

GRID = [(2, 3), (3, 4), (2, 5), (3, 5)]


def labels(grid=GRID):
    return [(s, t, n, m) for s, t in grid for n in range(1, s) for m in range(1, t)]


def test_delta_values():
    assert delta(2, 3, 1, 1, 0) == F(1, 24)
    # (ms - nt + stk) = 3 - 4 + 12
    assert delta(3, 4, 1, 1, 1) == F(121, 48)


def test_delta_symmetries():
    rng = random.Random(7)
    for _ in range(20):
        s, t = rng.choice(GRID)
        n, m, k = rng.randint(-6, 6), rng.randint(-6, 6), rng.randint(-6, 6)
        d = delta(s, t, n, m, k)
        assert d == delta(s, t, -n, -m, -k) == delta(s, t, s + n, t + m, k)


def test_central_charge():
    assert central_charge(2, 3) == 0
    assert central_charge(1, 2) == -2


def brute_lattice(s, t, n, m, sign, order):
    terms = {}
    for k in range(-60, 61):
        if (k % 2 == 0) == (sign > 0):
            e = delta(s, t, n, m, k)
            if e < order:
                terms[e] = terms.get(e, 0) + 1
    return QSeries(terms, order)


@pytest.mark.parametrize("label", [(2, 3, 1, 1), (3, 4, 1, 1), (3, 4, 3, 4), (2, 5, 2, 3)])
@pytest.mark.parametrize("sign", [1, -1])
def test_lattice_character(label, sign):
    s, t, n, m = label
    got = char_lattice(VoaLabel(s, t, n, m, sign), 10, numerator=True)
    assert got == brute_lattice(s, t, n, m, sign, 10)


def test_lattice_character_leading_term():
    ch = char_lattice(VoaLabel(2, 3, 1, 1), 5)
    assert ch.min_exponent() == 0 and ch.coeff(0) == 1


def test_char_x_numerator():
    num = char_X(VoaLabel(2, 3, 1, 1), F(362, 24), numerator=True)
    head = {F(49, 24): 1, F(121, 24): -1, F(169, 24): -1, F(289, 24): 1, F(361, 24): 4}
    # k = +-2 first contributes 4 q^{(24-5)^2/24} = 4 q^{361/24}
    assert num.terms == head


def test_char_x_windows():
    for bad in [(2, 3, 0, 1), (2, 3, 2, 1), (3, 4, 1, 4)]:
        with pytest.raises(ParameterError):
            char_X(VoaLabel(*bad), 5)
    with pytest.raises(ParameterError):
        VoaLabel(2, 4, 1, 1)


def test_singlet_head():
    num = char_singlet(VoaLabel(2, 3, 1, 1), 13)
    assert num.terms == {F(49, 24): 1, F(121, 24): -1, F(169, 24): -1, F(289, 24): 1}


@pytest.mark.parametrize("label", labels())
def test_singlet_two_forms(label):
    lab = VoaLabel(*label)
    a, b = char_singlet_bilateral(lab, 100), char_singlet_eichler(lab, 100)
    assert a == b


def test_singlet_leading_exponent():
    for s, t, n, m in labels():
        num = char_singlet(VoaLabel(s, t, n, m), 60)
        lows = [F((2 * s * t * k - n * t + c) ** 2, 4 * s * t) for k in (-1, 1) for c in (m * s, -m * s)]
        assert num.min_exponent() == min(lows)


def test_identity_failure_type():
    assert issubclass(IdentityFailure, AssertionError)


def test_jmod():
    s, t, n, m = 2, 3, 1, 1
    num = jmod_numerator(s, t, n, m, 1)
    expected = {}
    for sign, e in ((1, delta(2, 3, 1, 1, -1)), (-1, delta(2, 3, 1, 2, -2)), (-1, delta(2, 3, 1, 1, -2)), (1, delta(2, 3, 1, 2, -3))):
        expected[e] = expected.get(e, 0) + sign
    assert num == QSeries({e: c for e, c in expected.items() if c}, None)
    assert all(c.denominator == 1 for c in num.terms.values())
    with pytest.raises(ParameterError):
        jmod_numerator(2, 3, 1, 1, 0)
    assert char_Jmod(2, 3, 1, 1, 2, 20) == divide_by_eta(jmod_numerator(2, 3, 1, 1, 2).truncate(20))


@pytest.mark.parametrize("label", [(2, 3, 1, 1), (3, 4, 2, 1)])
def test_jmod_telescoping(label):
    """sum_{k=1}^{R} eta * ch J_{2k-1} reproduces the singlet up to the first unused diagonal."""
    s, t, n, m = label
    R = 3
    partial = sum((jmod_numerator(s, t, n, m, k) for k in range(1, R + 1)), QSeries({}, None))
    singlet = ab_char_st(VoaLabel(s, t, n, m), 400, numerator=True)
    # the j-th diagonal of the double sum is J_{2(j+1)-1} weighted by j + 1
    bound = min(jmod_numerator(s, t, n, m, R + 1).terms)
    assert partial.truncate(bound) == singlet.truncate(bound)


def test_weight_multiplicity():
    assert all(sl2_weight_multiplicity(2 * k, 0) == 1 for k in range(6))
    assert sl2_weight_multiplicity(4, 2) == 1
    assert sl2_weight_multiplicity(3, 0) == 0
    assert sl2_weight_multiplicity(Sl2Weight(4), Sl2Weight(-4)) == 1
    assert sl2_weight_multiplicity(2, 4) == 0
    with pytest.raises(ParameterError):
        sl2_weight_multiplicity(-1, 0)


@pytest.mark.parametrize("beta", range(11))
def test_weyl_character_matches_multiplicities(beta):
    mults = {g: sl2_weight_multiplicity(beta, g) for g in range(-beta - 2, beta + 3)}
    assert weyl_character(beta) == {g: c for g, c in mults.items() if c}


def test_dot_action():
    assert dot_reflection(0) == -2
    assert Sl2Weight(3).dot() == Sl2Weight(-5)
    assert ALPHA == Sl2Weight(2) and RHO == Sl2Weight(1)
    assert dot_reflection(dot_reflection(5)) == 5


def test_ab_char_1t_examples():
    assert ab_char_1t(2, 1, 0, 40, numerator=True) == eichler_series(Psi(2, 1), 40)
    for t, m in [(3, 2), (3, 1), (4, 1), (5, 3)]:
        assert ab_char_1t(t, m, 0, 20, numerator=True) == singlet_1t_closed(t, m, 20, numerator=True)
        assert ab_char_1t(t, m, 0, 30, numerator=True) == eichler_series(Psi(t, t - m), 30)


def test_ab_char_1t_edge_and_odd_weights():
    num = ab_char_1t(3, 3, 0, 30, numerator=True)
    assert all(c.denominator == 1 for c in num.terms.values())
    assert ab_char_1t(3, 2, 1, 30, numerator=True) == QSeries({}, 30)


def test_ab_char_1t_graded_pieces_sum_to_full_lattice():
    # sum over gamma of z^gamma-components at z=1 against the plain alternating count
    t, m, order = 3, 1, 25
    total = sum((ab_char_1t(t, m, g, order, numerator=True) for g in range(-12, 13)), QSeries({}, order))
    direct = {}
    for beta in range(0, 30):
        for sign, h in ((1, beta), (-1, -beta - 2)):
            if h % 2 == 0:
                e = F((m - t - h * t) ** 2, 4 * t)
                if e < order:
                    direct[e] = direct.get(e, 0) + sign * (beta + 1)
    assert total == QSeries(direct, order)


@pytest.mark.parametrize("label", labels([(2, 3), (3, 4), (2, 5)]))
@pytest.mark.parametrize("sign", [1, -1])
def test_atiyah_bott_routes(label, sign):
    lab = VoaLabel(*label, sign)
    assert ab_char_st(lab, 100, numerator=True) == char_singlet(lab, 100)
    graded = ab_char_st(lab, 50, graded=True, numerator=True)
    assert graded.specialize_z1() == char_X(lab, 50, numerator=True)


def test_graded_diagonal_weights():
    # z-components at z = 1 of the j-th diagonal give (j+1)^2 (+ sign) and (j+1)(j+2) (- sign)
    lab = VoaLabel(2, 3, 1, 1)
    graded = ab_char_st(lab, 50, graded=True, numerator=True)
    assert graded.z_component(0) == ab_char_st(lab, 50, numerator=True)


def test_eta_divided_forms_agree():
    lab = VoaLabel(3, 4, 2, 1)
    assert ab_char_st(lab, 30) == divide_by_eta(char_singlet(lab, 30))


@given(st.sampled_from(labels([(2, 3), (3, 4), (2, 5), (3, 5), (4, 5)])), st.sampled_from([1, -1]))
@settings(max_examples=30, deadline=None)
def test_characters_have_integer_coefficients(label, sign):
    lab = VoaLabel(*label, sign)
    for series in (char_X(lab, 40), char_singlet(lab, 40), ab_char_st(lab, 40)):
        assert all(c.denominator == 1 for c in series.terms.values())
