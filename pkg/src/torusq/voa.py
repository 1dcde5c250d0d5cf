"""Characters of (s,t)-log VOA modules and the sl2 Atiyah-Bott routes.

sl2 weights are integers in units of the fundamental weight: alpha = 2,
rho = 1, and the simple reflection acts by the dot action
sigma . b = -b - 2.

Characters are returned divided by eta unless ``numerator=True``, in which
case eta * ch is returned as an exact object (no eta inversion, no
truncation issues).
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterator

from .exactq import ParameterError, check_coprime, check_window
from .qseries import QSeries, QZSeries, divide_by_eta
from .thetas import Phi, Psi, eichler_series


@dataclass(frozen=True)
class VoaLabel:
    s: int
    t: int
    n: int
    m: int
    sign: int = +1

    def __post_init__(self):
        check_coprime(self.s, self.t)
        if self.sign not in (1, -1):
            raise ParameterError("sign must be +1 or -1")

    def require_open_window(self):
        check_window(self.s, self.t, self.n, self.m)

    def require_closed_window(self):
        if not (1 <= self.n <= self.s and 1 <= self.m <= self.t):
            raise ParameterError(f"need 1 <= n <= s and 1 <= m <= t, got {self}")


def central_charge(s: int, t: int) -> Fraction:
    """c = 1 - 6 (s-t)^2 / st."""
    return 1 - Fraction(6 * (s - t) ** 2, s * t)


def delta(s: int, t: int, n: int, m: int, k: int) -> Fraction:
    """Conformal weight (ms - nt + stk)^2 / 4st."""
    return Fraction((m * s - n * t + s * t * k) ** 2, 4 * s * t)


def _quadratic_indices(a: int, b: int, M: int, order: Fraction) -> Iterator[int]:
    """All integers k with (a k + b)^2 / M < order (a > 0)."""
    bound = order * M
    if bound <= 0:
        return
    root = isqrt(bound.numerator // bound.denominator) + 1
    lo = (-root - b) // a - 1
    hi = (root - b) // a + 1
    for k in range(lo, hi + 1):
        if Fraction((a * k + b) ** 2, M) < order:
            yield k


def _bilateral(
    order: Fraction,
    st: int,
    offset: int,
    pairs: tuple[tuple[int, int], ...],
    weight: Callable[[int], Fraction | int],
) -> QSeries:
    """sum_k weight(k) sum_{(sign, c)} sign q^{(2st k + offset + c)^2 / 4st}."""
    terms: dict[Fraction, Fraction] = {}
    M = 4 * st
    for sgn, c in pairs:
        for k in _quadratic_indices(2 * st, offset + c, M, order):
            w = weight(k)
            if w:
                e = Fraction((2 * st * k + offset + c) ** 2, M)
                terms[e] = terms.get(e, 0) + sgn * w
    return QSeries(terms, order)


def _maybe_divide(numer: QSeries, numerator: bool) -> QSeries:
    return numer if numerator else divide_by_eta(numer)


def char_lattice(label: VoaLabel, order, numerator: bool = False) -> QSeries:
    """ch V^{+-}_{n,m}: sum_k q^{Delta_{n,m,2k}} / eta (+), q^{Delta_{n,m,2k+1}} / eta (-)."""
    label.require_closed_window()
    s, t, n, m = label.s, label.t, label.n, label.m
    order = Fraction(order)
    shift = 0 if label.sign > 0 else 1
    # Delta_{n,m,2k+shift} = (2st k + st*shift + ms - nt)^2 / 4st
    numer = _bilateral(order, s * t, s * t * shift + m * s - n * t, ((1, 0),), lambda k: 1)
    return _maybe_divide(numer, numerator)


def char_X(label: VoaLabel, order, numerator: bool = False) -> QSeries:
    """Full character of the irreducible module X^{+-}_{n,m}.

    + : (1/eta) sum_k k^2 (q^{(2stk - nt - ms)^2/4st} - q^{(2stk - nt + ms)^2/4st})
    - : same with weight k(k+1) and an extra st in the linear form.
    """
    label.require_open_window()
    s, t, n, m = label.s, label.t, label.n, label.m
    order = Fraction(order)
    st = s * t
    pairs = ((1, -n * t - m * s), (-1, -n * t + m * s))
    if label.sign > 0:
        numer = _bilateral(order, st, 0, pairs, lambda k: k * k)
    else:
        numer = _bilateral(order, st, st, pairs, lambda k: k * (k + 1))
    return _maybe_divide(numer, numerator)


def _singlet_weight(sign: int) -> Callable[[int], int]:
    # + : |k|;  - : k for k >= 0 and -k-1 for k < 0 (the lowest-weight z^1 share of k(k+1))
    if sign > 0:
        return abs
    return lambda k: k if k >= 0 else -k - 1


def char_singlet_bilateral(label: VoaLabel, order) -> QSeries:
    """eta * ch(X)^{h=0} as the |k|-weighted bilateral sum (h = 1 for the - case)."""
    label.require_open_window()
    s, t, n, m = label.s, label.t, label.n, label.m
    st = s * t
    pairs = ((1, -n * t - m * s), (-1, -n * t + m * s))
    return _bilateral(Fraction(order), st, 0 if label.sign > 0 else st, pairs, _singlet_weight(label.sign))


def char_singlet_eichler(label: VoaLabel, order) -> QSeries:
    """(1/st)(Phi~ + ((nt-ms)/2) Psi~_st^{(nt-ms)} - ((nt+ms)/2) Psi~_st^{(nt+ms)}).

    Psi indices outside (0, st) use the literal periodic pattern.
    """
    label.require_open_window()
    s, t, n, m = label.s, label.t, label.n, label.m
    st = s * t
    a, b = n * t - m * s, n * t + m * s
    total = (
        eichler_series(Phi(s, t, n, m), order)
        + eichler_series(Psi(st, a, strict=False), order).scale(Fraction(a, 2))
        - eichler_series(Psi(st, b, strict=False), order).scale(Fraction(b, 2))
    )
    return total.scale(Fraction(1, st))


class IdentityFailure(AssertionError):
    """Two routes to the same character disagree."""


def char_singlet(label: VoaLabel, order) -> QSeries:
    """eta * ch(X^+_{n,m})^{h=0}.

    For the + sign both displayed forms are computed and checked termwise.
    The - sign returns the h = 1 analogue (bilateral form only).
    """
    direct = char_singlet_bilateral(label, order)
    if label.sign > 0:
        other = char_singlet_eichler(label, order)
        if direct != other:
            raise IdentityFailure(f"singlet forms disagree at {direct.first_disagreement(other)}")
    return direct


def jmod_numerator(s: int, t: int, n: int, m: int, k: int) -> QSeries:
    """eta * ch J_{n,t-m,2k-1} as an exact four-term polynomial."""
    check_window(s, t, n, m)
    if k < 1:
        raise ParameterError("k must be >= 1")
    terms: dict[Fraction, int] = {}
    for sgn, e in (
        (1, delta(s, t, s - n, m, -2 * k + 1)),
        (-1, delta(s, t, s - n, t - m, -2 * k)),
        (-1, delta(s, t, n, m, -2 * k)),
        (1, delta(s, t, n, t - m, -2 * k - 1)),
    ):
        terms[e] = terms.get(e, 0) + sgn * k
    return QSeries(terms, None)


def char_Jmod(s: int, t: int, n: int, m: int, k: int, order, numerator: bool = False) -> QSeries:
    """Character of the Virasoro module J_{n,t-m,2k-1}:
    (k/eta)(q^{D(s-n,m,-2k+1)} - q^{D(s-n,t-m,-2k)} - q^{D(n,m,-2k)} + q^{D(n,t-m,-2k-1)})."""
    numer = jmod_numerator(s, t, n, m, k).truncate(order)
    return _maybe_divide(numer, numerator)


# ---------------------------------------------------------------------------
# sl2 representation theory


@dataclass(frozen=True, order=True)
class Sl2Weight:
    """An integral weight, stored as its coefficient of the fundamental weight."""

    coeff: int

    def __index__(self) -> int:
        return self.coeff

    def dot(self) -> "Sl2Weight":
        return Sl2Weight(dot_reflection(self.coeff))

    def __add__(self, other):
        return Sl2Weight(self.coeff + operator.index(other))

    def __neg__(self):
        return Sl2Weight(-self.coeff)


FUNDAMENTAL = Sl2Weight(1)
RHO = Sl2Weight(1)
ALPHA = Sl2Weight(2)


def dot_reflection(beta) -> int:
    """sigma_1 . beta = sigma_1(beta + rho) - rho."""
    return -operator.index(beta) - 2


def sl2_weight_multiplicity(beta, gamma) -> int:
    """Multiplicity of weight gamma in L(beta) (0 or 1)."""
    beta, gamma = operator.index(beta), operator.index(gamma)
    if beta < 0:
        raise ParameterError("highest weight must be dominant")
    return int(abs(gamma) <= beta and (beta - gamma) % 2 == 0)


def weyl_character(beta) -> dict[int, int]:
    """(z^{beta+1} - z^{-beta-1}) / (z - z^{-1}) as {z-exponent: coefficient}."""
    beta = operator.index(beta)
    if beta < 0:
        raise ParameterError("highest weight must be dominant")
    # divide the alternating numerator by z - z^{-1} (exponents shifted by beta+1)
    num = {beta + 1: 1, -beta - 1: -1}
    out: dict[int, int] = {}
    top = beta + 1
    while num:
        e = max(num)
        c = num.pop(e)
        if not c:
            continue
        out[e - 1] = c
        num[e - 2] = num.get(e - 2, 0) + c
        num = {k: v for k, v in num.items() if v}
        if e - 1 < -top:
            raise ArithmeticError("non-exact Weyl division")
    return out


def _lattice_1t_weight(t: int, m: int, h: int) -> Fraction | None:
    """q-exponent of the h-weight space of V_{sqrt(t)Q + alpha_m} (None when empty).

    Only even h occur; the weight 2j space is pi_{alpha_m + 2j sqrt(t) varpi}
    with conformal weight Delta_{m,-2j} = (m - t - 2jt)^2 / 4t.
    """
    if h % 2:
        return None
    return Fraction((m - t - h * t) ** 2, 4 * t)


def ab_char_1t(t: int, m: int, gamma, order, numerator: bool = False) -> QSeries:
    """ch_q H^0(G x_B V_{sqrt(t)Q + alpha_m})^{h = gamma} by the Atiyah-Bott sum
    sum_{beta >= 0} m_{beta,gamma} sum_{sigma} (-1)^{l(sigma)} ch V^{h = sigma . beta}.
    """
    if t < 1 or not 1 <= m <= t:
        raise ParameterError(f"need 1 <= m <= t, got m={m}, t={t}")
    gamma = operator.index(gamma)
    order = Fraction(order)
    terms: dict[Fraction, int] = {}
    beta = abs(gamma)
    while True:
        hit = False
        if sl2_weight_multiplicity(beta, gamma):
            for sgn, h in ((1, beta), (-1, dot_reflection(beta))):
                e = _lattice_1t_weight(t, m, h)
                if e is not None and e < order:
                    terms[e] = terms.get(e, 0) + sgn
                    hit = True
        # exponents grow quadratically in beta; stop once both are beyond order
        e1 = Fraction((m - t - beta * t) ** 2, 4 * t)
        e2 = Fraction((m - t + (beta + 2) * t) ** 2, 4 * t)
        if not hit and min(e1, e2) >= order and beta > abs(gamma) + 2:
            break
        beta += 1
    return _maybe_divide(QSeries(terms, order), numerator)


def singlet_1t_closed(t: int, m: int, order, numerator: bool = False) -> QSeries:
    """(1/eta) sum_{k>=0} (q^{Delta_{m,-2k}} - q^{Delta_{t-m,-2k-1}}), Delta_{m,k} = (m - t + kt)^2/4t."""
    order = Fraction(order)
    terms: dict[Fraction, int] = {}
    k = 0
    while True:
        e_plus = Fraction((m - t - 2 * k * t) ** 2, 4 * t)
        e_minus = Fraction(((t - m) - t - (2 * k + 1) * t) ** 2, 4 * t)
        if e_plus >= order and e_minus >= order:
            break
        if e_plus < order:
            terms[e_plus] = terms.get(e_plus, 0) + 1
        if e_minus < order:
            terms[e_minus] = terms.get(e_minus, 0) - 1
        k += 1
    return _maybe_divide(QSeries(terms, order), numerator)


def _ab_diagonal(label: VoaLabel, j: int) -> dict[Fraction, int]:
    """Four-term Delta combination on the diagonal k + k' = j.

    + : D(s-n,m,-2j-1) - D(s-n,t-m,-2j-2) - D(n,m,-2j-2) + D(n,t-m,-2j-3)
    - : every Delta index shifted down by one more (the half-step st shift).
    """
    s, t, n, m = label.s, label.t, label.n, label.m
    sh = 0 if label.sign > 0 else 1
    out: dict[Fraction, int] = {}
    for sgn, (a, b, k) in (
        (1, (s - n, m, -2 * j - 1 - sh)),
        (-1, (s - n, t - m, -2 * j - 2 - sh)),
        (-1, (n, m, -2 * j - 2 - sh)),
        (1, (n, t - m, -2 * j - 3 - sh)),
    ):
        e = delta(s, t, a, b, k)
        out[e] = out.get(e, 0) + sgn
    return out


def _diagonals(label: VoaLabel, order: Fraction) -> Iterator[tuple[int, dict[Fraction, int]]]:
    j = 0
    while True:
        diag = _ab_diagonal(label, j)
        if min(diag) >= order:
            # exponents increase with j from here on
            lows = [min(_ab_diagonal(label, jj)) for jj in (j + 1, j + 2)]
            if min(lows) >= order:
                return
        yield j, diag
        j += 1


def ab_char_st(label: VoaLabel, order, graded: bool = False, numerator: bool = False):
    """Atiyah-Bott character of X^{+-}_{n,m}.

    ungraded: (1/eta) sum_{k,k'>=0} (diagonal k+k'), i.e. weight (j+1) on the
    j-th diagonal; this is the singlet (h=0 for +, h=1 for -) part.
    graded: (1/eta) sum_{k,k'} ch_z L(2k [+1]) (diagonal k+k') as a QZSeries.
    """
    label.require_open_window()
    order = Fraction(order)
    odd = 0 if label.sign > 0 else 1
    if not graded:
        terms: dict[Fraction, int] = {}
        for j, diag in _diagonals(label, order):
            for e, c in diag.items():
                if e < order:
                    terms[e] = terms.get(e, 0) + (j + 1) * c
        return _maybe_divide(QSeries(terms, order), numerator)
    zterms: dict[tuple[Fraction, int], int] = {}
    for j, diag in _diagonals(label, order):
        # sum over k = 0..j of ch_z L(2k + odd)
        zchar: dict[int, int] = {}
        for k in range(j + 1):
            for z, c in weyl_character(2 * k + odd).items():
                zchar[z] = zchar.get(z, 0) + c
        for e, c in diag.items():
            if e < order:
                for z, mult in zchar.items():
                    key = (e, z)
                    zterms[key] = zterms.get(key, 0) + c * mult
    numer = QZSeries(zterms, order)
    if numerator:
        return numer
    inv = divide_by_eta(QSeries({0: 1}, order))
    return numer.times_qseries(inv)
