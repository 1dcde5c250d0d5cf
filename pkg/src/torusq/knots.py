"""Colored Jones polynomials of torus knots and links.

All half-integer summation bounds are walked with an integer index and the
summation variable rebuilt as a Fraction.  Every formula is a finite sum
divided exactly by ``q^{N/2} - q^{-N/2}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .exactq import (
    DEFAULT_PREC,
    APComplex,
    ParameterError,
    check_coprime,
    eval_at_root,
    mp_context,
    root_phase,
)
from .qseries import LaurentPoly, exact_divide

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class TorusParams:
    """Parameters of a torus knot (components=1) or T_{2s,2t} / T_{3s,3t} link.

    ``n, m`` label the generalized Laurent family; for the plain colored
    Jones polynomial they stay at (1, 1).
    """

    s: int
    t: int
    N: int
    n: int = 1
    m: int = 1
    components: int = 1

    def __post_init__(self):
        check_coprime(self.s, self.t)
        if self.N < 1:
            raise ParameterError(f"color N must be >= 1, got {self.N}")
        if self.n < 1 or self.m < 1:
            raise ParameterError("labels n, m must be >= 1")
        if self.components not in (1, 2, 3):
            raise ParameterError("components must be 1, 2 or 3")


def _check_N(N: int) -> None:
    if N < 1:
        raise ParameterError(f"color N must be >= 1, got {N}")


def _framing_denominator(N: int) -> LaurentPoly:
    return LaurentPoly({Fraction(N, 2): 1, Fraction(-N, 2): -1})


def _accumulate(acc: dict, e: Fraction, c: int) -> None:
    acc[e] = acc.get(e, 0) + c


def _finish(acc: dict, N: int, prefactor: Fraction = Fraction(0)) -> LaurentPoly:
    num = LaurentPoly({e + prefactor: c for e, c in acc.items() if c})
    return exact_divide(num, _framing_denominator(N))


def jones_torus_knot(s: int, t: int, N: int) -> LaurentPoly:
    """N-colored Jones polynomial of the 0-framed torus knot T_{s,t}."""
    check_coprime(s, t)
    _check_N(N)
    st = s * t
    acc: dict = {}
    for j in range(N):
        r = j - Fraction(N - 1, 2)
        _accumulate(acc, st * r * r - (s + t) * r + HALF, 1)
        _accumulate(acc, st * r * r - (s - t) * r - HALF, -1)
    return _finish(acc, N, Fraction(st * (1 - N * N), 4))


def jones_T2_2p(p: int, N: int) -> LaurentPoly:
    """N-colored Jones polynomial of the torus link T_{2,2p}."""
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    _check_N(N)
    acc: dict = {}
    for j in range(N):
        base = p * j * (j + 1)
        _accumulate(acc, base + j + HALF, 1)
        _accumulate(acc, base - j - HALF, -1)
    return _finish(acc, N, Fraction(p * (1 - N * N)))


def jones_torus_link(s: int, t: int, N: int) -> LaurentPoly:
    """N-colored Jones polynomial of T_{2s,2t}, both components colored N."""
    check_coprime(s, t)
    _check_N(N)
    st = s * t
    acc: dict = {}
    for j in range(N):
        for k in range(-j, j + 1):
            _accumulate(acc, st * k * k - (s + t) * k + HALF, 1)
            _accumulate(acc, st * k * k - (s - t) * k - HALF, -1)
    return _finish(acc, N, Fraction(st * (1 - N * N)))


def family_two_exponents(s: int, t: int, n: int, m: int, r) -> tuple[Fraction, Fraction]:
    """Exponents of the two summands of the (n, m) family at index r."""
    st = s * t
    half_mn = Fraction(m * n, 2)
    return (
        st * r * r - (n * t + m * s) * r + half_mn,
        st * r * r + (n * t - m * s) * r - half_mn,
    )


def family_two_multiplicities(N: int) -> dict[Fraction, int]:
    """How often each r occurs in the (c, r) double sum of the T_{2s,2t} family."""
    _check_N(N)
    # r occurs for every c >= |r|, i.e. N - |r| times
    return {Fraction(r): N - abs(r) for r in range(-(N - 1), N)}


def _family_from_counts(s: int, t: int, n: int, m: int, N: int, counts: dict) -> LaurentPoly:
    check_coprime(s, t)
    if n < 1 or m < 1:
        raise ParameterError("labels n, m must be >= 1")
    acc: dict = {}
    for r in sorted(counts):
        e_plus, e_minus = family_two_exponents(s, t, n, m, r)
        _accumulate(acc, e_plus, counts[r])
        _accumulate(acc, e_minus, -counts[r])
    return _finish(acc, N)


def jones_family_two(s: int, t: int, n: int, m: int, N: int) -> LaurentPoly:
    """The (n, m) Laurent family attached to T_{2s,2t}.

    Any n, m >= 1 is accepted; (1, 1) gives q^{-st(1-N^2)} J_N(q; T_{2s,2t}).
    """
    return _family_from_counts(s, t, n, m, N, family_two_multiplicities(N))


def _triple_indices(N: int) -> Iterator[Fraction]:
    """r values of the triple sum over b, c, r (with repetition)."""
    for b in range(N):
        lo, hi = abs(2 * b - N + 1), 2 * b + N - 1
        for c in range(lo, hi + 1):
            if (c + N) % 2 == 0:
                continue
            # r = -c/2, -c/2 + 1, ..., c/2
            for i in range(c + 1):
                yield Fraction(2 * i - c, 2)


def family_three_multiplicities(N: int) -> dict[Fraction, int]:
    """How often each r occurs in the (b, c, r) triple sum."""
    _check_N(N)
    counts: dict[Fraction, int] = {}
    for r in _triple_indices(N):
        counts[r] = counts.get(r, 0) + 1
    return counts


def jones_family_three(s: int, t: int, n: int, m: int, N: int) -> LaurentPoly:
    """The (n, m) Laurent family attached to the 3-component link T_{3s,3t}.

    Same summand as the two-component family, only the multiplicities differ.
    """
    return _family_from_counts(s, t, n, m, N, family_three_multiplicities(N))


def jones_torus_link3(s: int, t: int, N: int) -> LaurentPoly:
    """N-colored Jones polynomial of T_{3s,3t}."""
    return jones_family_three(s, t, 1, 1, N).shift(Fraction(9 * s * t * (1 - N * N), 4))


# ---------------------------------------------------------------------------
# Kashaev invariants


class PrecisionFailure(ArithmeticError):
    """Two independent evaluation routes disagree beyond tolerance."""


def family_two_at_root(s: int, t: int, n: int, m: int, N: int, prec: int = DEFAULT_PREC) -> APComplex:
    """Value of the (n, m) family at q = zeta_N by the derivative reduction.

    The denominator vanishes at zeta_N, so the value is the ratio of
    derivatives with q^{1/2} = exp(pi i / N):
    -(1/N) sum_{c, r} f(r) with f(r) = e_+ zeta^{e_+} - e_- zeta^{e_-},
    regrouped as f(0) + (1/N) sum_k ((N-k) f(k) + k f(k-N)) up to that sign.
    """
    ctx = mp_context(prec)

    def f(r: int):
        ep, em = family_two_exponents(s, t, n, m, r)
        return (ctx.mpf(ep.numerator) / ep.denominator) * root_phase(ep, N, prec) - (
            ctx.mpf(em.numerator) / em.denominator
        ) * root_phase(em, N, prec)

    total = f(0)
    for k in range(1, N):
        total += ((N - k) * f(k) + k * f(k - N)) / N
    return APComplex(-total, prec)


def family_two_value(s: int, t: int, n: int, m: int, N: int, prec: int = DEFAULT_PREC) -> APComplex:
    """The (n, m) family at zeta_N, evaluated termwise and cross-checked
    against :func:`family_two_at_root`."""
    direct = eval_at_root(jones_family_two(s, t, n, m, N).items(), N, prec)
    reduced = family_two_at_root(s, t, n, m, N, prec)
    ctx = mp_context(prec)
    scale = max(ctx.mpf(1), abs(direct))
    if abs(direct - reduced) > scale * ctx.ldexp(1, -prec + 16):
        raise PrecisionFailure(f"root-of-unity routes disagree: {direct} vs {reduced}")
    return direct


def kashaev_invariant(params: TorusParams, prec: int = DEFAULT_PREC) -> APComplex:
    """Colored Jones polynomial evaluated at zeta_N = exp(2 pi i / N).

    ``components=1`` is the knot T_{s,t}; 2 is the (n, m) family of
    T_{2s,2t} scaled by q^{st(1-N^2)} (the link itself at (1,1)), cross-checked
    against the closed-form root-of-unity reduction; 3 is T_{3s,3t}.
    """
    s, t, N = params.s, params.t, params.N
    if params.components == 1:
        return eval_at_root(jones_torus_knot(s, t, N).items(), N, prec)
    if params.components == 3:
        poly = jones_family_three(s, t, params.n, params.m, N).shift(
            Fraction(9 * s * t * (1 - N * N), 4)
        )
        return eval_at_root(poly.items(), N, prec)
    direct = family_two_value(s, t, params.n, params.m, N, prec)
    ctx = mp_context(prec)
    # zeta_N^{st N^2} = 1, so the q^{st(1-N^2)} prefactor contributes zeta_N^{st}
    phase_full = root_phase(Fraction(s * t * (1 - N * N)), N, prec)
    phase_st = root_phase(Fraction(s * t), N, prec)
    if abs(phase_full - phase_st) > ctx.ldexp(1, -prec + 8):
        raise PrecisionFailure("prefactor phase reduction failed")
    return APComplex(phase_full * direct.value, prec)
