"""Exact arithmetic substrate.

Rationals are :class:`fractions.Fraction`.  High-precision complex values
are mpmath numbers carried together with an explicit precision, never the
global ``mpmath.mp`` context.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import threading
from math import comb, gcd
from typing import Iterable, Sequence

import mpmath
import numpy as np

Rational = Fraction

DEFAULT_PREC = 128


class ParameterError(ValueError):
    """Invalid parameter bundle (window, coprimality, sign...)."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact values")
    return Fraction(x)


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with the convention B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    acc = Fraction(0)
    for k in range(n):
        acc += comb(n + 1, k) * bernoulli_number(k)
    return -acc / (n + 1)


def bernoulli_polynomial(n: int, x) -> Fraction:
    """Exact value of the n-th Bernoulli polynomial at rational x."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = as_fraction(x)
    return sum(
        (comb(n, k) * bernoulli_number(k) * x ** (n - k) for k in range(n + 1)),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# Periodic mean-zero functions


@dataclass(frozen=True)
class PeriodicChar:
    """Integer-valued function of period ``period``.

    ``values[j]`` is the value at residue ``j + 1``, so the last entry is the
    value at ``k = 0 (mod period)``.
    """

    period: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.period < 1 or len(self.values) != self.period:
            raise ParameterError("values must have length equal to the period")
        if sum(self.values) != 0:
            raise ParameterError("periodic function must have mean zero")

    def __call__(self, k: int) -> int:
        return self.values[(k - 1) % self.period]

    def support(self) -> list[int]:
        """Residues r in [0, period) where the function is nonzero."""
        return [r for r in range(self.period) if self(r)]

    def inflate(self, c: int) -> "PeriodicChar":
        """Same function presented with period ``c * period``."""
        return PeriodicChar(self.period * c, self.values * c)

    def __eq__(self, other):
        if not isinstance(other, PeriodicChar):
            return NotImplemented
        return self.period == other.period and self.values == other.values

    def __hash__(self):
        return hash((self.period, self.values))


def _signed_pattern(period: int, plus: Iterable[int], minus: Iterable[int]) -> PeriodicChar:
    vals = [0] * period
    for r in plus:
        vals[(r - 1) % period] += 1
    for r in minus:
        vals[(r - 1) % period] -= 1
    return PeriodicChar(period, tuple(vals))


def make_psi(p: int, a: int, *, strict: bool = True) -> PeriodicChar:
    """psi_{2p}^{(a)}: +1 at k = a, -1 at k = -a (mod 2p).

    With ``strict=False`` any integer ``a`` is accepted and the literal
    pattern is returned; ``a`` congruent to 0 or p gives the zero function.
    """
    if p < 1 or (strict and p < 2):
        raise ParameterError(f"p must be >= 2, got {p}")
    if strict and not 0 < a < p:
        raise ParameterError(f"need 0 < a < p, got a={a}, p={p}")
    period = 2 * p
    if a % period in (0, p):
        return PeriodicChar(period, (0,) * period)
    return _signed_pattern(period, [a], [-a])


def check_coprime(s: int, t: int) -> None:
    if s < 1 or t < 1:
        raise ParameterError(f"s, t must be positive, got ({s}, {t})")
    if gcd(s, t) != 1:
        raise ParameterError(f"s={s} and t={t} are not coprime")


def check_window(s: int, t: int, n: int, m: int) -> None:
    check_coprime(s, t)
    if not (0 < n < s and 0 < m < t):
        raise ParameterError(f"need 0 < n < s and 0 < m < t, got (n, m)=({n}, {m}) for (s, t)=({s}, {t})")


def make_chi(s: int, t: int, n: int, m: int) -> PeriodicChar:
    """chi_{2st}^{(n,m)}: +1 at +-(nt - ms), -1 at +-(nt + ms) mod 2st."""
    check_window(s, t, n, m)
    a, b = n * t - m * s, n * t + m * s
    return _signed_pattern(2 * s * t, [a, -a], [b, -b])


def l_value(f: PeriodicChar, n: int) -> Fraction:
    """L(-n, f) = -(M^n / (n+1)) sum_{k=1}^{M} f(k) B_{n+1}(k/M)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    M = f.period
    acc = Fraction(0)
    for k in range(1, M + 1):
        v = f(k)
        if v:
            acc += v * bernoulli_polynomial(n + 1, Fraction(k, M))
    return -Fraction(M**n, n + 1) * acc


# ---------------------------------------------------------------------------
# Arbitrary precision complex values


_contexts = threading.local()


def mp_context(prec: int) -> mpmath.MPContext:
    """A private mpmath context at fixed binary precision.

    Some mpmath routines raise ``ctx.prec`` temporarily while they work, so
    each thread gets its own context per precision.
    """
    if prec < 53:
        raise ParameterError(f"precision must be >= 53 bits, got {prec}")
    cache = getattr(_contexts, "cache", None)
    if cache is None:
        cache = _contexts.cache = {}
    ctx = cache.get(prec)
    if ctx is None:
        ctx = cache[prec] = mpmath.MPContext()
        ctx.prec = prec
    return ctx


class APComplex:
    """Complex number at an explicit binary precision."""

    __slots__ = ("value", "prec")

    def __init__(self, value, prec: int = DEFAULT_PREC):
        ctx = mp_context(prec)
        self.prec = prec
        self.value = ctx.mpc(value)

    @property
    def ctx(self) -> mpmath.MPContext:
        return mp_context(self.prec)

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def _coerce(self, other):
        if isinstance(other, APComplex):
            return other.value, max(self.prec, other.prec)
        if isinstance(other, Fraction):
            ctx = mp_context(self.prec)
            return ctx.mpf(other.numerator) / other.denominator, self.prec
        return other, self.prec

    def _binop(self, other, op):
        v, prec = self._coerce(other)
        ctx = mp_context(prec)
        return APComplex(op(ctx.mpc(self.value), ctx.mpc(v)), prec)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __neg__(self):
        return APComplex(-self.value, self.prec)

    def __abs__(self):
        return self.ctx.fabs(self.value)

    def conjugate(self) -> "APComplex":
        return APComplex(self.ctx.conj(self.value), self.prec)

    def __complex__(self):
        return complex(self.value)

    def __eq__(self, other):
        if isinstance(other, APComplex):
            return self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash(complex(self.value))

    def __repr__(self):
        return f"APComplex({mpmath.nstr(self.value, 20)}, prec={self.prec})"


def root_phase(e: Fraction, N: int, prec: int = DEFAULT_PREC):
    """mpc value of zeta_N^e := exp(2 pi i e / N), with e reduced mod N first."""
    ctx = mp_context(prec)
    e = as_fraction(e) % N
    return ctx.expjpi(ctx.mpf(2 * e.numerator) / (e.denominator * N))


def eval_at_root(
    coeffs: Iterable[tuple[Fraction, Fraction]], N: int, prec: int = DEFAULT_PREC
) -> APComplex:
    """Evaluate sum c * zeta_N^e with zeta_N^e = exp(2 pi i e / N).

    Terms are grouped by exponent residue mod N (exactly) before any
    floating-point work, then summed in ascending residue order.
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    ctx = mp_context(prec)
    grouped: dict[Fraction, Fraction] = {}
    for e, c in coeffs:
        r = as_fraction(e) % N
        grouped[r] = grouped.get(r, Fraction(0)) + as_fraction(c)
    total = ctx.mpc(0)
    for r in sorted(grouped):
        c = grouped[r]
        if c:
            total += (ctx.mpf(c.numerator) / c.denominator) * root_phase(r, N, prec)
    return APComplex(total, prec)


# ---------------------------------------------------------------------------
# Exact cyclotomic representation


@lru_cache(maxsize=None)
def cyclotomic_poly(M: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_M(x), lowest degree first."""
    if M < 1:
        raise ValueError("M must be >= 1")
    # x^M - 1 = prod_{d | M} Phi_d(x)
    num = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            q, r = divmod(c, lead)
            if r:
                raise ArithmeticError("non-exact integer polynomial division")
            out[i - dn] = q
            for j, dc in enumerate(den):
                num[i - dn + j] -= q * dc
    if any(num[:dn]):
        raise ArithmeticError("non-exact integer polynomial division")
    return out


class CyclotomicElement:
    """Element of Z[zeta_M] in canonical coordinates.

    Coordinates are with respect to {zeta_M^j : 0 <= j < phi(M)}, obtained by
    reducing modulo the cyclotomic polynomial, so equality is coordinate
    equality.
    """

    __slots__ = ("M", "coords")

    def __init__(self, M: int, powers: Sequence[int] | np.ndarray):
        self.M = M
        vec = np.zeros(M, dtype=np.int64)
        arr = np.asarray(powers, dtype=np.int64)
        if arr.shape != (M,):
            raise ValueError("powers must have length M")
        vec += arr
        phi = np.array(cyclotomic_poly(M), dtype=np.int64)
        deg = len(phi) - 1
        # phi is monic; reduce from the top
        for i in range(M - 1, deg - 1, -1):
            c = vec[i]
            if c:
                vec[i - deg : i + 1] -= c * phi
        self.coords = tuple(int(x) for x in vec[:deg])

    @classmethod
    def from_root_terms(cls, terms: Iterable[tuple[Fraction, int]], N: int) -> "CyclotomicElement":
        """Build sum c * zeta_N^e for rational exponents e.

        The common denominator D of the exponents gives zeta_N^e = zeta_{DN}^{eD}.
        """
        terms = [(as_fraction(e), int(c)) for e, c in terms]
        D = 1
        for e, _ in terms:
            D = D * e.denominator // gcd(D, e.denominator)
        M = D * N
        powers = np.zeros(M, dtype=np.int64)
        for e, c in terms:
            j = int(e * D) % M
            powers[j] += c
        return cls(M, powers)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self):
        return f"CyclotomicElement(M={self.M}, coords={self.coords})"
