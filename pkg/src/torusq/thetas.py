"""Unary theta series, their Eichler integrals and root-of-unity limits."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, isqrt

from .exactq import (
    DEFAULT_PREC,
    APComplex,
    ParameterError,
    PeriodicChar,
    bernoulli_polynomial,
    check_window,
    l_value,
    make_chi,
    make_psi,
    mp_context,
)
from .qseries import QSeries


@dataclass(frozen=True)
class Psi:
    """Psi_p^{(a)}, weight 3/2. ``strict=False`` admits any a (literal pattern)."""

    p: int
    a: int
    strict: bool = True

    def __post_init__(self):
        make_psi(self.p, self.a, strict=self.strict)

    @property
    def char(self) -> PeriodicChar:
        return make_psi(self.p, self.a, strict=self.strict)

    @property
    def modulus(self) -> int:
        """Exponent denominator 4p in q^{k^2/4p}."""
        return 4 * self.p


@dataclass(frozen=True)
class Phi:
    """Phi_{s,t}^{(n,m)}, weight 1/2."""

    s: int
    t: int
    n: int
    m: int

    def __post_init__(self):
        check_window(self.s, self.t, self.n, self.m)

    @property
    def char(self) -> PeriodicChar:
        return make_chi(self.s, self.t, self.n, self.m)

    @property
    def modulus(self) -> int:
        return 4 * self.s * self.t


ThetaKind = Psi | Phi


def parse_kind(text: str) -> ThetaKind:
    """``Psi{2,1}`` / ``Phi{2,3,1,1}`` (braces or parentheses)."""
    text = text.strip()
    for cls, arity in ((Psi, 2), (Phi, 4)):
        name = cls.__name__
        if text.lower().startswith(name.lower()):
            body = text[len(name):].strip("{}() ")
            args = [int(x) for x in body.split(",")]
            if len(args) != arity:
                raise ParameterError(f"{name} takes {arity} parameters")
            return cls(*args)
    raise ParameterError(f"unknown theta kind {text!r}")


def _kmax(modulus: int, order: Fraction) -> int:
    """Largest k >= 0 with k^2 / modulus < order."""
    bound = order * modulus  # k^2 < bound
    if bound <= 0:
        return -1
    k = isqrt(bound.numerator // bound.denominator)
    while k * k >= bound:
        k -= 1
    while (k + 1) ** 2 < bound:
        k += 1
    return k


def theta_series(kind: ThetaKind, order) -> QSeries:
    """Psi = (1/2) sum_k k psi(k) q^{k^2/4p};  Phi = (1/2) sum_k chi(k) q^{k^2/4st}."""
    order = Fraction(order)
    f, M = kind.char, kind.modulus
    terms = {}
    for k in range(1, _kmax(M, order) + 1):
        v = f(k)
        if v:
            # k and -k contribute equally (k psi(k) and chi(k) are even)
            terms[Fraction(k * k, M)] = k * v if isinstance(kind, Psi) else v
    if isinstance(kind, Phi) and f(0):
        terms[Fraction(0)] = Fraction(f(0), 2)
    return QSeries(terms, order)


def eichler_series(kind: ThetaKind, order) -> QSeries:
    """Psi~ = sum_{k>=0} psi(k) q^{k^2/4p};  Phi~ = -(1/2) sum_{k>=0} k chi(k) q^{k^2/4st}."""
    order = Fraction(order)
    f, M = kind.char, kind.modulus
    terms = {}
    for k in range(0, _kmax(M, order) + 1):
        v = f(k)
        if v:
            terms[Fraction(k * k, M)] = v if isinstance(kind, Psi) else Fraction(-k * v, 2)
    return QSeries(terms, order)


def eichler_limit(kind: ThetaKind, N: int, prec: int = DEFAULT_PREC) -> APComplex:
    """Limiting value of the Eichler integral as tau -> 1/N, as a finite sum.

    Psi~(1/N) = -sum_{k=1}^{2pN} psi(k) e^{k^2 pi i / 2pN} B_1(k/2pN)
    Phi~(1/N) = (stN/2) sum_{k=1}^{2stN} chi(k) e^{k^2 pi i / 2stN} B_2(k/2stN)
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    ctx = mp_context(prec)
    f = kind.char
    P = f.period * N  # 2pN or 2stN
    total = ctx.mpc(0)
    for k in range(1, P + 1):
        v = f(k)
        if not v:
            continue
        x = Fraction(k, P)
        b = bernoulli_polynomial(1 if isinstance(kind, Psi) else 2, x)
        # exponent k^2/P reduced mod 2 (phase e^{pi i k^2 / P})
        ph = Fraction(k * k, P) % 2
        term = ctx.expjpi(ctx.mpf(ph.numerator) / ph.denominator) * (ctx.mpf(b.numerator) / b.denominator)
        total += v * term
    if isinstance(kind, Psi):
        return APComplex(-total, prec)
    return APComplex(total * ctx.mpf(kind.s * kind.t * N) / 2, prec)


# ---------------------------------------------------------------------------
# Modular data


def primed_labels(s: int, t: int) -> list[tuple[int, int]]:
    """Transversal of (n, m) ~ (s-n, t-m): labels with n t > m s."""
    return [(n, m) for n in range(1, s) for m in range(1, t) if n * t > m * s]


def s_matrix_entry(s: int, t: int, n: int, m: int, n2: int, m2: int, prec: int = DEFAULT_PREC):
    ctx = mp_context(prec)
    sign = -1 if (n * m2 + n2 * m + 1) % 2 else 1
    return (
        sign
        * ctx.sqrt(ctx.mpf(8) / (s * t))
        * ctx.sinpi(ctx.mpf(n * n2 * t) / s)
        * ctx.sinpi(ctx.mpf(m * m2 * s) / t)
    )


def phi_weight(s: int, t: int, n: int, m: int) -> int:
    """(s-n) m when nt > ms, n (t-m) when nt < ms."""
    if n * t > m * s:
        return (s - n) * m
    if n * t < m * s:
        return n * (t - m)
    raise ParameterError("nt = ms cannot occur for coprime s, t in window")


def _theta_numeric(kind: ThetaKind, tau, prec: int):
    """Direct numeric theta sum, truncated where terms drop below 2^-prec."""
    ctx = mp_context(prec)
    tau = ctx.mpc(tau)
    y = tau.imag
    # |q^{k^2/M}| = exp(-2 pi y k^2/M) < 2^{-prec-20}
    M = kind.modulus
    kmax = int(ctx.sqrt((prec + 40) * ctx.ln(2) * M / (2 * ctx.pi * y))) + 2
    f = kind.char
    total = ctx.mpc(0)
    w = 2 * ctx.pi * ctx.mpc(0, 1) * tau
    for k in range(1, kmax + 1):
        v = f(k)
        if v:
            total += (k * v if isinstance(kind, Psi) else v) * ctx.exp(w * ctx.mpf(k * k) / M)
    return total


def modular_transform_residual(kind: ThetaKind, tau, order=None, prec: int = DEFAULT_PREC):
    """|LHS - RHS| of the S-transformation at tau.

    ``order`` truncates the q-expansions; by default the sums run until the
    dropped tail is below 2^-prec.
    """
    ctx = mp_context(prec)
    tau = ctx.mpc(tau.value if isinstance(tau, APComplex) else tau)
    stau = -1 / tau

    def value(k, z):
        if order is None:
            return _theta_numeric(k, z, prec)
        return theta_series(k, order).evaluate_at_tau(z, prec).value

    lhs = value(kind, tau)
    if isinstance(kind, Psi):
        p, a = kind.p, kind.a
        rhs = ctx.mpc(0)
        for b in range(1, p):
            rhs += ctx.sqrt(ctx.mpf(2) / p) * ctx.sinpi(ctx.mpf(a * b) / p) * value(Psi(p, b), stau)
        rhs *= ctx.power(ctx.mpc(0, 1) / tau, ctx.mpf(3) / 2)
    else:
        s, t, n, m = kind.s, kind.t, kind.n, kind.m
        rhs = ctx.mpc(0)
        for n2, m2 in primed_labels(s, t):
            rhs += s_matrix_entry(s, t, n, m, n2, m2, prec) * value(Phi(s, t, n2, m2), stau)
        rhs *= ctx.sqrt(ctx.mpc(0, 1) / tau)
    return ctx.fabs(lhs - rhs)


def t_transform_exact(kind: ThetaKind, order=50) -> bool:
    """Exact check of f(tau+1) = e^{2 pi i h} f(tau): every exponent of the
    expansion is congruent to h mod 1, h = a^2/4p or (nt-ms)^2/4st."""
    if isinstance(kind, Psi):
        h = Fraction(kind.a**2, 4 * kind.p)
    else:
        h = Fraction((kind.n * kind.t - kind.m * kind.s) ** 2, 4 * kind.s * kind.t)
    series = theta_series(kind, order)
    return all((e - h).denominator == 1 for e, _ in series.items())


# ---------------------------------------------------------------------------
# Asymptotics at roots of unity


@dataclass(frozen=True)
class AsymptoticReport:
    N: int
    K: int
    lhs: APComplex
    rhs: APComplex
    abs_error: float
    predicted_next_term: float

    def __post_init__(self):
        if self.abs_error < 0:
            raise ValueError("abs_error must be nonnegative")


def _correction(kind: ThetaKind, N: int, prec: int):
    """Non-analytic partner term added to the limiting value."""
    ctx = mp_context(prec)
    i = ctx.mpc(0, 1)
    if isinstance(kind, Psi):
        p, a = kind.p, kind.a
        acc = ctx.mpc(0)
        for b in range(1, p):
            acc += (
                ctx.sqrt(ctx.mpf(2) / p)
                * ctx.sinpi(ctx.mpf(a * b) / p)
                * (1 - ctx.mpf(b) / p)
                * ctx.expjpi(-ctx.mpf(b * b * N) / (2 * p))
            )
        return ctx.sqrt(N / i) * acc
    s, t, n, m = kind.s, kind.t, kind.n, kind.m
    acc = ctx.mpc(0)
    for n2, m2 in primed_labels(s, t):
        ph = Fraction((n2 * t - m2 * s) ** 2 * N, 2 * s * t)
        acc += (
            s_matrix_entry(s, t, n, m, n2, m2, prec)
            * phi_weight(s, t, n2, m2)
            * ctx.expjpi(-ctx.mpf(ph.numerator) / ph.denominator)
        )
    return ctx.power(N / i, ctx.mpf(3) / 2) * acc


def asymptotic_coefficients(kind: ThetaKind, K: int) -> list[Fraction]:
    """Exact L-value coefficients c_k of (pi i / M N)^k, k = 0..K."""
    f = kind.char
    if isinstance(kind, Psi):
        return [l_value(f, 2 * k) / factorial(k) for k in range(K + 1)]
    return [-l_value(f, 2 * k + 1) / (2 * factorial(k)) for k in range(K + 1)]


def asymptotic_expansion(kind: ThetaKind, N: int, K: int, prec: int = DEFAULT_PREC) -> AsymptoticReport:
    """Compare the corrected limiting value with the L-value series to K terms."""
    if N < 2 or K < 0:
        raise ParameterError("need N >= 2 and K >= 0")
    ctx = mp_context(prec)
    lhs = eichler_limit(kind, N, prec).value + _correction(kind, N, prec)
    M = 2 * kind.p if isinstance(kind, Psi) else 2 * kind.s * kind.t
    x = ctx.pi * ctx.mpc(0, 1) / (M * N)
    coeffs = asymptotic_coefficients(kind, K + 1)
    rhs = ctx.mpc(0)
    for k in range(K + 1):
        c = coeffs[k]
        rhs += (ctx.mpf(c.numerator) / c.denominator) * x**k
    nxt = coeffs[K + 1]
    predicted = ctx.fabs(ctx.mpf(nxt.numerator) / nxt.denominator * x ** (K + 1))
    return AsymptoticReport(
        N=N,
        K=K,
        lhs=APComplex(lhs, prec),
        rhs=APComplex(rhs, prec),
        abs_error=float(ctx.fabs(lhs - rhs)),
        predicted_next_term=float(predicted),
    )


def radial_limit(
    kind: ThetaKind,
    N: int,
    eps=(Fraction(1, 1000), Fraction(1, 10000), Fraction(1, 100000)),
    prec: int = 64,
) -> APComplex:
    """Extrapolated value of the Eichler series along tau = 1/N + i eps/N^2.

    The local parameter at the cusp 1/N scales like eps * N^2, hence the
    rescaling.  Polynomial (Neville) extrapolation to eps = 0 through the
    sampled values.
    Independent of :func:`eichler_limit`: it only evaluates the q-expansion.
    """
    ctx = mp_context(prec)
    xs, vals = [], []
    for e in eps:
        e = Fraction(e) / (N * N)
        # q-exponent cutoff where |q^x| = exp(-2 pi eps x) < 2^-prec
        cutoff = Fraction(int((prec + 20) * 0.6931471805599453 / (2 * 3.141592653589793 * float(e))) + 1)
        series = eichler_series(kind, cutoff)
        x = ctx.mpf(e.numerator) / e.denominator
        tau = ctx.mpc(ctx.mpf(1) / N, x)
        xs.append(x)
        vals.append(series.evaluate_at_tau(tau, prec).value)
    # Neville's scheme evaluated at 0
    table = list(vals)
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            table[i] = (xs[j] * table[i] - xs[i] * table[i + 1]) / (xs[j] - xs[i])
    return APComplex(table[0], prec)
