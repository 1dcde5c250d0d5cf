"""Sparse q-series with exact rational exponents.

A :class:`QSeries` is exact for every exponent strictly below ``order``.
``order=None`` marks an exact finite object; :class:`LaurentPoly` is the
subclass used for knot polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Iterator, Mapping

from .exactq import DEFAULT_PREC, APComplex, as_fraction, mp_context


class NonExactDivision(ArithmeticError):
    """Raised when a Laurent polynomial division leaves a remainder."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _min_order(*orders):
    finite = [o for o in orders if o is not None]
    return min(finite) if finite else None


class QSeries:
    """Truncated series sum c_e q^e, exact below ``order``."""

    __slots__ = ("_terms", "order")

    def __init__(self, terms: Mapping | Iterable = (), order=None):
        order = None if order is None else as_fraction(order)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, Fraction] = {}
        for e, c in items:
            e = as_fraction(e)
            if order is not None and e >= order:
                continue
            acc[e] = acc.get(e, Fraction(0)) + as_fraction(c)
        self._terms = {e: c for e, c in acc.items() if c}
        self.order = order

    # -- construction helpers ------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict, order):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.order = order
        return obj

    @classmethod
    def monomial(cls, exponent, coeff=1, order=None):
        return cls({as_fraction(exponent): coeff}, order)

    @property
    def exact(self) -> bool:
        return self.order is None

    @property
    def terms(self) -> dict[Fraction, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Fraction, Fraction]]:
        """Terms in ascending exponent order."""
        for e in sorted(self._terms):
            yield e, self._terms[e]

    def coeff(self, e) -> Fraction:
        e = as_fraction(e)
        if self.order is not None and e >= self.order:
            raise ValueError(f"coefficient at {e} is beyond the truncation order {self.order}")
        return self._terms.get(e, Fraction(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def min_exponent(self):
        return min(self._terms) if self._terms else None

    def max_exponent(self):
        return max(self._terms) if self._terms else None

    def valuation_bound(self):
        """Lower bound on the true valuation (None means +infinity)."""
        lead = self.min_exponent()
        return _min_order(lead, self.order)

    def grain(self) -> int:
        """LCM of exponent denominators."""
        d = 1
        for e in self._terms:
            d = _lcm(d, e.denominator)
        return d

    # -- ring operations -----------------------------------------------------

    def _result_cls(self, other):
        if type(self) is type(other):
            return type(self)
        return QSeries

    def truncate(self, order) -> "QSeries":
        order = as_fraction(order)
        if self.order is not None:
            order = min(order, self.order)
        return QSeries._raw({e: c for e, c in self._terms.items() if e < order}, order)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.monomial(0, other)
        order = _min_order(self.order, other.order)
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        if order is not None:
            acc = {e: c for e, c in acc.items() if e < order}
        cls = self._result_cls(other) if order is None else QSeries
        return cls._raw({e: c for e, c in acc.items() if c}, order)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw({e: -c for e, c in self._terms.items()}, self.order)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.monomial(0, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = as_fraction(c)
        if not c:
            return type(self)._raw({}, self.order)
        return type(self)._raw({e: v * c for e, v in self._terms.items()}, self.order)

    def shift(self, e) -> "QSeries":
        """Multiply by q^e."""
        e = as_fraction(e)
        order = None if self.order is None else self.order + e
        return type(self)._raw({k + e: v for k, v in self._terms.items()}, order)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        # (A + O(q^oa))(B + O(q^ob)): error starts at min(oa + val B, ob + val A)
        candidates = []
        if self.order is not None:
            vb = other.valuation_bound()
            if vb is not None:
                candidates.append(self.order + vb)
        if other.order is not None:
            va = self.valuation_bound()
            if va is not None:
                candidates.append(other.order + va)
        if self.order is None and other.order is None:
            order = None
        elif candidates:
            order = min(candidates)
        else:
            order = None  # one side is an exact zero
        acc: dict[Fraction, Fraction] = {}
        a_items = list(self._terms.items())
        for eb, cb in other._terms.items():
            for ea, ca in a_items:
                e = ea + eb
                if order is not None and e >= order:
                    continue
                acc[e] = acc.get(e, Fraction(0)) + ca * cb
        cls = self._result_cls(other) if order is None else QSeries
        return cls._raw({e: c for e, c in acc.items() if c}, order)

    def __rmul__(self, other):
        return self.scale(other)

    def inverse(self, order=None) -> "QSeries":
        """Multiplicative inverse of a unit series.

        The series must have a nonzero lowest coefficient; the result is
        q^{-v} times the inverse of the normalized power series, truncated
        at ``order`` (defaults to what the input truncation supports).
        """
        v = self.min_exponent()
        if v is None:
            raise ZeroDivisionError("series has no nonzero term")
        # normalized unit u = q^{-v} self = c0 + ...; relative precision rho
        rel = None if self.order is None else self.order - v
        if order is not None:
            want = as_fraction(order) + v
            rel = want if rel is None else min(rel, want)
        if rel is None:
            raise ValueError("inverse of an exact series needs an explicit order")
        unit = {e - v: c for e, c in self._terms.items() if e - v < rel}
        d = 1
        for e in unit:
            d = _lcm(d, e.denominator)
        c0 = unit[Fraction(0)]
        # solve in integer grain units: inv[k] = -(1/c0) sum_{j>=1} u[j] inv[k-j]
        limit = rel * d
        nmax = -(-limit.numerator // limit.denominator)  # ceil
        u = {int(e * d): c for e, c in unit.items() if e}
        inv = [Fraction(0)] * nmax
        if nmax:
            inv[0] = 1 / c0
        u_items = sorted(u.items())
        for k in range(1, nmax):
            acc = Fraction(0)
            for j, cj in u_items:
                if j > k:
                    break
                if inv[k - j]:
                    acc += cj * inv[k - j]
            inv[k] = -acc / c0
        terms = {Fraction(k, d) - v: c for k, c in enumerate(inv) if c}
        return QSeries._raw(terms, rel - v)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self._terms == other._terms

    def __hash__(self):
        return hash((self.order, frozenset(self._terms.items())))

    def agrees_with(self, other: "QSeries", order=None) -> bool:
        """Coefficientwise equality below ``order`` (default: common order)."""
        bound = _min_order(self.order, other.order, None if order is None else as_fraction(order))
        keys = set(self._terms) | set(other._terms)
        for e in keys:
            if bound is not None and e >= bound:
                continue
            if self._terms.get(e, 0) != other._terms.get(e, 0):
                return False
        return True

    def first_disagreement(self, other: "QSeries"):
        """Smallest exponent where the two differ within their common order."""
        bound = _min_order(self.order, other.order)
        bad = [
            e
            for e in set(self._terms) | set(other._terms)
            if (bound is None or e < bound) and self._terms.get(e, 0) != other._terms.get(e, 0)
        ]
        return min(bad) if bad else None

    # -- specializations -----------------------------------------------------

    def substitute_power(self, k: int) -> "QSeries":
        """q -> q^k for positive integer k."""
        order = None if self.order is None else self.order * k
        return type(self)._raw({e * k: c for e, c in self._terms.items()}, order)

    def evaluate_at_tau(self, tau, prec: int = DEFAULT_PREC) -> APComplex:
        return eval_series_at_tau(self, tau, prec)

    # -- text ----------------------------------------------------------------

    def __repr__(self):
        body = format_poly(self, descending=False) or "0"
        if self.order is not None:
            body += f" + O(q^({self.order}))"
        return f"{type(self).__name__}({body})"


class LaurentPoly(QSeries):
    """Exact finite sum of rational powers of q."""

    __slots__ = ()

    def __init__(self, terms: Mapping | Iterable = ()):
        super().__init__(terms, None)

    @classmethod
    def from_series(cls, series: QSeries) -> "LaurentPoly":
        if series.order is not None:
            raise ValueError("series is truncated, not a Laurent polynomial")
        return cls._raw(dict(series._terms), None)

    def exact_divide(self, den: "LaurentPoly") -> "LaurentPoly":
        return exact_divide(self, den)

    def evaluate(self, q) -> Fraction:
        """Exact value at a rational q > 0 (exponents must then be integral
        or q a perfect power; used by oracles with integer grain only)."""
        q = as_fraction(q)
        total = Fraction(0)
        for e, c in self._terms.items():
            if e.denominator != 1:
                raise ValueError("exact rational evaluation needs integer exponents")
            total += c * q ** int(e)
        return total


# ---------------------------------------------------------------------------


def exact_divide(num: QSeries, den: QSeries) -> LaurentPoly:
    """Exact quotient of two Laurent polynomials in rational powers of q.

    Division is carried out in u = q^{1/d} with d the common exponent grain.
    """
    if num.order is not None or den.order is not None:
        raise ValueError("exact_divide needs exact (untruncated) operands")
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return LaurentPoly()
    d = _lcm(num.grain(), den.grain())
    n_lo = num.min_exponent()
    d_lo = den.min_exponent()
    a = [Fraction(0)] * (int((num.max_exponent() - n_lo) * d) + 1)
    for e, c in num._terms.items():
        a[int((e - n_lo) * d)] = c
    b = sorted((int((e - d_lo) * d), c) for e, c in den._terms.items())
    db, lead = b[-1]
    if len(a) - 1 < db:
        raise NonExactDivision("numerator degree below denominator degree")
    all_int = lead in (1, -1) and all(c.denominator == 1 for c in a) and all(
        c.denominator == 1 for _, c in b
    )
    if all_int:
        a = [int(c) for c in a]
        b = [(j, int(c)) for j, c in b]
        lead = int(lead)
    quot = [0] * (len(a) - db)
    lower = b[:-1]
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if not c:
            continue
        qc = c * lead if all_int else c / lead  # lead = +-1 in the integer path
        quot[i - db] = qc
        base = i - db
        for j, cj in lower:
            a[base + j] -= qc * cj
        a[i] = 0
    if any(a[:db]):
        raise NonExactDivision("nonzero remainder")
    shift = n_lo - d_lo
    return LaurentPoly._raw(
        {Fraction(k, d) + shift: Fraction(c) for k, c in enumerate(quot) if c}, None
    )


def eta_series(order) -> QSeries:
    """Dedekind eta q^{1/24} prod_{n>=1} (1 - q^n), exact below ``order``."""
    order = as_fraction(order)
    if order <= 0:
        raise ValueError("order must be positive")
    # product over n < order - 1/24 is enough; factors with n beyond do not
    # touch exponents below order
    top = order - Fraction(1, 24)
    nmax = int(top) + 1
    poly = {0: 1}
    for n in range(1, nmax + 1):
        nxt = dict(poly)
        for e, c in poly.items():
            if e + n < top:
                nxt[e + n] = nxt.get(e + n, 0) - c
        poly = {e: c for e, c in nxt.items() if c}
    return QSeries({Fraction(e) + Fraction(1, 24): c for e, c in poly.items()}, order)


def pentagonal_eta(order) -> QSeries:
    """Eta from Euler's pentagonal-number theorem (independent oracle)."""
    order = as_fraction(order)
    terms = {}
    k = 0
    while True:
        hit = False
        for kk in ({k, -k} if k else {0}):
            e = Fraction(kk * (3 * kk - 1), 2) + Fraction(1, 24)
            if e < order:
                terms[e] = (-1) ** (kk % 2)
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return QSeries(terms, order)


def divide_by_eta(series: QSeries, order=None) -> QSeries:
    """series / eta via exact inversion of the eta product."""
    if series.is_zero():
        base = series.order if series.order is not None else order
        return QSeries({}, None if base is None else as_fraction(base) - Fraction(1, 24))
    lead = series.min_exponent()
    top = series.order if series.order is not None else as_fraction(order)
    if top is None:
        raise ValueError("dividing an exact series by eta needs an explicit order")
    # result needed below top - 1/24 ; the inverse must be good to top - lead
    span = top - lead
    inv = eta_series(span + Fraction(1, 24)).inverse()
    res = series * inv
    if order is not None:
        res = res.truncate(as_fraction(order))
    return res


def eval_series_at_tau(series: QSeries, tau, prec: int = DEFAULT_PREC) -> APComplex:
    """Numeric value of sum c_e exp(2 pi i e tau) (Im tau > 0)."""
    ctx = mp_context(prec)
    tau = ctx.mpc(tau.value if isinstance(tau, APComplex) else tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half-plane")
    total = ctx.mpc(0)
    two_pi_i_tau = 2 * ctx.pi * ctx.mpc(0, 1) * tau
    for e, c in series.items():
        total += (ctx.mpf(c.numerator) / c.denominator) * ctx.exp(
            two_pi_i_tau * ctx.mpf(e.numerator) / e.denominator
        )
    return APComplex(total, prec)


# ---------------------------------------------------------------------------
# Text formats


def _fmt_exp(e: Fraction) -> str:
    return f"{e.numerator}" if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


def format_poly(series: QSeries, descending: bool = True) -> str:
    """Human form, e.g. ``q^(-1) + q^(-3) - q^(-4)``."""
    parts = []
    for e, c in sorted(series._terms.items(), reverse=descending):
        mag = abs(c)
        if e == 0:
            mono = str(mag)
        else:
            mono = f"q^({_fmt_exp(e)})"
            if mag != 1:
                mono = f"{mag}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, mono))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, mono in parts[1:]:
        out += f" {sign} {mono}"
    return out


def dumps(series: QSeries) -> str:
    """Serialize: header ``order a/b`` (or ``order exact``), then one
    ``c q^(a/b)`` line per term, ascending exponent."""
    head = "order exact" if series.order is None else f"order {series.order.numerator}/{series.order.denominator}"
    lines = [head]
    for e, c in series.items():
        lines.append(f"{c.numerator}/{c.denominator} q^({e.numerator}/{e.denominator})")
    return "\n".join(lines) + "\n"


def loads(text: str) -> QSeries:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("order "):
        raise ValueError("missing order header")
    head = lines[0][len("order "):]
    order = None if head == "exact" else Fraction(head)
    terms = {}
    for ln in lines[1:]:
        c, mono = ln.split()
        if not (mono.startswith("q^(") and mono.endswith(")")):
            raise ValueError(f"bad term line: {ln!r}")
        e = Fraction(mono[3:-1])
        if e in terms:
            raise ValueError(f"duplicate exponent {e}")
        terms[e] = Fraction(c)
    if order is None:
        return LaurentPoly(terms)
    return QSeries(terms, order)


# ---------------------------------------------------------------------------
# Series graded by an extra integer variable z


class QZSeries:
    """sum c_{e,j} q^e z^j with integer z exponents, exact below ``order`` in q."""

    __slots__ = ("_terms", "order")

    def __init__(self, terms: Mapping | Iterable = (), order=None):
        order = None if order is None else as_fraction(order)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[Fraction, int], Fraction] = {}
        for (e, j), c in items:
            e = as_fraction(e)
            if order is not None and e >= order:
                continue
            key = (e, int(j))
            acc[key] = acc.get(key, Fraction(0)) + as_fraction(c)
        self._terms = {k: c for k, c in acc.items() if c}
        self.order = order

    @property
    def terms(self):
        return dict(self._terms)

    def __add__(self, other: "QZSeries") -> "QZSeries":
        order = _min_order(self.order, other.order)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, Fraction(0)) + c
        return QZSeries(acc, order)

    def __neg__(self):
        return QZSeries({k: -c for k, c in self._terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "QZSeries") -> "QZSeries":
        if not isinstance(other, QZSeries):
            return QZSeries({k: c * as_fraction(other) for k, c in self._terms.items()}, self.order)
        a, b = self.specialize_z1(), other.specialize_z1()
        order = (a * b).order if (a.order is not None or b.order is not None) else None
        # valuation bounds depend only on q exponents, so reuse the QSeries rule
        acc: dict = {}
        for (eb, jb), cb in other._terms.items():
            for (ea, ja), ca in self._terms.items():
                e = ea + eb
                if order is not None and e >= order:
                    continue
                key = (e, ja + jb)
                acc[key] = acc.get(key, Fraction(0)) + ca * cb
        return QZSeries(acc, order)

    def times_qseries(self, other: QSeries) -> "QZSeries":
        return self * QZSeries({(e, 0): c for e, c in other._terms.items()}, other.order)

    def specialize_z1(self) -> QSeries:
        """z := 1."""
        acc: dict[Fraction, Fraction] = {}
        for (e, _), c in self._terms.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        return QSeries(acc, self.order)

    def z_component(self, j: int) -> QSeries:
        """Coefficient of z^j as a q-series."""
        return QSeries({e: c for (e, jj), c in self._terms.items() if jj == j}, self.order)

    def __eq__(self, other):
        if not isinstance(other, QZSeries):
            return NotImplemented
        return self.order == other.order and self._terms == other._terms

    def __hash__(self):
        return hash((self.order, frozenset(self._terms.items())))

    def __repr__(self):
        return f"QZSeries({len(self._terms)} terms, order={self.order})"


def isqrt_ceil(x: int) -> int:
    r = isqrt(x)
    return r if r * r == x else r + 1
