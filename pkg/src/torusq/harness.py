"""Executable checks of the identities tying knots, thetas and characters.

Every ``verify_*`` function computes both sides through independent code
paths and returns a :class:`VerifyReport`.  Exact checks compare q-series
coefficientwise; numeric checks compare APComplex values at a stated
precision.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, Sequence

from .exactq import (
    DEFAULT_PREC,
    CyclotomicElement,
    ParameterError,
    check_coprime,
    check_window,
    eval_at_root,
    mp_context,
    root_phase,
)
from .knots import (
    family_three_multiplicities,
    family_two_exponents,
    family_two_multiplicities,
    family_two_value,
    jones_family_three,
    jones_family_two,
    jones_T2_2p,
    jones_torus_knot,
)
from .qseries import QSeries
from .thetas import (
    Phi,
    Psi,
    ThetaKind,
    asymptotic_expansion,
    eichler_limit,
    eichler_series,
    modular_transform_residual,
    parse_kind,
    t_transform_exact,
    theta_series,
)
from .voa import VoaLabel, ab_char_1t, ab_char_st, char_singlet, char_X

IDENTITIES = (
    "tail",
    "kashaev_eichler",
    "kashaev_knot",
    "gauss",
    "quantum_modularity",
    "triple",
    "ab",
    "transform",
)


class StabilizationTooLow(ParameterError):
    """The requested order lies above the stabilized range for this N."""

    def __init__(self, message: str, needed_N: int):
        super().__init__(message)
        self.needed_N = needed_N


def _fraction_text(x: Fraction) -> str:
    return str(Fraction(x))


@dataclass
class VerifyReport:
    identity_id: str
    params: dict
    mode: str
    passed: bool
    runtime_ms: int = 0
    agreement_order: Fraction | None = None
    abs_error: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.identity_id not in IDENTITIES:
            raise ValueError(f"unknown identity {self.identity_id!r}")
        if self.mode not in ("exact", "numeric"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def to_dict(self, timing: bool = True) -> dict:
        out = {"identity_id": self.identity_id, "params": self.params, "mode": self.mode}
        if self.agreement_order is not None:
            out["agreement_order"] = _fraction_text(self.agreement_order)
        if self.abs_error is not None:
            out["abs_error"] = self.abs_error
        out["passed"] = self.passed
        if timing:
            out["runtime_ms"] = self.runtime_ms
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "VerifyReport":
        order = data.get("agreement_order")
        return cls(
            identity_id=data["identity_id"],
            params=data["params"],
            mode=data["mode"],
            passed=data["passed"],
            runtime_ms=data.get("runtime_ms", 0),
            agreement_order=None if order is None else Fraction(order),
            abs_error=data.get("abs_error"),
            details=data.get("details", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "VerifyReport":
        return cls.from_dict(json.loads(text))


@contextmanager
def _stopwatch():
    box = {}
    start = time.perf_counter()
    try:
        yield box
    finally:
        box["ms"] = int(round((time.perf_counter() - start) * 1000))


def _exact_report(identity, params, lhs: QSeries, rhs: QSeries, order, ms, **details) -> VerifyReport:
    order = Fraction(order)
    bad = lhs.truncate(order).first_disagreement(rhs.truncate(order))
    reached = order if bad is None else bad
    return VerifyReport(
        identity, params, "exact", bad is None, ms, agreement_order=reached, details=details
    )


# ---------------------------------------------------------------------------
# stabilization gate for the link families


def _pair_min_exponent(s, t, n, m, r, shift) -> Fraction:
    return min(family_two_exponents(s, t, n, m, r)) + shift


def stabilization_exponent(s: int, t: int, n: int, m: int, N: int, links: int = 2) -> Fraction:
    """Exponent below which the finite-N expression equals its N -> infinity limit.

    With E the normalizing shift, q^{E - N/2} J_N = -q^E P_N / (1 - q^N) where
    P_N is the numerator sum, so the finite expression differs from -q^E P_N
    only from exponent N + val(q^E P_N) on.  The multiplicities of P_N follow
    a polynomial model in r inside a window; summands whose multiplicity
    departs from that model (or that are missing) are the dropped terms.
    """
    counts = family_two_multiplicities(N) if links == 2 else family_three_multiplicities(N)
    shift = Fraction((n * t) ** 2 + (m * s) ** 2, 4 * s * t)
    acc: dict[Fraction, int] = {}
    for r in sorted(counts):
        ep, em = family_two_exponents(s, t, n, m, r)
        acc[ep + shift] = acc.get(ep + shift, 0) + counts[r]
        acc[em + shift] = acc.get(em + shift, 0) - counts[r]
    numerator = QSeries(acc, None)
    val = numerator.min_exponent()
    bound = None if val is None else N + val

    if links == 2:
        def model(r):
            return N - abs(r)
    else:
        def model(r):
            return Fraction(3 * N * N + 1, 4) - r * r

    half = Fraction(1, 2) if links == 3 and N % 2 == 0 else Fraction(0)
    rmax = max(abs(r) for r in counts)
    k = 0
    while True:
        r = half + k
        if r > rmax + 2:
            break
        for rr in {r, -r}:
            if counts.get(rr, 0) != model(rr):
                e = _pair_min_exponent(s, t, n, m, rr, shift)
                bound = e if bound is None else min(bound, e)
        k += 1
    return bound


def _gate(s, t, n, m, N, order, links, parity=None) -> None:
    order = Fraction(order)
    if stabilization_exponent(s, t, n, m, N, links) >= order + 1:
        return
    step = 2 if parity is not None else 1
    cand = N + step
    limit = 8 * int(order) + 16
    while cand <= limit:
        if stabilization_exponent(s, t, n, m, cand, links) >= order + 1:
            break
        cand += step
    raise StabilizationTooLow(
        f"N={N} only stabilizes below q^({stabilization_exponent(s, t, n, m, N, links)}); "
        f"order {order} needs N={cand}",
        cand,
    )


def minimal_stable_N(s: int, t: int, n: int, m: int, order, links: int = 2, parity: int | None = None) -> int:
    """Smallest N (of the given parity) passing the stabilization gate."""
    N = 1 if parity is None else (2 if parity == 0 else 1)
    step = 1 if parity is None else 2
    while stabilization_exponent(s, t, n, m, N, links) < Fraction(order) + 1:
        N += step
    return N


# ---------------------------------------------------------------------------
# exact identities


def verify_tail(s: int, t: int, n: int, m: int, N: int, order, gate: bool = True) -> VerifyReport:
    """q^{((nt)^2+(ms)^2)/4st - N/2} J_N - N Phi^{(n,m)} against eta * singlet character.

    ``gate=False`` skips the stabilization check and just measures how far
    the two sides agree.
    """
    check_window(s, t, n, m)
    if gate:
        _gate(s, t, n, m, N, order, links=2)
    params = {"s": s, "t": t, "n": n, "m": m, "N": N, "order": str(Fraction(order))}
    with _stopwatch() as clock:
        shift = Fraction((n * t) ** 2 + (m * s) ** 2, 4 * s * t) - Fraction(N, 2)
        poly = jones_family_two(s, t, n, m, N)
        lhs = QSeries(poly.terms, None).shift(shift).truncate(order)
        lhs = lhs - theta_series(Phi(s, t, n, m), order).scale(N)
        rhs = char_singlet(VoaLabel(s, t, n, m), order)
    return _exact_report("tail", params, lhs, rhs, order, clock["ms"])


def verify_triple(s: int, t: int, n: int, m: int, N: int, order, gate: bool = True) -> VerifyReport:
    """T_{3s,3t} family: odd N against X^+_{n,m}, even N against X^-_{n,m}."""
    check_window(s, t, n, m)
    if gate:
        _gate(s, t, n, m, N, order, links=3, parity=N % 2)
    params = {"s": s, "t": t, "n": n, "m": m, "N": N, "order": str(Fraction(order))}
    with _stopwatch() as clock:
        shift = Fraction((n * t) ** 2 + (m * s) ** 2, 4 * s * t) - Fraction(N, 2)
        poly = jones_family_three(s, t, n, m, N)
        lhs = QSeries(poly.terms, None).shift(shift).truncate(order)
        if N % 2:
            lhs = lhs - theta_series(Phi(s, t, n, m), order).scale(Fraction(3 * N * N + 1, 4))
            rhs = char_X(VoaLabel(s, t, n, m, +1), order, numerator=True)
        else:
            lhs = lhs + theta_series(Phi(s, t, s - n, m), order).scale(Fraction(3 * N * N, 4))
            rhs = char_X(VoaLabel(s, t, n, m, -1), order, numerator=True)
    return _exact_report("triple", params, lhs, rhs, order, clock["ms"], sign="+" if N % 2 else "-")


def verify_ab(s: int, t: int, n: int, m: int, order, graded_order=None) -> VerifyReport:
    """Atiyah-Bott routes against the direct characters.

    s = 1 checks the (1, t) singlet against Psi~_t^{(t-m)}; otherwise the
    ungraded sum against the singlet character (to ``order``) and the graded
    sum at z = 1 against char_X (to ``graded_order``, default ``order``),
    for both signs.
    """
    order = Fraction(order)
    graded_order = order if graded_order is None else Fraction(graded_order)
    params = {"s": s, "t": t, "n": n, "m": m, "order": str(order), "graded_order": str(graded_order)}
    with _stopwatch() as clock:
        if s == 1:
            if not 0 < m < t:
                raise ParameterError(f"need 0 < m < t, got m={m}, t={t}")
            lhs = ab_char_1t(t, m, 0, order, numerator=True)
            rhs = eichler_series(Psi(t, t - m), order)
            parts = {"c": lhs.truncate(order).first_disagreement(rhs.truncate(order))}
        else:
            check_window(s, t, n, m)
            parts = {}
            for sign, tag in ((1, "+"), (-1, "-")):
                label = VoaLabel(s, t, n, m, sign)
                a = ab_char_st(label, order, numerator=True)
                parts["a" + tag] = a.first_disagreement(char_singlet(label, order))
                g = ab_char_st(label, graded_order, graded=True, numerator=True).specialize_z1()
                parts["b" + tag] = g.first_disagreement(char_X(label, graded_order, numerator=True))
    bad = [e for e in parts.values() if e is not None]
    reached = min(bad) if bad else (order if s == 1 else min(order, graded_order))
    details = {k: ("ok" if v is None else _fraction_text(v)) for k, v in parts.items()}
    return VerifyReport("ab", params, "exact", not bad, clock["ms"], agreement_order=reached, details=details)


def gauss_terms(s: int, t: int, n: int, m: int, N: int) -> list[tuple[Fraction, int]]:
    st = s * t
    a, b = n * t + m * s, n * t - m * s
    out = []
    for k in range(N):
        out.append((Fraction((2 * st * k - a) ** 2, 4 * st), 1))
        out.append((Fraction((2 * st * k + b) ** 2, 4 * st), -1))
    return out


def verify_gauss(s: int, t: int, n: int, m: int, N: int, mode: str = "exact", prec: int = DEFAULT_PREC) -> VerifyReport:
    """Vanishing of the quadratic exponential sum over k = 0..N-1.

    Exact mode reports the L1 norm of the cyclotomic coordinates as abs_error.
    """
    check_window(s, t, n, m)
    if N < 1:
        raise ParameterError("N must be >= 1")
    if mode not in ("exact", "numeric"):
        raise ParameterError(f"mode must be exact or numeric, got {mode!r}")
    params = {"s": s, "t": t, "n": n, "m": m, "N": N}
    with _stopwatch() as clock:
        terms = gauss_terms(s, t, n, m, N)
        if mode == "exact":
            elem = CyclotomicElement.from_root_terms(terms, N)
            err = float(sum(abs(c) for c in elem.coords))
            ok = elem.is_zero()
        else:
            params["prec"] = prec
            err = float(abs(eval_at_root(terms, N, prec)))
            ok = err < 1e-25
    return VerifyReport("gauss", params, mode, ok, clock["ms"], abs_error=err)


# ---------------------------------------------------------------------------
# numeric identities


def _tolerance(prec: int):
    return mp_context(prec).ldexp(1, -(prec // 2))


def _as_mpc(x, prec):
    ctx = mp_context(prec)
    return ctx.mpc(x.value) if hasattr(x, "value") else ctx.mpc(x)


def verify_kashaev_eichler(s: int, t: int, n: int, m: int, N: int, prec: int = DEFAULT_PREC) -> VerifyReport:
    """(1/N) zeta^{((nt)^2+(ms)^2)/4st} J_N(zeta) against the limiting values
    -Phi~ - ((nt-ms)/2) Psi~^{(nt-ms)} + ((nt+ms)/2) Psi~^{(nt+ms)} at 1/N."""
    check_window(s, t, n, m)
    if N < 1:
        raise ParameterError("N must be >= 1")
    params = {"s": s, "t": t, "n": n, "m": m, "N": N, "prec": prec}
    with _stopwatch() as clock:
        ctx = mp_context(prec)
        st = s * t
        phase = root_phase(Fraction((n * t) ** 2 + (m * s) ** 2, 4 * st), N, prec)
        lhs = phase * _as_mpc(family_two_value(s, t, n, m, N, prec), prec) / N
        a, b = n * t - m * s, n * t + m * s
        rhs = (
            -_as_mpc(eichler_limit(Phi(s, t, n, m), N, prec), prec)
            - ctx.mpf(a) / 2 * _as_mpc(eichler_limit(Psi(st, a, strict=False), N, prec), prec)
            + ctx.mpf(b) / 2 * _as_mpc(eichler_limit(Psi(st, b, strict=False), N, prec), prec)
        )
        err = ctx.fabs(lhs - rhs)
    return VerifyReport(
        "kashaev_eichler", params, "numeric", bool(err <= _tolerance(prec)), clock["ms"], abs_error=float(err)
    )


def verify_kashaev_knot(kind: str, N: int, prec: int = DEFAULT_PREC, *, p=None, s=None, t=None) -> VerifyReport:
    """``kind='T2_2p'`` with p >= 2, or ``kind='Tst'`` with coprime s, t >= 2.

    <T_{2,2p}>_N = -pN zeta^{(3p^2-1)/4p} Psi~_p^{(p-1)}(1/N);
    <T_{s,t}>_N = zeta^{(s^2t^2-s^2-t^2)/4st} Phi~^{(s-1,1)}(1/N).
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    ctx = mp_context(prec)
    with _stopwatch() as clock:
        if kind == "T2_2p":
            if p is None or p < 2:
                raise ParameterError("T2_2p needs p >= 2")
            params = {"kind": kind, "p": p, "N": N, "prec": prec}
            lhs = _as_mpc(eval_at_root(jones_T2_2p(p, N).items(), N, prec), prec)
            phase = root_phase(Fraction(3 * p * p - 1, 4 * p), N, prec)
            rhs = -p * N * phase * _as_mpc(eichler_limit(Psi(p, p - 1), N, prec), prec)
        elif kind == "Tst":
            if s is None or t is None or s < 2 or t < 2:
                raise ParameterError("Tst needs s, t >= 2")
            check_coprime(s, t)
            params = {"kind": kind, "s": s, "t": t, "N": N, "prec": prec}
            lhs = _as_mpc(eval_at_root(jones_torus_knot(s, t, N).items(), N, prec), prec)
            phase = root_phase(Fraction(s * s * t * t - s * s - t * t, 4 * s * t), N, prec)
            rhs = phase * _as_mpc(eichler_limit(Phi(s, t, s - 1, 1), N, prec), prec)
        else:
            raise ParameterError(f"unknown knot kind {kind!r}")
        err = ctx.fabs(lhs - rhs)
    return VerifyReport(
        "kashaev_knot", params, "numeric", bool(err <= _tolerance(prec)), clock["ms"], abs_error=float(err)
    )


def _kind_text(kind: ThetaKind) -> str:
    if isinstance(kind, Psi):
        return f"Psi{{{kind.p},{kind.a}}}"
    return f"Phi{{{kind.s},{kind.t},{kind.n},{kind.m}}}"


def verify_quantum_modularity(
    kind: ThetaKind | str, N_list: Sequence[int] = (20, 40, 80), K: int = 1, prec: int = DEFAULT_PREC
) -> VerifyReport:
    """Errors of the K-term expansion must shrink by a factor in
    [2^{-K-2}, 2^{-K}] each time N doubles."""
    if isinstance(kind, str):
        kind = parse_kind(kind)
    if not 0 <= K <= 4:
        raise ParameterError("K must lie in 0..4")
    N_list = list(N_list)
    for a, b in zip(N_list, N_list[1:]):
        if b != 2 * a:
            raise ParameterError("N_list must double at each step")
    params = {"kind": _kind_text(kind), "N_list": N_list, "K": K, "prec": prec}
    with _stopwatch() as clock:
        errors = [asymptotic_expansion(kind, N, K, prec).abs_error for N in N_list]
        ratios = [b / a for a, b in zip(errors, errors[1:])]
        lo, hi = 2.0 ** (-K - 2), 2.0 ** (-K)
        ok = all(lo <= r <= hi for r in ratios)
    return VerifyReport(
        "quantum_modularity",
        params,
        "numeric",
        ok,
        clock["ms"],
        abs_error=errors[-1],
        details={"errors": errors, "ratios": ratios},
    )


def verify_transform(kind: ThetaKind | str, tau=1j, order=None, prec: int = DEFAULT_PREC) -> VerifyReport:
    """S-transformation residual below 2^{-prec/2}, plus the exact T check."""
    if isinstance(kind, str):
        kind = parse_kind(kind)
    ctx = mp_context(prec)
    tau = ctx.mpc(tau)
    if tau.imag <= 0:
        raise ParameterError("tau must lie in the upper half plane")
    params = {
        "kind": _kind_text(kind),
        "tau": [str(tau.real), str(tau.imag)],
        "order": None if order is None else str(Fraction(order)),
        "prec": prec,
    }
    with _stopwatch() as clock:
        res = modular_transform_residual(kind, tau, order, prec)
        t_ok = t_transform_exact(kind)
        ok = bool(res <= _tolerance(prec)) and t_ok
    return VerifyReport(
        "transform", params, "numeric", ok, clock["ms"], abs_error=float(res), details={"T": t_ok}
    )


# ---------------------------------------------------------------------------
# suite


STANDARD_GRID = ((2, 3), (3, 4), (2, 5))


def _labels(grid=STANDARD_GRID):
    for s, t in grid:
        for n in range(1, s):
            for m in range(1, t):
                yield s, t, n, m


def suite_tasks(prec: int = DEFAULT_PREC) -> list[Callable[[], VerifyReport]]:
    """The fixed, ordered list of checks run by :func:`run_suite`."""
    tasks: list[Callable[[], VerifyReport]] = []
    for s, t, n, m in _labels():
        for N in range(1, 13):
            tasks.append(partial(verify_gauss, s, t, n, m, N, "exact"))
        for N in (2, 3, 5, 8):
            tasks.append(partial(verify_kashaev_eichler, s, t, n, m, N, prec))
        tasks.append(partial(verify_ab, s, t, n, m, 100, 50))
    tasks.append(partial(verify_ab, 1, 2, 1, 1, 60))
    for p in (2, 3):
        for N in range(2, 11):
            tasks.append(partial(verify_kashaev_knot, "T2_2p", N, prec, p=p))
    for s, t in ((2, 3), (3, 4)):
        for N in range(2, 11):
            tasks.append(partial(verify_kashaev_knot, "Tst", N, prec, s=s, t=t))
    for s, t, n, m in ((2, 3, 1, 1), (2, 3, 1, 2), (3, 4, 1, 1), (3, 4, 2, 3), (2, 5, 1, 2)):
        tasks.append(partial(verify_tail, s, t, n, m, minimal_stable_N(s, t, n, m, 20), 20))
    for s, t in ((2, 3), (3, 4)):
        for parity in (1, 0):
            N = minimal_stable_N(s, t, 1, 1, 12, links=3, parity=parity)
            tasks.append(partial(verify_triple, s, t, 1, 1, N, 12))
    for kind in ("Psi{2,1}", "Phi{2,3,1,1}"):
        for K in (0, 1, 2):
            tasks.append(partial(verify_quantum_modularity, kind, (20, 40, 80), K, prec))
    kinds = [Psi(p, a) for p in (2, 3, 4) for a in range(1, p)]
    kinds += [Phi(s, t, n, m) for s, t, n, m in _labels(((2, 3), (3, 4)))]
    for kind in kinds:
        tasks.append(partial(verify_transform, kind, 1j, None, prec))
    return tasks


def run_suite(threads: int = 1, prec: int = DEFAULT_PREC) -> list[VerifyReport]:
    """Run every suite task; the report order is the task order regardless of threads."""
    if threads < 1:
        raise ParameterError("threads must be >= 1")
    tasks = suite_tasks(prec)
    if threads == 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda task: task(), tasks))


def summary_table(reports: Sequence[VerifyReport]) -> str:
    """Per-identity pass counts as a fixed-width text table."""
    rows = []
    for ident in IDENTITIES:
        group = [r for r in reports if r.identity_id == ident]
        if group:
            passed = sum(r.passed for r in group)
            ms = sum(r.runtime_ms for r in group)
            rows.append((ident, len(group), passed, ms))
    head = f"{'identity':<20}{'checks':>8}{'passed':>8}{'ms':>10}"
    lines = [head, "-" * len(head)]
    lines += [f"{i:<20}{n:>8}{p:>8}{ms:>10}" for i, n, p, ms in rows]
    total = sum(r[1] for r in rows), sum(r[2] for r in rows), sum(r[3] for r in rows)
    lines.append("-" * len(head))
    lines.append(f"{'total':<20}{total[0]:>8}{total[1]:>8}{total[2]:>10}")
    return "\n".join(lines)
