"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 invalid parameters.
Defaults for precision, order and threads can be overridden through
TORUSQ_PRECISION, TORUSQ_ORDER and TORUSQ_THREADS.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import harness
from .exactq import ParameterError
from .knots import (
    PrecisionFailure,
    TorusParams,
    jones_family_three,
    jones_family_two,
    jones_torus_knot,
    jones_torus_link,
    jones_torus_link3,
    kashaev_invariant,
)
from .qseries import QSeries, QZSeries, divide_by_eta, dumps, format_poly
from .thetas import asymptotic_expansion, eichler_limit, eichler_series, parse_kind, theta_series
from .voa import VoaLabel, ab_char_st, char_singlet, char_X

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass(frozen=True)
class CliConfig:
    precision_bits: int = 128
    order: Fraction = Fraction(50)
    output: str = "text"
    threads: int = 1

    def __post_init__(self):
        if self.precision_bits < 53:
            raise ParameterError("precision must be at least 53 bits")
        if self.order <= 0:
            raise ParameterError("order must be positive")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")


def _env_default(name: str, fallback, cast):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise ParameterError(f"bad value for {name}: {raw!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    prec = _env_default("TORUSQ_PRECISION", 128, int)
    order = _env_default("TORUSQ_ORDER", "50", str)
    threads = _env_default("TORUSQ_THREADS", 1, int)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=prec, help="binary precision (default %(default)s)")
    common.add_argument("--order", type=Fraction, default=Fraction(order), help="q-series truncation order")
    common.add_argument("--output", choices=("text", "json", "csv"), default=None)
    common.add_argument("--threads", type=int, default=threads)

    def torus(p, label=False):
        p.add_argument("--s", type=int, required=True)
        p.add_argument("--t", type=int, required=True)
        if label:
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--m", type=int, required=True)

    parser = _Parser(prog="torusq", description="Torus knots, false thetas and log-VOA characters.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("jones", parents=[common], help="colored Jones polynomial")
    torus(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--components", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--n", type=int, default=None, help="Laurent family label (links only)")
    p.add_argument("--m", type=int, default=None)

    p = sub.add_parser("kashaev", parents=[common], help="Kashaev invariant at exp(2 pi i / N)")
    torus(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--components", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=1)

    for name, help_text in (("theta", "theta series"), ("eichler", "Eichler integral")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--kind", required=True, help="Psi{p,a} or Phi{s,t,n,m}")

    p = sub.add_parser("eichler-limit", parents=[common], help="Eichler integral at tau = 1/N")
    p.add_argument("--kind", required=True)
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("asymptotic", parents=[common], help="L-value expansion at tau = 1/N")
    p.add_argument("--kind", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=int, default=2)

    p = sub.add_parser("voa-char", parents=[common], help="log-VOA module characters")
    torus(p, label=True)
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--route", choices=("direct", "singlet", "ab", "ab-graded"), default="direct")
    p.add_argument("--numerator", action="store_true", help="return eta * character")

    p = sub.add_parser("verify", parents=[common], help="check one identity")
    p.add_argument(
        "identity",
        choices=("tail", "kashaev-eichler", "kashaev-knot", "gauss", "quantum-modularity", "triple", "ab", "transform"),
    )
    for flag in ("--s", "--t", "--n", "--m", "--N", "--p", "--K"):
        p.add_argument(flag, type=int, default=None)
    p.add_argument("--knot", choices=("T2_2p", "Tst"), default=None)
    p.add_argument("--mode", choices=("exact", "numeric"), default="exact")
    p.add_argument("--kind", default=None)
    p.add_argument("--N-list", default="20,40,80")
    p.add_argument("--tau", type=complex, default=1j)

    sub.add_parser("suite", parents=[common], help="run the standard verification suite")
    return parser


# ---------------------------------------------------------------------------
# output helpers


def _series_rows(series: QSeries):
    for e, c in series.items():
        yield [e.numerator, e.denominator, c.numerator, c.denominator]


def _emit_series(series: QSeries, fmt: str, out, descending_text: bool = False) -> None:
    if fmt == "json":
        order = None if series.order is None else str(series.order)
        json.dump({"order": order, "terms": list(_series_rows(series))}, out)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["exponent", "coefficient"])
        for e, c in series.items():
            w.writerow([str(e), str(c)])
    elif descending_text:
        out.write(format_poly(series) + "\n")
    else:
        out.write(dumps(series))


def _emit_qz(series: QZSeries, fmt: str, out) -> None:
    rows = sorted(series.terms.items())
    if fmt == "json":
        data = [[e.numerator, e.denominator, j, c.numerator, c.denominator] for (e, j), c in rows]
        json.dump({"order": None if series.order is None else str(series.order), "terms": data}, out)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["exponent", "z", "coefficient"])
        for (e, j), c in rows:
            w.writerow([str(e), j, str(c)])
    else:
        out.write(f"order {series.order}\n")
        for (e, j), c in rows:
            out.write(f"{c} q^({e}) z^({j})\n")


def _emit_complex(value, fmt: str, out, extra: dict | None = None) -> None:
    re_s, im_s = mpmath.nstr(value.real, 30), mpmath.nstr(value.imag, 30)
    if fmt == "json":
        json.dump({"re": re_s, "im": im_s, **(extra or {})}, out)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["re", "im", *(extra or {})])
        w.writerow([re_s, im_s, *(extra or {}).values()])
    else:
        out.write(f"{re_s} {'-' if str(im_s).startswith('-') else '+'} {str(im_s).lstrip('-')}i\n")


def _emit_reports(reports, fmt: str, out, err, table: bool) -> None:
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["identity_id", "params", "mode", "agreement_order", "abs_error", "passed", "runtime_ms"])
        for r in reports:
            d = r.to_dict()
            w.writerow(
                [
                    r.identity_id,
                    json.dumps(r.params, sort_keys=True),
                    r.mode,
                    d.get("agreement_order", ""),
                    d.get("abs_error", ""),
                    r.passed,
                    r.runtime_ms,
                ]
            )
        return
    if fmt == "text" and table:
        out.write(harness.summary_table(reports) + "\n")
        return
    if fmt == "text":
        for r in reports:
            status = "PASS" if r.passed else "FAIL"
            out.write(f"{status} {r.to_json()}\n")
        return
    payload = [r.to_dict() for r in reports]
    if table:
        json.dump(payload, out, sort_keys=True, indent=1)
        out.write("\n")
        err.write(harness.summary_table(reports) + "\n")
    else:
        out.write(reports[0].to_json() + "\n")


# ---------------------------------------------------------------------------
# commands


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ParameterError("missing " + ", ".join("--" + n for n in missing))


def _cmd_jones(args, cfg, out):
    if args.components == 1:
        if args.n is not None or args.m is not None:
            raise ParameterError("--n/--m apply to links only")
        poly = jones_torus_knot(args.s, args.t, args.N)
    elif args.n is None and args.m is None:
        poly = jones_torus_link(args.s, args.t, args.N) if args.components == 2 else jones_torus_link3(args.s, args.t, args.N)
    else:
        _need(args, "n", "m")
        if args.components == 2:
            poly = jones_family_two(args.s, args.t, args.n, args.m, args.N)
        else:
            poly = jones_family_three(args.s, args.t, args.n, args.m, args.N)
    _emit_series(poly, cfg.output, out, descending_text=True)
    return EXIT_OK


def _cmd_kashaev(args, cfg, out):
    params = TorusParams(args.s, args.t, args.N, args.n, args.m, args.components)
    value = kashaev_invariant(params, cfg.precision_bits)
    _emit_complex(value.value, cfg.output, out, {"prec": cfg.precision_bits})
    return EXIT_OK


def _cmd_series(args, cfg, out):
    kind = parse_kind(args.kind)
    fn = theta_series if args.command == "theta" else eichler_series
    _emit_series(fn(kind, cfg.order), cfg.output, out)
    return EXIT_OK


def _cmd_eichler_limit(args, cfg, out):
    value = eichler_limit(parse_kind(args.kind), args.N, cfg.precision_bits)
    _emit_complex(value.value, cfg.output, out, {"prec": cfg.precision_bits})
    return EXIT_OK


def _cmd_asymptotic(args, cfg, out):
    rep = asymptotic_expansion(parse_kind(args.kind), args.N, args.K, cfg.precision_bits)
    data = {
        "N": rep.N,
        "K": rep.K,
        "lhs": [mpmath.nstr(rep.lhs.real, 25), mpmath.nstr(rep.lhs.imag, 25)],
        "rhs": [mpmath.nstr(rep.rhs.real, 25), mpmath.nstr(rep.rhs.imag, 25)],
        "abs_error": rep.abs_error,
        "predicted_next_term": rep.predicted_next_term,
    }
    if cfg.output == "json":
        json.dump(data, out)
        out.write("\n")
    elif cfg.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["N", "K", "abs_error", "predicted_next_term"])
        w.writerow([rep.N, rep.K, rep.abs_error, rep.predicted_next_term])
    else:
        out.write(f"N={rep.N} K={rep.K} abs_error={rep.abs_error:.6e} next_term={rep.predicted_next_term:.6e}\n")
    return EXIT_OK


def _cmd_voa(args, cfg, out):
    label = VoaLabel(args.s, args.t, args.n, args.m, 1 if args.sign == "+" else -1)
    num = args.numerator
    if args.route == "direct":
        series = char_X(label, cfg.order, numerator=num)
    elif args.route == "singlet":
        if label.sign < 0:
            raise ParameterError("the singlet route is the + sign; use --route ab for -")
        series = char_singlet(label, cfg.order)
        if not num:
            series = divide_by_eta(series)
    elif args.route == "ab":
        series = ab_char_st(label, cfg.order, numerator=num)
    else:
        _emit_qz(ab_char_st(label, cfg.order, graded=True, numerator=num), cfg.output, out)
        return EXIT_OK
    _emit_series(series, cfg.output, out)
    return EXIT_OK


def _cmd_verify(args, cfg, out, err):
    which = args.identity
    prec, order = cfg.precision_bits, cfg.order
    if which in ("tail", "triple"):
        _need(args, "s", "t", "n", "m", "N")
        fn = harness.verify_tail if which == "tail" else harness.verify_triple
        report = fn(args.s, args.t, args.n, args.m, args.N, order)
    elif which == "kashaev-eichler":
        _need(args, "s", "t", "n", "m", "N")
        report = harness.verify_kashaev_eichler(args.s, args.t, args.n, args.m, args.N, prec)
    elif which == "kashaev-knot":
        _need(args, "knot", "N")
        report = harness.verify_kashaev_knot(args.knot, args.N, prec, p=args.p, s=args.s, t=args.t)
    elif which == "gauss":
        _need(args, "s", "t", "n", "m", "N")
        report = harness.verify_gauss(args.s, args.t, args.n, args.m, args.N, args.mode, prec)
    elif which == "quantum-modularity":
        _need(args, "kind")
        try:
            N_list = [int(x) for x in args.N_list.split(",")]
        except ValueError:
            raise ParameterError(f"bad --N-list {args.N_list!r}") from None
        report = harness.verify_quantum_modularity(args.kind, N_list, 1 if args.K is None else args.K, prec)
    elif which == "ab":
        _need(args, "s", "t", "m")
        report = harness.verify_ab(args.s, args.t, args.n or 1, args.m, order)
    else:
        _need(args, "kind")
        report = harness.verify_transform(args.kind, args.tau, None, prec)
    _emit_reports([report], cfg.output, out, err, table=False)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_suite(args, cfg, out, err):
    reports = harness.run_suite(cfg.threads, cfg.precision_bits)
    _emit_reports(reports, cfg.output, out, err, table=True)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def run(argv=None, out=None, err=None) -> int:
    """Parse ``argv`` and execute; returns the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        parser = _build_parser()
    except ParameterError as exc:
        err.write(f"torusq: {exc}\n")
        return EXIT_USAGE
    old_err = sys.stderr
    sys.stderr = err
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    finally:
        sys.stderr = old_err
    default_fmt = "json" if args.command in ("verify", "suite") else "text"
    try:
        cfg = CliConfig(args.prec, args.order, args.output or default_fmt, args.threads)
        if args.command == "verify":
            return _cmd_verify(args, cfg, out, err)
        if args.command == "suite":
            return _cmd_suite(args, cfg, out, err)
        handler = {
            "jones": _cmd_jones,
            "kashaev": _cmd_kashaev,
            "theta": _cmd_series,
            "eichler": _cmd_series,
            "eichler-limit": _cmd_eichler_limit,
            "asymptotic": _cmd_asymptotic,
            "voa-char": _cmd_voa,
        }[args.command]
        return handler(args, cfg, out)
    except harness.StabilizationTooLow as exc:
        err.write(f"torusq: {exc}\n")
        return EXIT_USAGE
    except (ParameterError, ValueError, ZeroDivisionError) as exc:
        err.write(f"torusq: {exc}\n")
        return EXIT_USAGE
    except PrecisionFailure as exc:
        err.write(f"torusq: {exc}\n")
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
