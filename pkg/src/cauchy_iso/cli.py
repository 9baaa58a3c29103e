"""Command-line front end: ``eval``, ``verify``, ``classify`` and ``aux``.

Exit codes: 0 success, 1 unexpected counterexample in ``verify``, 2 bad
arguments, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import calculus, harness
from . import inequalities as ineq
from .density import NEG_INF, DomainError, Interval, MeasureParams, as_extended, mass_pair
from .oracle import central_gradient, oracle_g, oracle_mass
from .transfer import g_general, g_star_general

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """15 significant digits; ``-inf`` for the empty half-line; no negative zero."""
    if x is NEG_INF:
        return "-inf"
    x = float(x)
    if x == 0.0:
        x = 0.0
    return "%.15g" % x


def _endpoint(text: str):
    try:
        return as_extended(float(text))
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"need a finite number, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cauchy-iso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one quantity")
    ev.add_argument("--alpha", type=_finite, default=0.0)
    ev.add_argument("--n", type=int, default=1)
    ev.add_argument("--a", type=_endpoint, required=True, help="left endpoint, or -inf")
    ev.add_argument("--b", type=_finite, required=True)
    ev.add_argument("--r", type=_finite, default=None, help="evaluate at the enlarged interval (a - r, b + r)")
    ev.add_argument("--what", choices=["g", "gstar", "mass", "per", "grad", "hessian"], default="g")
    ev.add_argument("--oracle", action="store_true", help="also print a quadrature value and the discrepancy")

    ve = sub.add_parser("verify", help="seeded sweep over all registered checks")
    ve.add_argument("--seed", type=int, default=42)
    ve.add_argument("--samples", type=int, default=1000)
    ve.add_argument("--ineq", default="all", help="comma-separated check or group names, or 'all'")
    ve.add_argument("--format", choices=["csv", "json"], default="json")
    ve.add_argument("--out", default=None, help="report path (default stdout)")
    ve.add_argument("--rows", action="store_true", help="CSV: one row per sample instead of a summary")
    ve.add_argument("--no-shrink", action="store_true", help="report counterexamples without shrinking")

    cl = sub.add_parser("classify", help="extremal-interval ordering for the standard law")
    cl.add_argument("--a", type=_finite, required=True)
    cl.add_argument("--b", type=_finite, required=True)

    au = sub.add_parser("aux", help="auxiliary functions at one p")
    au.add_argument("--alpha", type=_finite, default=0.0)
    au.add_argument("--n", type=int, default=1)
    au.add_argument("--p", type=_finite, required=True)
    return parser


def _params(args) -> MeasureParams:
    try:
        return MeasureParams(args.alpha, args.n)
    except (DomainError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _interval(args) -> tuple[object, float]:
    a, b = args.a, args.b
    if args.r is not None:
        if not args.r > 0.0:
            raise UsageError(f"--r must be positive, got {args.r!r}")
        a = a if a is NEG_INF else a - args.r
        b = b + args.r
    if a is not NEG_INF and not a < b:
        raise UsageError(f"need a < b, got a={fmt(a)} b={fmt(b)}")
    return a, b


def _oracle_g_star(params: MeasureParams, mass: float) -> float:
    lo, hi = 0.0, 1.0
    while oracle_mass(params, -hi, hi) < mass:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if oracle_mass(params, -mid, mid) < mass:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _lines(value, oracle=None):
    if oracle is None:
        return [fmt(value)]
    gap = 0.0 if value is oracle else abs(float(value) - float(oracle))
    return [f"value {fmt(value)}", f"oracle {fmt(oracle)}", f"discrepancy {fmt(gap)}"]


def cmd_eval(args) -> int:
    params = _params(args)
    a, b = _interval(args)
    what = args.what
    if what in ("gstar", "grad", "hessian") and a is NEG_INF:
        raise UsageError(f"--what {what} needs a finite --a")
    out: list[str]
    if what == "g":
        value = g_general(params, a, b).value
        out = _lines(value, oracle_g(params, a, b) if args.oracle else None)
    elif what == "mass":
        value = mass_pair(params, a, b)[0]
        out = _lines(value, oracle_mass(params, a, b) if args.oracle else None)
    elif what == "gstar":
        value = g_star_general(params, a, b).value
        out = _lines(value, _oracle_g_star(params, mass_pair(params, a, b)[0]) if args.oracle else None)
    elif what == "per":
        value = ineq.perimeter_interval(params, Interval(a, b)).value
        if args.oracle:
            # the perimeter is a density sum; its independent value is the quadrature mass of a thin shell
            eps = 1e-6 * max(1.0, abs(b))
            shell = oracle_mass(params, b - eps, b + eps) / (2.0 * eps)
            if a is not NEG_INF:
                eps_a = 1e-6 * max(1.0, abs(a))
                shell += oracle_mass(params, a - eps_a, a + eps_a) / (2.0 * eps_a)
            out = _lines(value, shell)
        else:
            out = _lines(value)
    elif what == "grad":
        grad = calculus.grad_g(params, a, b)
        out = [" ".join(fmt(v) for v in grad)]
        if args.oracle:
            steps = [1e-4 * max(1.0, abs(a)), 1e-4 * max(1.0, abs(b))]
            steps = [min(h, 0.25 * (b - a)) for h in steps]
            fd = central_gradient(lambda v: float(oracle_g(params, v[0], v[1])), [a, b], steps)
            gap = max(abs(fd[0] - grad[0]), abs(fd[1] - grad[1]))
            out = ["value " + out[0], "oracle " + " ".join(fmt(v) for v in fd), f"discrepancy {fmt(gap)}"]
    else:
        report = calculus.hessian_g_general(params, a, b)
        out = [" ".join(fmt(v) for v in row) for row in report.matrix]
        out += [f"eigen_max {fmt(report.eigen_max)}", f"determinant {fmt(report.determinant)}", f"verdict {report.verdict.value}"]
        if args.oracle:
            out.append(f"fd_discrepancy {fmt(report.extras['fd_discrepancy'])}")
    print("\n".join(out))
    return EXIT_OK


def cmd_classify(args) -> int:
    if not args.a < args.b:
        raise UsageError(f"need a < b, got a={fmt(args.a)} b={fmt(args.b)}")
    rep = ineq.classify_extremal(args.a, args.b)
    print(f"case {rep.case.value}")
    print(f"mass {fmt(rep.mass)}")
    print(f"g {fmt(rep.g)}")
    print(f"g_star {fmt(rep.g_star)}")
    print(f"per_symmetric {fmt(rep.per_symmetric)}")
    print(f"per_interval {fmt(rep.per_interval)}")
    print(f"per_half_line {fmt(rep.per_half_line)}")
    print(f"ordering_holds {str(rep.ordering_holds).lower()}")
    return EXIT_OK


def cmd_aux(args) -> int:
    params = _params(args)
    if not args.p > 0.0:
        raise UsageError(f"--p must be positive, got {args.p!r}")
    record = ineq.proof_auxiliaries(params, args.p)
    print(json.dumps(record.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = tuple(x.strip() for x in args.ineq.split(",") if x.strip())
    try:
        config = harness.SweepConfig(seed=args.seed, samples=args.samples, inequalities=names, shrink=not args.no_shrink)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    reports = harness.run_sweep(config, keep_rows=args.rows)
    if args.format == "json":
        text = harness.reports_to_json(reports, config)
    elif args.rows:
        text = harness.rows_to_csv(reports)
    else:
        text = harness.reports_to_csv(reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    status = EXIT_OK
    for rep in reports:
        if rep.n_fail:
            print(f"counterexample {rep.inequality}: {json.dumps(rep.ce, sort_keys=True)}", file=sys.stderr)
            status = EXIT_COUNTEREXAMPLE
        if rep.n_error:
            print(f"errors {rep.inequality}: {rep.n_error} (first: {rep.first_error})", file=sys.stderr)
            status = EXIT_COUNTEREXAMPLE
    return status


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "classify": cmd_classify, "aux": cmd_aux}


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-inf" as an option name; bind it to the preceding flag instead
    out: list[str] = []
    for token in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and token.lower() in ("-inf", "-infinity"):
            out[-1] = f"{out[-1]}={token}"
        else:
            out.append(token)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
