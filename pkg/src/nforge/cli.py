"""Batch command-line front end.

Subcommands: construct (run a schedule, write digits and a run report),
digits (prefix only), discrepancy (curve report for a digit file), verify
(exact sweeps), bounds (print bound values), lil (seeded Monte Carlo).
Exit status is 0 when every requested assertion passes, 1 on assertion
failure, 2 on configuration errors, 3 on budget exhaustion; failures also
emit a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import budget
from .bounds import (
    DISCREPANCY_ADDENDS,
    bernstein_bound,
    discrepancy_constant,
    fukuyama_constant,
)
from .construction import (
    construct,
    digits_for,
    dump_json,
    read_digit_file,
    run_report,
    write_digit_file,
)
from .errors import ConfigError, NforgeError
from .schedule import get_schedule
from .verification import (
    SweepGrid,
    bad_set_budget_check,
    cover_inflation_check,
    default_grid,
    discrepancy_curve,
    lil_experiment,
    sweep_deviation_bound,
    sweep_simplified_bound,
)


def _add_common(parser):
    parser.add_argument("--threads", type=int, default=1, help="worker pool size")
    parser.add_argument(
        "--budget-mb", type=int, default=None, help="override the big-integer budget"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nforge",
        description="Construct digit streams with square-root-order orbit "
        "discrepancy and verify the machinery behind them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="run a schedule and write its digit file")
    p.add_argument("--schedule", required=True, help="preset name or config-file path")
    p.add_argument("--out", required=True, help="digit file path")
    p.add_argument("--report", help="JSON run-report path")
    _add_common(p)

    p = sub.add_parser("digits", help="emit only the first N digits")
    p.add_argument("--schedule", required=True)
    p.add_argument("--n", type=int, required=True, help="number of digits")
    p.add_argument("--out", help="digit file path (default: print raw bits)")
    _add_common(p)

    p = sub.add_parser("discrepancy", help="exact discrepancy curve of a digit file")
    p.add_argument("--digits", required=True, help="digit file path")
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--checkpoints", required=True, help="comma-separated N values")
    p.add_argument("--guard-bits", type=int, default=32)
    p.add_argument("--report", help="JSON report path")
    _add_common(p)

    p = sub.add_parser("verify", help="run exact verification sweeps")
    p.add_argument(
        "--suite",
        required=True,
        choices=["lemma2", "corollary", "lemma5", "hstar", "all"],
    )
    p.add_argument("--schedule", default="toy-lowc", help="schedule for the set suites")
    p.add_argument("--hmax", type=int, default=64)
    p.add_argument("--out", help="JSON report path")
    _add_common(p)

    p = sub.add_parser("bounds", help="print bound and constant values")
    p.add_argument("--what", required=True, choices=["fukuyama", "chain", "bernstein"])
    p.add_argument("--theta", type=int, help="base for fukuyama")
    p.add_argument("--base", type=int, help="base for chain")
    p.add_argument("--n", type=int, help="sample count for bernstein")
    p.add_argument("--variance", type=Fraction, help="variance for bernstein")
    p.add_argument("--eps", type=Fraction, help="deviation for bernstein")
    _add_common(p)

    p = sub.add_parser("lil", help="seeded Monte Carlo discrepancy statistic")
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="JSON report path")
    _add_common(p)

    return parser


def _cmd_construct(args) -> int:
    s = get_schedule(args.schedule)
    state = construct(s, threads=args.threads)
    write_digit_file(args.out, s, state.digits)
    if args.report:
        dump_json(run_report(state, s), args.report)
    print(f"wrote {len(state.digits)} digits to {args.out}")
    return 0


def _cmd_digits(args) -> int:
    s = get_schedule(args.schedule)
    bits = digits_for(s, args.n, threads=args.threads)
    if args.out:
        write_digit_file(args.out, s, bits)
        print(f"wrote {len(bits)} digits to {args.out}")
    else:
        print(bits)
    return 0


def _cmd_discrepancy(args) -> int:
    _, bits = read_digit_file(args.digits)
    checkpoints = [int(tok) for tok in args.checkpoints.split(",") if tok.strip()]
    if not checkpoints:
        raise ConfigError("no checkpoints given")
    report = discrepancy_curve(bits, args.base, checkpoints, guard_bits=args.guard_bits)
    if args.report:
        report.save(args.report)
    for entry in report.tuples:
        print(
            f"N={entry['params']['N']:>8}  D_N={entry['d_float']:.6g}  "
            f"sqrt(N)*D_N={entry['sqrt_n_d']:.6g}  reference={entry['reference']:.6g}"
        )
    return 0 if report.aggregate_pass else 1


def _cmd_verify(args) -> int:
    suites = ["lemma2", "corollary", "lemma5", "hstar"] if args.suite == "all" else [args.suite]
    reports = []
    for suite in suites:
        if suite == "lemma2":
            reports.append(sweep_deviation_bound(default_grid()))
        elif suite == "corollary":
            reports.append(sweep_simplified_bound(default_grid(), hmax=args.hmax))
        elif suite == "lemma5":
            s = get_schedule(args.schedule)
            reports.append(bad_set_budget_check(s, s.start_step))
        elif suite == "hstar":
            s = get_schedule(args.schedule)
            reports.append(cover_inflation_check(s, s.start_step))
    ok = all(r.aggregate_pass for r in reports)
    for r in reports:
        failed = sum(1 for t in r.tuples if not t.get("pass", True))
        print(
            f"suite {r.suite}: {'pass' if r.aggregate_pass else 'FAIL'} "
            f"({len(r.tuples)} checks, {failed} failures, {r.runtime_ms:.0f} ms)"
        )
    if args.out:
        payload = {"reports": [r.to_json_dict() for r in reports], "aggregate_pass": ok}
        dump_json(payload, args.out)
    return 0 if ok else 1


def _cmd_bounds(args) -> int:
    if args.what == "fukuyama":
        if args.theta is None:
            raise ConfigError("--theta is required for fukuyama")
        value = fukuyama_constant(args.theta)
        print(f"fukuyama_constant({args.theta}) = {mp_str(value)}")
    elif args.what == "chain":
        if args.base is None:
            raise ConfigError("--base is required for chain")
        print(
            f"discrepancy_constant({args.base}) = {discrepancy_constant(args.base)} "
            f"(addends {'+'.join(map(str, DISCREPANCY_ADDENDS))} = "
            f"{sum(DISCREPANCY_ADDENDS)}, times b)"
        )
    else:
        if args.n is None or args.variance is None or args.eps is None:
            raise ConfigError("--n, --variance and --eps are required for bernstein")
        value = bernstein_bound(args.n, args.variance, args.eps)
        print(f"bernstein_bound(n={args.n}, variance={args.variance}, eps={args.eps}) = {mp_str(value)}")
    return 0


def mp_str(value) -> str:
    return str(value)


def _cmd_lil(args) -> int:
    report = lil_experiment(args.base, args.n, args.samples, args.seed)
    entry = report.tuples[0]
    print(
        f"median statistic {entry['measure']:.4f} against constant "
        f"{entry['constant']:.4f} (asserted band {entry['bound'][0]:.4f}.."
        f"{entry['bound'][1]:.4f})"
    )
    if args.out:
        report.save(args.out)
    return 0 if report.aggregate_pass else 1


_COMMANDS = {
    "construct": _cmd_construct,
    "digits": _cmd_digits,
    "discrepancy": _cmd_discrepancy,
    "verify": _cmd_verify,
    "bounds": _cmd_bounds,
    "lil": _cmd_lil,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.budget_mb is not None:
        budget.configure(bits=args.budget_mb << 23)
    try:
        return _COMMANDS[args.command](args)
    except NforgeError as exc:
        print(json.dumps(exc.payload()), file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        payload = {"error": "ConfigError", "message": str(exc), "details": {}}
        print(json.dumps(payload), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
