"""Command-line front end.

Subcommands:

* ``run <scenario.json>``      integrate a scenario, emit a trajectory CSV
* ``verify <suite>``           run a named property suite, emit a report
* ``portrait <scenario.json>`` tabulate f and mu over a 2D stress-space slice

Exit codes: 0 success, 1 validation failure, 2 check failure. All CSV floats
are serialized with 17 significant digits so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys

from .constitutive import mu as hardening_factor
from .engine import integrate
from .errors import RatepointError, ScenarioError, SingularGradient
from .scenario import load_scenario
from .verification import VERIFY_SUITES

_FLOAT_FMT = "%.17g"

TRAJECTORY_HEADER = [
    "t",
    "T_xx", "T_yy", "T_zz", "T_yz", "T_xz", "T_xy",
    "k", "f", "psi", "mu", "mode",
    "D_xx", "D_yy", "D_zz", "D_yz", "D_xz", "D_xy",
    "W_x", "W_y", "W_z",
    "case",
]

PORTRAIT_HEADER = ["a", "b", "f", "mu", "sign_mu", "status"]

REPORT_HEADER = ["suite", "check", "measured", "threshold", "comparison", "passed"]


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; remap to 1 so exit code 2
    stays reserved for verification failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(x) -> str:
    return _FLOAT_FMT % float(x)


def _write_rows(out_path, header, rows):
    """Write CSV rows to `out_path`, or stdout when it is None."""
    if out_path is None:
        _dump_csv(sys.stdout, header, rows)
    else:
        with open(out_path, "w", newline="") as handle:
            _dump_csv(handle, header, rows)


def _dump_csv(handle, header, rows):
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _trajectory_rows(trajectory, stride):
    rows = []
    for segment in trajectory.segments:
        indices = list(range(0, segment.n_samples, stride))
        if indices[-1] != segment.n_samples - 1:
            indices.append(segment.n_samples - 1)
        for j, i in enumerate(indices):
            row = [_fmt(segment.times[i])]
            row += [_fmt(c) for c in segment.stresses[i]]
            row.append(_fmt(segment.hardenings[i]))
            row.append(_fmt(segment.fs[i]))
            row.append(_fmt(segment.psis[i]))
            row.append(_fmt(segment.mus[i]))
            row.append(segment.mode.value)
            row += [_fmt(c) for c in segment.stretchings[i]]
            row += [_fmt(c) for c in segment.spins[i]]
            row.append(segment.entry_case.value if j == 0 else "")
            rows.append(row)
    return rows


def _cmd_run(args) -> int:
    scenario = load_scenario(args.file)
    options = scenario.options
    if args.dt is not None:
        options = dataclasses.replace(options, dt_max=args.dt)
    trajectory = integrate(scenario.model, scenario.motion,
                           scenario.initial_state, scenario.t_end, options)
    rows = _trajectory_rows(trajectory, scenario.stride)
    _write_rows(args.out or scenario.out_path, TRAJECTORY_HEADER, rows)
    return 0


def _cmd_verify(args) -> int:
    names = list(VERIFY_SUITES) if args.suite == "all" else [args.suite]
    rows = []
    failed = 0
    total = 0
    for name in names:
        print(f"suite {name}")
        dt_max = args.dt if args.dt is not None else 1e-3
        results = VERIFY_SUITES[name](seed=args.seed, dt_max=dt_max)
        for res in results:
            total += 1
            failed += 0 if res.passed else 1
            print(f"  {res.describe()}")
            rows.append([name, res.name, _fmt(res.measured), _fmt(res.threshold),
                         res.op, "true" if res.passed else "false"])
    print(f"summary: {total} checks, {total - failed} passed, {failed} failed")
    if args.out is not None:
        _write_rows(args.out, REPORT_HEADER, rows)
    return 2 if failed else 0


def _cmd_portrait(args) -> int:
    scenario = load_scenario(args.file)
    spec = scenario.portrait
    if spec is None:
        raise ScenarioError("portrait", "section required by the portrait command")
    model = scenario.model
    rows = []
    for a in spec.a_values:
        for b in spec.b_values:
            stress = spec.basis_a * float(a) + spec.basis_b * float(b)
            f_value = model.yield_fn.value(stress)
            try:
                mu_value = hardening_factor(model, stress)
            except SingularGradient:
                rows.append([_fmt(a), _fmt(b), _fmt(f_value),
                             "nan", "nan", "SingularGradient"])
                continue
            sign = 0.0 if mu_value == 0.0 else (1.0 if mu_value > 0.0 else -1.0)
            rows.append([_fmt(a), _fmt(b), _fmt(f_value), _fmt(mu_value),
                         _fmt(sign), "ok"])
    _write_rows(args.out or scenario.out_path, PORTRAIT_HEADER, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ratepoint",
                     description="Strain-driven material-point simulator for "
                                 "a rate-type elastoplastic model.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate a scenario and emit a "
                                     "trajectory CSV")
    run.add_argument("file", help="scenario JSON file")
    _common_flags(run)
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser("verify", help="run a property suite")
    verify.add_argument("suite", choices=sorted(VERIFY_SUITES) + ["all"])
    _common_flags(verify)
    verify.set_defaults(func=_cmd_verify)

    portrait = sub.add_parser("portrait", help="tabulate f and mu over the "
                                               "scenario's stress-space slice")
    portrait.add_argument("file", help="scenario JSON file with a portrait "
                                       "section")
    _common_flags(portrait)
    portrait.set_defaults(func=_cmd_portrait)
    return parser


def _common_flags(sub):
    sub.add_argument("--out", default=None, metavar="PATH",
                     help="output CSV path (default: scenario output.path for "
                          "run/portrait, report-only for verify)")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for randomized property suites (default 0)")
    sub.add_argument("--dt", type=float, default=None, metavar="DT",
                     help="override the maximum integration step")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RatepointError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
