"""Command-line interface.

    slowfast run <scenario-name|file> [--out DIR] [--seed N] [--dt X] [--horizon T]
    slowfast sweep --sigma-min A --sigma-max B --steps N [--out DIR]
    slowfast basin --samples N --seed S [--out DIR]
    slowfast list

Exit codes: 0 success, 2 validation error, 3 numerical abort. The default
output directory comes from $SLOWFAST_OUT_DIR (falling back to the
current directory).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import (
    NonFiniteState,
    RegimeError,
    ScenarioValidationError,
    ScheduleConflict,
)
from .integrator import IntegratorConfig
from .scenarios import (
    BUILTIN_SCENARIOS,
    SWEEP_CSV_HEADER,
    bifurcation_sweep,
    list_scenarios,
    load_scenario,
    run_basin,
    run_scenario,
    DEFAULT_STRATA_FRACTIONS,
    make_basin_mc,
    make_fig2_sweep,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _default_out(args) -> str:
    if args.out is not None:
        return args.out
    return os.environ.get("SLOWFAST_OUT_DIR", ".")


def _cmd_run(args) -> int:
    name = args.scenario
    if name in BUILTIN_SCENARIOS:
        spec = BUILTIN_SCENARIOS[name]()
    elif os.path.exists(name):
        spec = load_scenario(name)
    else:
        print(
            f"error: {name!r} is neither a built-in scenario nor a file "
            "(try `slowfast list`)",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    summary = run_scenario(
        spec,
        out_dir=_default_out(args),
        seed=args.seed,
        dt=args.dt,
        horizon=args.horizon,
    )
    print(f"scenario {summary.scenario}: done in {summary.wall_clock_s:.2f}s")
    if summary.terminal_state is not None:
        ts = summary.terminal_state
        print(
            f"  terminal state: t={ts['t']:.6g} x={ts['x']:.6g} "
            f"y={ts['y']:.6g} sigma={ts['sigma']:.6g}"
        )
    if summary.first_event_time is not None:
        print(f"  first event at t={summary.first_event_time:.6g}")
    if summary.sigma_zero_crossing is not None:
        print(f"  sigma zero crossing at t={summary.sigma_zero_crossing:.6g}")
    for kind, path in summary.outputs.items():
        print(f"  wrote {kind}: {os.path.join(_default_out(args), path)}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    base = make_fig2_sweep()
    grid = np.round(np.linspace(args.sigma_min, args.sigma_max, args.steps), 12)
    cfg = IntegratorConfig(
        dt=args.dt or base.cfg.dt,
        horizon=args.horizon or base.cfg.horizon,
        sample_stride=1,
    )
    table = bifurcation_sweep(base.params, grid, cfg)
    out_dir = _default_out(args)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep.csv")
    table.to_csv(path)
    print(f"wrote {path} ({len(grid)} points; header: {SWEEP_CSV_HEADER})")
    return EXIT_OK


def _cmd_basin(args) -> int:
    base = make_basin_mc()
    counts = {
        name: int(round(frac * args.samples))
        for name, frac in DEFAULT_STRATA_FRACTIONS.items()
    }
    report = run_basin(
        base.params,
        counts,
        args.seed,
        horizon=args.horizon or base.basin.horizon,
        dt=args.dt or base.basin.dt,
    )
    out_dir = _default_out(args)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "basin.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_obj(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    for stratum, entry in report.strata.items():
        print(
            f"  {stratum:9s} n={entry['n']:5d} "
            f"to_rest={entry['fraction_to_rest']:.3f} "
            f"to_cycle={entry['fraction_to_cycle']:.3f}"
        )
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_list(_args) -> int:
    for name, desc in list_scenarios():
        print(f"{name:12s} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowfast",
        description="slow-fast oscillator lab: simulate, sweep, probe, control",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a built-in or file scenario")
    run_p.add_argument("scenario", help="built-in name or scenario-file path")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--dt", type=float, default=None)
    run_p.add_argument("--horizon", type=float, default=None)
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="fixed-excitability amplitude sweep")
    sweep_p.add_argument("--sigma-min", type=float, default=-1.2)
    sweep_p.add_argument("--sigma-max", type=float, default=0.5)
    sweep_p.add_argument("--steps", type=int, default=35)
    sweep_p.add_argument("--out", default=None)
    sweep_p.add_argument("--dt", type=float, default=None)
    sweep_p.add_argument("--horizon", type=float, default=None)
    sweep_p.set_defaults(func=_cmd_sweep)

    basin_p = sub.add_parser("basin", help="Monte-Carlo basin sampling")
    basin_p.add_argument("--samples", type=int, default=2500)
    basin_p.add_argument("--seed", type=int, default=2024)
    basin_p.add_argument("--out", default=None)
    basin_p.add_argument("--dt", type=float, default=None)
    basin_p.add_argument("--horizon", type=float, default=None)
    basin_p.set_defaults(func=_cmd_basin)

    list_p = sub.add_parser("list", help="list built-in scenarios")
    list_p.set_defaults(func=_cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioValidationError, RegimeError, ScheduleConflict, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NonFiniteState as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
