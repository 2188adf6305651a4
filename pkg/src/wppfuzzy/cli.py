"""Command line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import pso
from .config import (default_config_path, dumps_rulebase, load_rulebase, load_run_config, load_scenarios, load_target,
                     save_rulebase)
from .errors import ConfigError, NoRuleFiredError, ObjectiveError
from .experiment import reproduce, sweep_csv, vmax_sweep
from .inference import DEFAULT_GRID_SIZE, fired_rules, infer
from .rulebase_opt import CutoffPolicy, distance_evaluator, optimize_rulebase, scenario_evaluator
from .wpp import PSI, U0

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("wppfuzzy")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_args(p: argparse.ArgumentParser, trials: bool = True) -> None:
    p.add_argument("--config", help="run configuration JSON")
    p.add_argument("--variables", help="variables/rules JSON (default: packaged WPP config)")
    p.add_argument("--rules", help="rules JSON, if separate from --variables")
    p.add_argument("--seed", type=int, help="base seed; trial i uses seed + i")
    if trials:
        p.add_argument("--trials", type=int)
        p.add_argument("--extra", type=int, help="random rules added to the model base")
    p.add_argument("--agents", type=int)
    p.add_argument("--iters", type=int, dest="max_iters")
    p.add_argument("--alpha1", type=float)
    p.add_argument("--alpha2", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--cutoff", type=float, help="minimum kept rule weight b")
    p.add_argument("--out-dir", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wppfuzzy", description="Weighted Mamdani WPP controller and PSO rule-base optimizer")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("infer", help="evaluate the controller for one input")
    p.add_argument("--variables", help="variables/rules JSON (default: packaged WPP config)")
    p.add_argument("--rules", help="rules JSON, if separate from --variables")
    p.add_argument("--u0", type=float, required=True, help="wind speed, m/s")
    p.add_argument("--psi", type=float, required=True, help="wind/nacelle angle, degrees")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE)

    p = sub.add_parser("reproduce", help="recover the model base from noisy bases")
    _add_run_args(p)
    p.add_argument("--vmax", type=float)

    p = sub.add_parser("vmax-sweep", help="success rate of reproduce per vmax value")
    _add_run_args(p)
    p.add_argument("--vmax", type=float, nargs="+", required=True, dest="vmax_values")

    p = sub.add_parser("optimize", help="optimize the weights of a rule base")
    _add_run_args(p, trials=False)
    p.add_argument("--vmax", type=float)
    p.add_argument("--evaluator", choices=["model-distance", "scenario-mse"], required=True)
    p.add_argument("--target", help="target JSON for model-distance")
    p.add_argument("--scenarios", help="scenario JSON for scenario-mse")
    p.add_argument("--penalty", type=float, default=1.0, help="scenario-mse cost of an unfired output")

    sub.add_parser("dump-default", help="print the packaged WPP config")
    return parser


def _run_config(args):
    cfg = load_run_config(args.config)
    if args.variables:
        cfg.variables = Path(args.variables)
    if args.rules:
        cfg.rules = Path(args.rules)
    overrides = {k: getattr(args, k) for k in ("agents", "max_iters", "alpha1", "alpha2", "omega")
                 if getattr(args, k, None) is not None}
    if getattr(args, "vmax", None) is not None:
        overrides["vmax"] = args.vmax
    if args.seed is not None:
        overrides["seed"] = args.seed
        cfg.experiment.base_seed = args.seed
    try:
        cfg.pso = replace(cfg.pso, **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.cutoff is not None:
        cfg.cutoff = args.cutoff
    if getattr(args, "trials", None) is not None:
        cfg.experiment.trials = args.trials
    if getattr(args, "extra", None) is not None:
        cfg.experiment.extra = args.extra
    return cfg


def cmd_infer(args) -> int:
    base = load_rulebase(args.variables or default_config_path(), args.rules)
    inputs = {U0: args.u0, PSI: args.psi}
    fired = fired_rules(base, inputs)
    try:
        out = infer(base, inputs, args.grid)
    except NoRuleFiredError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for name, value in out.items():
        print(f"{name} = {value:.6f}")
    print(f"fired rules ({len(fired)}):")
    for i, rule, level in fired:
        print(f"  [{i}] level={level:.6g}  {rule}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    cfg = _run_config(args)
    model = cfg.load_base()
    exp = cfg.experiment
    report = reproduce(model, cfg.pso, CutoffPolicy(cfg.cutoff), exp.trials, exp.extra,
                       exp.base_seed, args.out_dir)
    print(report.summary_csv(), end="")
    print(f"success {report.success_count}/{len(report.trials)}")
    return EXIT_OK


def cmd_vmax_sweep(args) -> int:
    cfg = _run_config(args)
    model = cfg.load_base()
    exp = cfg.experiment
    rows = vmax_sweep(model, cfg.pso, CutoffPolicy(cfg.cutoff), args.vmax_values, exp.trials,
                      exp.extra, exp.base_seed, args.out_dir)
    print(sweep_csv(rows), end="")
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _run_config(args)
    base0 = cfg.load_base()
    cut = CutoffPolicy(cfg.cutoff)
    if args.evaluator == "model-distance":
        if not args.target:
            raise ConfigError("--target is required for the model-distance evaluator")
        evaluator = distance_evaluator(load_target(args.target), cut)
    else:
        if not args.scenarios:
            raise ConfigError("--scenarios is required for the scenario-mse evaluator")
        evaluator = scenario_evaluator(load_scenarios(args.scenarios), penalty=args.penalty)
    base1, result = optimize_rulebase(base0, evaluator, pso.Direction.MINIMIZE, cut, cfg.pso)
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        save_rulebase(args.out_dir / "optimized_base.json", base1)
        pso.write_trace_csv(args.out_dir / "trace.csv", result.trace)
    else:
        print(dumps_rulebase(base1), end="")
    print(f"best objective {result.fGX!r} after {result.iterations_run} iterations "
          f"({result.stop_reason.value}); {len(base1)} of {len(base0)} rules kept", file=sys.stderr)
    return EXIT_OK


def cmd_dump_default(args) -> int:
    print(default_config_path().read_text(encoding="utf-8"), end="")
    return EXIT_OK


COMMANDS = {
    "infer": cmd_infer,
    "reproduce": cmd_reproduce,
    "vmax-sweep": cmd_vmax_sweep,
    "optimize": cmd_optimize,
    "dump-default": cmd_dump_default,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoRuleFiredError, ObjectiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
