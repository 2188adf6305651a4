"""Recovering the model base from a noisy one: multi-trial runs and vmax sweeps."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

from . import pso
from .config import save_rulebase, save_target
from .errors import ConfigError
from .inference import RuleBase
from .rulebase_opt import (CutoffPolicy, distance_evaluator, generate_noisy_base,
                           optimize_rulebase)

log = logging.getLogger(__name__)

TIMING_FIELDS = ("wall_time_ms",)


@dataclass
class TrialResult:
    trial: int
    seed: int
    final_distance: float
    iterations_to_zero: int | None
    wall_time_ms: float
    final_rule_count: int
    # rules in the final base but not the model, plus model rules missing from it
    rule_difference: int
    iterations_run: int
    stop_reason: str


@dataclass
class ExperimentReport:
    trials: list[TrialResult] = field(default_factory=list)
    params_echo: dict = field(default_factory=dict)

    @property
    def success_count(self) -> int:
        return sum(1 for t in self.trials if t.final_distance == 0.0)

    @property
    def success_rate(self) -> float:
        return self.success_count / len(self.trials) if self.trials else 0.0

    def to_dict(self, timing: bool = True) -> dict:
        rows = []
        for t in self.trials:
            d = asdict(t)
            if not timing:
                for k in TIMING_FIELDS:
                    d.pop(k)
            rows.append(d)
        return {"params": self.params_echo, "success_count": self.success_count, "trials": rows}

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed", "final_distance", "iterations_to_zero",
                    "final_rule_count", "rule_difference", "iterations_run", "stop_reason"])
        for t in self.trials:
            w.writerow([t.trial, t.seed, repr(t.final_distance),
                        "" if t.iterations_to_zero is None else t.iterations_to_zero,
                        t.final_rule_count, t.rule_difference, t.iterations_run, t.stop_reason])
        return buf.getvalue()


def iterations_to_zero(trace: Sequence[tuple[int, float]]) -> int | None:
    for it, value in trace:
        if value == 0.0:
            return it
    return None


def run_trial(model: RuleBase, extra: int, seed: int, params: pso.PsoParams, cut: CutoffPolicy,
              trial: int = 0, out_dir: Path | None = None,
              stop_at_zero: bool = True) -> tuple[TrialResult, pso.SwarmResult]:
    """One noisy-base recovery run; base generation and PSO both use ``seed``."""
    base0, target = generate_noisy_base(model, extra, seed)
    params = replace(params, seed=seed, target=0.0 if stop_at_zero else params.target)
    t0 = time.perf_counter()
    base1, result = optimize_rulebase(base0, distance_evaluator(target, cut), pso.Direction.MINIMIZE,
                                      cut, params)
    wall = (time.perf_counter() - t0) * 1000.0

    kept = {i for i, w in enumerate(result.GX.tolist()) if w >= cut.b}
    wanted = {i for i, t in enumerate(target.target_weights) if t == 1.0}
    rt = TrialResult(
        trial=trial,
        seed=seed,
        final_distance=float(result.fGX),
        iterations_to_zero=iterations_to_zero(result.trace),
        wall_time_ms=round(wall, 3),
        final_rule_count=len(base1),
        rule_difference=len(kept ^ wanted),
        iterations_run=result.iterations_run,
        stop_reason=result.stop_reason.value,
    )
    if out_dir is not None:
        pso.write_trace_csv(out_dir / f"trace_trial{trial:02d}.csv", result.trace)
        save_rulebase(out_dir / f"final_base_trial{trial:02d}.json", base1)
        save_target(out_dir / f"target_trial{trial:02d}.json", target)
    log.info("trial %d seed %d: distance %r, %d rules, zero at %s",
             trial, seed, rt.final_distance, rt.final_rule_count, rt.iterations_to_zero)
    return rt, result


def reproduce(model: RuleBase, params: pso.PsoParams, cut: CutoffPolicy, trials: int = 10,
              extra: int = 184, base_seed: int = 0, out_dir: str | Path | None = None,
              stop_at_zero: bool = True) -> ExperimentReport:
    """Run ``trials`` recoveries with seeds ``base_seed + i``.

    With ``out_dir`` set, writes one trace CSV, final base and target per
    trial plus ``report.json`` and ``trials.csv``.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
    echo = {
        "pso": {k: v for k, v in asdict(params).items() if k not in ("seed", "target")},
        "cutoff": cut.b,
        "model_rules": len(model),
        "extra": extra,
        "trials": trials,
        "base_seed": base_seed,
        "stop_at_zero": stop_at_zero,
    }
    report = ExperimentReport(params_echo=echo)
    for i in range(trials):
        rt, _ = run_trial(model, extra, base_seed + i, params, cut, trial=i, out_dir=out_dir,
                          stop_at_zero=stop_at_zero)
        report.trials.append(rt)
    if out_dir is not None:
        (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
        (out_dir / "trials.csv").write_text(report.summary_csv(), encoding="utf-8")
    return report


@dataclass
class SweepRow:
    vmax: float
    trials: int
    success_count: int

    @property
    def success_rate(self) -> float:
        return self.success_count / self.trials


def vmax_sweep(model: RuleBase, params: pso.PsoParams, cut: CutoffPolicy, vmax_values: Sequence[float],
               trials: int = 10, extra: int = 184, base_seed: int = 0,
               out_dir: str | Path | None = None) -> list[SweepRow]:
    """Repeat :func:`reproduce` per vmax value on the same seeds."""
    if not vmax_values:
        raise ConfigError("vmax sweep needs at least one vmax value")
    rows = []
    for vmax in vmax_values:
        sub = None if out_dir is None else Path(out_dir) / f"vmax_{vmax:g}"
        rep = reproduce(model, replace(params, vmax=float(vmax)), cut, trials, extra, base_seed, sub)
        rows.append(SweepRow(float(vmax), trials, rep.success_count))
    if out_dir is not None:
        Path(out_dir, "vmax_sweep.csv").write_text(sweep_csv(rows), encoding="utf-8")
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vmax", "trials", "success_count", "success_rate"])
    for r in rows:
        w.writerow([repr(r.vmax), r.trials, r.success_count, repr(r.success_rate)])
    return buf.getvalue()
