"""Rule-base optimization by weighting rules and cutting off weak ones.

Every rule of a base gets a weight in [0, 1]; rules below the cutoff ``b``
are dropped and survivors keep their weight. A swarm searches the weight
cube and the best weight vector defines the final base.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np

from . import pso
from .errors import CapacityError, ConfigError, DimensionError, ObjectiveError
from .inference import DEFAULT_GRID_SIZE, FuzzyRule, RuleBase, crisp_outputs

log = logging.getLogger(__name__)

DEFAULT_CUTOFF = 0.5

# stream tag for rule generation, keeps it independent of a PSO run using the same seed
_RULE_STREAM = 1


@dataclass(frozen=True)
class CutoffPolicy:
    b: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if not 0.0 < self.b < 1.0:
            raise ConfigError(f"cutoff b must lie in (0, 1), got {self.b}")


@dataclass(frozen=True)
class ModelTarget:
    target_weights: tuple[float, ...]

    def __post_init__(self):
        tw = tuple(float(v) for v in self.target_weights)
        if any(v not in (0.0, 1.0) for v in tw):
            raise ConfigError("model target weights must be 0 or 1")
        object.__setattr__(self, "target_weights", tw)

    def __len__(self):
        return len(self.target_weights)

    @property
    def ones(self) -> int:
        return int(sum(self.target_weights))

    def as_array(self) -> np.ndarray:
        return np.array(self.target_weights)


def _weights(w, m: int) -> np.ndarray:
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 1 or arr.size != m:
        raise DimensionError(f"weight vector has {arr.size} entries, expected {m}")
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise ConfigError("weights must lie in [0, 1]")
    return arr


def apply_weights(base: RuleBase, w: Sequence[float], cut: CutoffPolicy) -> RuleBase:
    """Rules of ``base`` with ``w[i] >= b``, in order, carrying weight ``w[i]``."""
    arr = _weights(w, len(base))
    kept = [rule.with_weight(wi) for rule, wi in zip(base.rules, arr.tolist()) if wi >= cut.b]
    return base.with_rules(kept, validate=False)


def model_distance(w: Sequence[float], target: ModelTarget, cut: CutoffPolicy) -> float:
    """Sum of ``|w_i - target_i|`` with sub-cutoff weights taken as 0.

    Kept weights lie in [0, 1] and targets are 0 or 1, so each term is
    either ``w_i`` or ``1 - w_i``. The sum is split into those pieces and
    handed to ``math.fsum``, which returns the correctly rounded exact total
    for any cutoff.
    """
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 1 or arr.size != len(target):
        raise DimensionError(f"weight vector has {arr.size} entries, target has {len(target)}")
    if not (arr.min() >= 0.0 and arr.max() <= 1.0):
        raise ConfigError("weights must lie in [0, 1]")
    kept = np.where(arr >= cut.b, arr, 0.0)
    ones = target.as_array() == 1.0
    pieces = kept[~ones].tolist() + (-kept[ones]).tolist()
    pieces.append(float(np.count_nonzero(ones)))
    return math.fsum(pieces)


class Candidate:
    """A base together with a candidate weight vector, as seen by evaluators.

    ``weights`` is the raw vector; ``base`` materializes the cut-off rule base
    on first access, so weight-only evaluators never pay for it.
    """

    def __init__(self, source: RuleBase, weights: np.ndarray, cut: CutoffPolicy):
        self.source = source
        self.weights = weights
        self.cut = cut

    @cached_property
    def kept(self) -> np.ndarray:
        return np.flatnonzero(self.weights >= self.cut.b)

    @cached_property
    def base(self) -> RuleBase:
        return apply_weights(self.source, self.weights, self.cut)


Evaluator = Callable[[Candidate], float]


def distance_evaluator(target: ModelTarget, cut: CutoffPolicy) -> Evaluator:
    """Deviation from a model base described by a 0/1 target vector. Minimize it."""
    def evaluate(c: Candidate) -> float:
        return model_distance(c.weights, target, cut)
    return evaluate


def scenario_evaluator(scenarios: Sequence[tuple[Mapping[str, float], Mapping[str, float]]],
                       grid_size: int = DEFAULT_GRID_SIZE, penalty: float = 1.0) -> Evaluator:
    """Mean squared error of inference against expected outputs. Minimize it.

    Errors are normalized by each output's universe width. An output for
    which no rule fires contributes ``penalty`` instead of a squared error.
    """
    if not scenarios:
        raise ConfigError("scenario evaluator needs at least one scenario")

    def evaluate(c: Candidate) -> float:
        base = c.base
        total, count = 0.0, 0
        for inputs, expected in scenarios:
            got = crisp_outputs(base, inputs, grid_size)
            for name, want in expected.items():
                if got.get(name) is None:
                    total += penalty
                else:
                    total += ((got[name] - want) / base.output(name).width) ** 2
                count += 1
        return total / count
    return evaluate


def optimize_rulebase(base0: RuleBase, evaluator: Evaluator, direction: pso.Direction | str,
                      cut: CutoffPolicy, params: pso.PsoParams,
                      callback=None) -> tuple[RuleBase, pso.SwarmResult]:
    """Search rule weights of ``base0`` in [0, 1]^m with PSO.

    Returns the cut-off base for the best weight vector and the swarm result.

    Raises:
        ObjectiveError: the evaluator raised or returned a non-finite value;
            ``position`` holds the offending weight vector.
    """
    m = len(base0)
    if m == 0:
        raise ConfigError("cannot optimize an empty rule base")

    def objective(x: np.ndarray) -> float:
        try:
            return evaluator(Candidate(base0, x, cut))
        except ObjectiveError:
            raise
        except Exception as exc:
            raise ObjectiveError(f"evaluator failed for weights {x.tolist()}: {exc}", x) from exc

    result = pso.optimize(objective, direction, pso.Bounds.cube(m, 0.0, 1.0), params, callback)
    base1 = apply_weights(base0, result.GX, cut)
    log.info("optimized %d rules down to %d, best %r after %d iterations",
             m, len(base1), result.fGX, result.iterations_run)
    return base1, result


def term_space(base: RuleBase) -> tuple[list[tuple[str, tuple[str, ...]]], list[tuple[str, tuple[str, ...]]]]:
    ins = [(v.name, v.labels) for v in base.inputs]
    outs = [(v.name, v.labels) for v in base.outputs]
    return ins, outs


def _rule_index(rule: FuzzyRule, dims) -> int | None:
    ante, cons = dict(rule.antecedent), dict(rule.consequent)
    if len(ante) != len(rule.antecedent) or len(cons) != len(rule.consequent):
        return None
    coords = []
    clauses = {**{("in", k): v for k, v in ante.items()}, **{("out", k): v for k, v in cons.items()}}
    if len(clauses) != len(dims):
        return None
    shape = []
    for side, name, labels in dims:
        term = clauses.get((side, name))
        if term is None or term not in labels:
            return None
        coords.append(labels.index(term))
        shape.append(len(labels))
    return int(np.ravel_multi_index(coords, shape))


def generate_noisy_base(model: RuleBase, extra: int, seed: int) -> tuple[RuleBase, ModelTarget]:
    """Append ``extra`` random distinct rules (weight 1) to ``model``.

    Random rules use one term of every input and every output variable and
    never duplicate a model rule or each other; they may share an
    antecedent with a model rule. The target marks model positions with 1.

    Raises:
        CapacityError: fewer than ``extra`` unused rules exist in the term space.
    """
    if extra < 0:
        raise ConfigError("extra must be nonnegative")
    ins, outs = term_space(model)
    dims = [("in", n, labels) for n, labels in ins] + [("out", n, labels) for n, labels in outs]
    shape = [len(labels) for _, _, labels in dims]
    capacity = math.prod(shape)
    taken = {i for i in (_rule_index(r, dims) for r in model.rules) if i is not None}
    if extra > capacity - len(taken):
        raise CapacityError(
            f"term space holds {capacity} rules, {len(taken)} used by the model; cannot add {extra}"
        )

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_RULE_STREAM,)))
    if capacity <= 1 << 20:
        free = np.setdiff1d(np.arange(capacity), np.fromiter(taken, dtype=np.int64, count=len(taken)))
        picks = rng.choice(free, size=extra, replace=False).tolist()
    else:
        picks, seen = [], set(taken)
        while len(picks) < extra:
            k = int(rng.integers(capacity))
            if k not in seen:
                seen.add(k)
                picks.append(k)

    new_rules = []
    n_in = len(ins)
    for k in picks:
        coords = np.unravel_index(k, shape)
        clauses = [(name, labels[c]) for (_, name, labels), c in zip(dims, coords)]
        new_rules.append(FuzzyRule(tuple(clauses[:n_in]), tuple(clauses[n_in:])))

    base0 = model.with_rules(list(model.rules) + new_rules, validate=False)
    target = ModelTarget((1.0,) * len(model) + (0.0,) * extra)
    return base0, target
