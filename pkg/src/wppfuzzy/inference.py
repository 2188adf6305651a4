"""Weighted Mamdani inference.

A rule's firing level is its weight times the min over its antecedent
degrees. Each consequent term is truncated at that level, truncated sets
are merged by pointwise max on a uniform grid, and the crisp output is the
discrete centroid of the merged set.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, NoRuleFiredError
from .fuzzy import LinguisticVariable, fuzzify

log = logging.getLogger(__name__)

DEFAULT_GRID_SIZE = 1001


@dataclass(frozen=True)
class FuzzyRule:
    antecedent: tuple[tuple[str, str], ...]
    consequent: tuple[tuple[str, str], ...]
    weight: float = 1.0

    def __post_init__(self):
        ante = tuple((str(v), str(t)) for v, t in self.antecedent)
        cons = tuple((str(v), str(t)) for v, t in self.consequent)
        if not ante:
            raise ConfigError("rule antecedent is empty")
        if not cons:
            raise ConfigError("rule consequent is empty")
        if len({v for v, _ in cons}) != len(cons):
            raise ConfigError(f"rule mentions an output variable twice: {cons}")
        w = float(self.weight)
        if not 0.0 <= w <= 1.0:
            raise ConfigError(f"rule weight {w} outside [0, 1]")
        object.__setattr__(self, "antecedent", ante)
        object.__setattr__(self, "consequent", cons)
        object.__setattr__(self, "weight", w)

    @property
    def key(self) -> tuple:
        """Identity of the rule ignoring its weight."""
        return (self.antecedent, self.consequent)

    def with_weight(self, weight: float) -> "FuzzyRule":
        # skips re-validation of the clauses, they are unchanged
        new = object.__new__(FuzzyRule)
        object.__setattr__(new, "antecedent", self.antecedent)
        object.__setattr__(new, "consequent", self.consequent)
        object.__setattr__(new, "weight", float(weight))
        return new

    def __str__(self):
        ante = " AND ".join(f"{v} is {t}" for v, t in self.antecedent)
        cons = ", ".join(f"{v} is {t}" for v, t in self.consequent)
        return f"IF {ante} THEN {cons} (weight {self.weight:g})"


@dataclass(frozen=True)
class RuleBase:
    inputs: tuple[LinguisticVariable, ...]
    outputs: tuple[LinguisticVariable, ...]
    rules: tuple[FuzzyRule, ...] = ()
    _grid_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [v.name for v in self.inputs + self.outputs]
        if len(set(names)) != len(names):
            raise ConfigError(f"variable names must be unique: {names}")
        for i, rule in enumerate(self.rules):
            self.validate_rule(rule, i)

    def __len__(self):
        return len(self.rules)

    @property
    def variables(self) -> dict[str, LinguisticVariable]:
        return {v.name: v for v in self.inputs + self.outputs}

    def input(self, name: str) -> LinguisticVariable:
        for v in self.inputs:
            if v.name == name:
                return v
        raise KeyError(name)

    def output(self, name: str) -> LinguisticVariable:
        for v in self.outputs:
            if v.name == name:
                return v
        raise KeyError(name)

    def validate_rule(self, rule: FuzzyRule, index: int | None = None) -> None:
        where = f"rule {index}" if index is not None else "rule"
        ins = {v.name: v for v in self.inputs}
        outs = {v.name: v for v in self.outputs}
        for side, clauses, decl in (("input", rule.antecedent, ins), ("output", rule.consequent, outs)):
            for var, term in clauses:
                if var not in decl:
                    raise ConfigError(f"{where} ({rule}): unknown {side} variable {var!r}")
                if term not in decl[var].terms:
                    raise ConfigError(f"{where} ({rule}): variable {var!r} has no term {term!r}")

    def with_rules(self, rules: Sequence[FuzzyRule], validate: bool = True) -> "RuleBase":
        """Same declarations, different rules.

        With ``validate=False`` the caller guarantees every rule already
        belongs to a base with these declarations.
        """
        if validate:
            return RuleBase(self.inputs, self.outputs, tuple(rules))
        new = object.__new__(RuleBase)
        object.__setattr__(new, "inputs", self.inputs)
        object.__setattr__(new, "outputs", self.outputs)
        object.__setattr__(new, "rules", tuple(rules))
        # degree grids depend only on the declarations
        object.__setattr__(new, "_grid_cache", self._grid_cache)
        return new

    def term_grid(self, var: LinguisticVariable, term: str, size: int) -> np.ndarray:
        key = (var.name, term, size)
        cached = self._grid_cache.get(key)
        if cached is None:
            cached = var.terms[term](var.grid(size))
            cached.setflags(write=False)
            self._grid_cache[key] = cached
        return cached


def activation(rule: FuzzyRule, fuzzified: Mapping[str, Mapping[str, float]]) -> float:
    """Firing level of ``rule``: weight times the min antecedent degree."""
    level = 1.0
    for var, term in rule.antecedent:
        try:
            degree = fuzzified[var][term]
        except KeyError:
            raise ConfigError(f"rule ({rule}): no degree for {var!r} is {term!r}") from None
        level = min(level, degree)
    return rule.weight * level


def fuzzify_inputs(base: RuleBase, inputs: Mapping[str, float]) -> dict[str, dict[str, float]]:
    missing = [v.name for v in base.inputs if v.name not in inputs]
    if missing:
        raise ConfigError(f"missing crisp value for input(s): {', '.join(missing)}")
    return {v.name: fuzzify(v, inputs[v.name]) for v in base.inputs}


def fired_rules(base: RuleBase, inputs: Mapping[str, float]) -> list[tuple[int, FuzzyRule, float]]:
    """``(index, rule, level)`` for every rule with a nonzero firing level."""
    fz = fuzzify_inputs(base, inputs)
    out = []
    for i, rule in enumerate(base.rules):
        level = activation(rule, fz)
        if level > 0.0:
            out.append((i, rule, level))
    return out


def aggregate(base: RuleBase, inputs: Mapping[str, float],
              grid_size: int = DEFAULT_GRID_SIZE) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Merged output fuzzy set per output variable as ``(grid, degrees)``."""
    if grid_size < 2:
        raise ConfigError("grid_size must be at least 2")
    fired = fired_rules(base, inputs)
    result = {}
    for var in base.outputs:
        xs = var.grid(grid_size)
        agg = np.zeros(grid_size)
        for _, rule, level in fired:
            for out_name, term in rule.consequent:
                if out_name == var.name:
                    np.maximum(agg, np.minimum(base.term_grid(var, term, grid_size), level), out=agg)
        result[var.name] = (xs, agg)
    return result


def crisp_outputs(base: RuleBase, inputs: Mapping[str, float],
                  grid_size: int = DEFAULT_GRID_SIZE) -> dict[str, float | None]:
    """Like :func:`infer`, but an output with no fired rule maps to ``None``."""
    sets = aggregate(base, inputs, grid_size)
    crisp = {}
    for var in base.outputs:
        xs, mu = sets[var.name]
        total = mu.sum()
        if total <= 0.0:
            crisp[var.name] = None
            continue
        lo, hi = var.universe
        crisp[var.name] = min(max(float(np.dot(xs, mu) / total), lo), hi)
    return crisp


def infer(base: RuleBase, inputs: Mapping[str, float],
          grid_size: int = DEFAULT_GRID_SIZE) -> dict[str, float]:
    """Crisp value for every output variable of ``base``.

    Raises:
        NoRuleFiredError: when the merged set of some output is identically
            zero, listing every such output.
    """
    crisp = crisp_outputs(base, inputs, grid_size)
    silent = [name for name, value in crisp.items() if value is None]
    if silent:
        raise NoRuleFiredError(silent)
    return crisp
