"""Piecewise-linear membership functions and linguistic variables."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class MembershipFunction:
    """Degree curve given by ``(x, degree)`` breakpoints.

    Between breakpoints the degree is interpolated linearly. Outside the
    first/last breakpoint it is held at the boundary degree, so a shoulder
    such as ``[(16, 0), (20, 1), (30, 1)]`` saturates at 1 to the right.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(d)) for x, d in self.points)
        if len(pts) < 2:
            raise ConfigError("membership function needs at least 2 points")
        xs = [x for x, _ in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ConfigError(f"membership x coordinates must be strictly increasing: {xs}")
        for x, d in pts:
            if not np.isfinite(x) or not 0.0 <= d <= 1.0:
                raise ConfigError(f"invalid membership point ({x}, {d})")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_xs", np.array(xs))
        object.__setattr__(self, "_ds", np.array([d for _, d in pts]))

    @property
    def xs(self) -> np.ndarray:
        return self._xs

    @property
    def degrees(self) -> np.ndarray:
        return self._ds

    def __call__(self, x):
        # np.interp already holds the end values outside [xs[0], xs[-1]]
        return np.interp(x, self._xs, self._ds)

    def max_slope(self) -> float:
        return float(np.max(np.abs(np.diff(self._ds) / np.diff(self._xs))))


def membership(mf: MembershipFunction, x: float) -> float:
    """Degree of ``x`` in ``mf``; always within [0, 1]."""
    return float(mf(x))


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    universe: tuple[float, float]
    terms: Mapping[str, MembershipFunction]
    units: str = field(default="", compare=False)

    def __post_init__(self):
        lo, hi = (float(v) for v in self.universe)
        if not lo < hi:
            raise ConfigError(f"variable {self.name!r}: universe [{lo}, {hi}] is empty")
        if not self.terms:
            raise ConfigError(f"variable {self.name!r} has no terms")
        terms = {}
        for label, mf in self.terms.items():
            if not isinstance(mf, MembershipFunction):
                mf = MembershipFunction(tuple(mf))
            if mf.xs[0] < lo or mf.xs[-1] > hi:
                raise ConfigError(
                    f"variable {self.name!r}: term {label!r} has points outside [{lo}, {hi}]"
                )
            terms[label] = mf
        object.__setattr__(self, "universe", (lo, hi))
        object.__setattr__(self, "terms", terms)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.terms)

    @property
    def width(self) -> float:
        return self.universe[1] - self.universe[0]

    def clamp(self, x: float) -> float:
        lo, hi = self.universe
        return min(max(float(x), lo), hi)

    def grid(self, size: int) -> np.ndarray:
        return np.linspace(self.universe[0], self.universe[1], size)


def fuzzify(var: LinguisticVariable, x: float) -> dict[str, float]:
    """Map a crisp value to one degree per term of ``var``.

    Values outside the universe are clamped to the nearest bound first.
    """
    x = var.clamp(x)
    return {label: membership(mf, x) for label, mf in var.terms.items()}


def make_variable(name: str, universe: Sequence[float],
                  terms: Mapping[str, Sequence[Sequence[float]]], units: str = "") -> LinguisticVariable:
    return LinguisticVariable(
        name=name,
        universe=(universe[0], universe[1]),
        terms={label: MembershipFunction(tuple(tuple(p) for p in pts)) for label, pts in terms.items()},
        units=units,
    )
