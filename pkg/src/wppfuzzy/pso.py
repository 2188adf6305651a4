"""Box-constrained particle swarm optimization.

One iteration evaluates every agent, updates personal and global bests in
agent-index order, then moves the swarm::

    V = omega*V + r1*(PX - X)*alpha1 + r2*(GX - X)*alpha2
    V = clip(V, -vmax, vmax)
    X = clip(X + V, lo, hi)

``r1`` and ``r2`` are fresh uniform [0, 1) matrices with one entry per agent
and dimension. All randomness comes from ``numpy.random.default_rng(seed)``
(PCG64): first the initial positions (agents x n), then per iteration ``r1``
followed by ``r2``. Comparisons are strict, so on ties the incumbent best is
kept.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from os import PathLike
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, ObjectiveError

log = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]


class Direction(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.MINIMIZE else -1.0


class StopReason(str, Enum):
    BUDGET = "budget"
    TARGET_REACHED = "target_reached"
    STAGNATION = "stagnation"


@dataclass(frozen=True)
class Bounds:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float)).copy()
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size < 1:
            raise ConfigError("bounds need matching 1-d lo/hi with at least one dimension")
        if not np.all(lo < hi):
            raise ConfigError("bounds need lo < hi in every dimension")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, n: int, lo: float, hi: float) -> "Bounds":
        return cls(np.full(n, float(lo)), np.full(n, float(hi)))

    @property
    def n(self) -> int:
        return self.lo.size

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lo, self.hi)


@dataclass(frozen=True)
class PsoParams:
    alpha1: float = 1.5
    alpha2: float = 1.5
    omega: float = 0.729
    vmax: float = 0.1
    agents: int = 50
    max_iters: int = 1000
    seed: int = 0
    target: float | None = None
    stagnation_window: int | None = None

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ConfigError("alpha1 and alpha2 must be nonnegative")
        if not math.isfinite(self.omega):
            raise ConfigError("omega must be finite")
        if not self.vmax > 0:
            raise ConfigError("vmax must be positive")
        if int(self.agents) != self.agents or self.agents < 2:
            raise ConfigError("agents must be an integer >= 2")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ConfigError("max_iters must be an integer >= 1")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.stagnation_window is not None and self.stagnation_window < 1:
            raise ConfigError("stagnation_window must be >= 1")


class Particle(NamedTuple):
    X: np.ndarray
    V: np.ndarray
    PX: np.ndarray
    fPX: float


@dataclass
class SwarmState:
    """Swarm arrays, one row per agent.

    ``fPX`` and ``fGX`` are stored in minimization sign (objective times
    ``direction.sign``); ``inf`` marks a not yet evaluated best.
    """

    X: np.ndarray
    V: np.ndarray
    PX: np.ndarray
    fPX: np.ndarray
    GX: np.ndarray
    fGX: float = math.inf
    iteration: int = 0

    @property
    def particles(self) -> list[Particle]:
        return [Particle(self.X[i], self.V[i], self.PX[i], float(self.fPX[i]))
                for i in range(self.X.shape[0])]

    def copy(self) -> "SwarmState":
        return SwarmState(self.X.copy(), self.V.copy(), self.PX.copy(), self.fPX.copy(),
                          self.GX.copy(), self.fGX, self.iteration)


@dataclass
class SwarmResult:
    GX: np.ndarray
    fGX: float
    trace: list[tuple[int, float]] = field(default_factory=list)
    iterations_run: int = 0
    stop_reason: StopReason = StopReason.BUDGET


def init_swarm(bounds: Bounds, params: PsoParams, rng: np.random.Generator) -> SwarmState:
    """Uniform positions in ``bounds``, zero velocities, PX = X, bests unevaluated."""
    span = bounds.hi - bounds.lo
    X = bounds.lo + rng.random((params.agents, bounds.n)) * span
    X = bounds.clip(X)
    return SwarmState(
        X=X,
        V=np.zeros_like(X),
        PX=X.copy(),
        fPX=np.full(params.agents, math.inf),
        GX=X[0].copy(),
    )


def _evaluate(objective: Objective, X: np.ndarray, sign: float) -> np.ndarray:
    vals = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        x = X[i].copy()
        v = float(objective(x))
        if not math.isfinite(v):
            raise ObjectiveError(f"objective returned {v} at position {X[i].tolist()}", X[i].copy())
        vals[i] = sign * v
    return vals


def step(state: SwarmState, objective: Objective, bounds: Bounds, params: PsoParams,
         rng, direction: Direction = Direction.MINIMIZE) -> SwarmState:
    """Run one iteration and return the new state (``state`` is not modified).

    ``rng`` only needs a numpy-style ``random(shape)`` method, so tests can
    inject fixed draws.
    """
    s = state.copy()
    vals = _evaluate(objective, s.X, direction.sign)

    better = vals < s.fPX
    s.PX[better] = s.X[better]
    s.fPX[better] = vals[better]
    # argmin returns the first minimum, matching a sequential scan in agent order
    i = int(np.argmin(vals))
    if vals[i] < s.fGX:
        s.fGX = float(vals[i])
        s.GX = s.X[i].copy()

    r1 = rng.random(s.X.shape)
    r2 = rng.random(s.X.shape)
    V = params.omega * s.V + r1 * (s.PX - s.X) * params.alpha1 + r2 * (s.GX - s.X) * params.alpha2
    s.V = np.clip(V, -params.vmax, params.vmax)
    s.X = bounds.clip(s.X + s.V)
    s.iteration += 1
    return s


def optimize(objective: Objective, direction: Direction | str, bounds: Bounds,
             params: PsoParams, callback: Callable[[SwarmState], None] | None = None) -> SwarmResult:
    """Search ``bounds`` for the best value of ``objective``.

    Stops after ``params.max_iters`` iterations, as soon as the best value
    reaches ``params.target`` (``<=`` when minimizing, ``>=`` when
    maximizing), or after ``params.stagnation_window`` iterations without a
    strict improvement, whichever comes first.

    Raises:
        ObjectiveError: the objective returned a non-finite value.
    """
    direction = Direction(direction)
    sign = direction.sign
    rng = np.random.default_rng(params.seed)
    state = init_swarm(bounds, params, rng)
    target = None if params.target is None else sign * params.target

    trace = []
    reason = StopReason.BUDGET
    last_improved, best = 0, math.inf
    for it in range(1, params.max_iters + 1):
        state = step(state, objective, bounds, params, rng, direction)
        if callback is not None:
            callback(state)
        trace.append((it, sign * state.fGX))
        if state.fGX < best:
            best, last_improved = state.fGX, it
        if target is not None and state.fGX <= target:
            reason = StopReason.TARGET_REACHED
            break
        if params.stagnation_window is not None and it - last_improved >= params.stagnation_window:
            reason = StopReason.STAGNATION
            break

    log.debug("pso stopped after %d iterations (%s), best %r", it, reason.value, sign * state.fGX)
    return SwarmResult(GX=state.GX.copy(), fGX=sign * state.fGX, trace=trace,
                       iterations_run=it, stop_reason=reason)


def format_trace_csv(trace: Sequence[tuple[int, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration", "best_objective"])
    for it, value in trace:
        writer.writerow([int(it), repr(float(value))])
    return buf.getvalue()


def write_trace_csv(path: str | PathLike, trace: Sequence[tuple[int, float]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(format_trace_csv(trace))


def read_trace_csv(path: str | PathLike) -> list[tuple[int, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["iteration", "best_objective"]:
        raise ConfigError(f"{path}: not a trace file (bad header)")
    return [(int(a), float(b)) for a, b in rows[1:]]
