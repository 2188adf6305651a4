"""Wind power plant controller: variables, the expert model rule base, power formula.

Inputs are wind speed ``u0`` (m/s) and the wind/nacelle misalignment
``psi`` (degrees, magnitude only). Outputs are the blade angle of attack
``alpha`` (degrees), the normalized blade length command ``dL`` and the
signed nacelle turn ``dpsi`` (degrees). ``psi`` carries no sign, so the
sign of ``dpsi`` is relative to the side the wind comes from; restoring
the absolute direction is left to the actuator layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .fuzzy import LinguisticVariable, make_variable
from .inference import DEFAULT_GRID_SIZE, FuzzyRule, RuleBase, infer

U0, PSI, ALPHA, DL, DPSI = "u0", "psi", "alpha", "dL", "dpsi"

_THIRD = 1.0 / 3.0

DEFAULT_TERMS = {
    U0: ((0.0, 30.0), "m/s", {
        "N": [(0, 1), (8, 1), (12, 0)],
        "H": [(8, 0), (12, 1), (16, 0)],
        "VH": [(12, 0), (16, 1), (20, 0)],
        "Cr": [(16, 0), (20, 1), (30, 1)],
    }),
    PSI: ((0.0, 90.0), "deg", {
        "Z": [(0, 1), (20, 0)],
        "S": [(0, 0), (20, 1), (40, 0)],
        "M": [(20, 0), (40, 1), (60, 0)],
        "L": [(40, 0), (60, 1)],
    }),
    ALPHA: ((0.0, 90.0), "deg", {
        "Z": [(0, 1), (30, 0)],
        "S": [(0, 0), (30, 1), (60, 0)],
        "M": [(30, 0), (60, 1), (90, 0)],
        "L": [(60, 0), (90, 1)],
    }),
    DL: ((0.0, 1.0), "normalized", {
        "Z": [(0, 1), (_THIRD, 0)],
        "S": [(0, 0), (_THIRD, 1), (2 * _THIRD, 0)],
        "M": [(_THIRD, 0), (2 * _THIRD, 1), (1, 0)],
        "L": [(2 * _THIRD, 0), (1, 1)],
    }),
    DPSI: ((-45.0, 45.0), "deg", {
        "NL": [(-45, 1), (-22.5, 0)],
        "NS": [(-45, 0), (-22.5, 1), (0, 0)],
        "Z": [(-22.5, 0), (0, 1), (22.5, 0)],
        "PS": [(0, 0), (22.5, 1), (45, 0)],
        "PL": [(22.5, 0), (45, 1)],
    }),
}

# (u0, psi) -> (alpha, dL, dpsi); u0 outer, psi inner, as the rules are numbered
MODEL_TABLE = {
    ("N", "Z"): ("Z", "L", "Z"),
    ("N", "S"): ("Z", "L", "Z"),
    ("N", "M"): ("Z", "L", "NS"),
    ("N", "L"): ("L", "L", "NL"),
    ("H", "Z"): ("M", "Z", "Z"),
    ("H", "S"): ("S", "Z", "Z"),
    ("H", "M"): ("S", "Z", "Z"),
    ("H", "L"): ("Z", "Z", "Z"),
    ("VH", "Z"): ("L", "Z", "Z"),
    ("VH", "S"): ("M", "Z", "Z"),
    ("VH", "M"): ("M", "Z", "Z"),
    ("VH", "L"): ("S", "Z", "Z"),
    ("Cr", "Z"): ("L", "Z", "PL"),
    ("Cr", "S"): ("L", "Z", "PL"),
    ("Cr", "M"): ("L", "Z", "PS"),
    ("Cr", "L"): ("L", "Z", "Z"),
}


def default_variables() -> dict[str, LinguisticVariable]:
    return {name: make_variable(name, universe, terms, units)
            for name, (universe, units, terms) in DEFAULT_TERMS.items()}


def empty_base() -> RuleBase:
    """Default declarations with no rules."""
    v = default_variables()
    return RuleBase(inputs=(v[U0], v[PSI]), outputs=(v[ALPHA], v[DL], v[DPSI]))


def model_rulebase() -> RuleBase:
    """The 16-rule expert base over the default variables, all weights 1."""
    rules = [
        FuzzyRule(antecedent=((U0, u), (PSI, p)),
                  consequent=((ALPHA, a), (DL, dl), (DPSI, dp)))
        for (u, p), (a, dl, dp) in MODEL_TABLE.items()
    ]
    return empty_base().with_rules(rules)


@dataclass(frozen=True)
class PowerParams:
    Cp: float
    A: float
    rho: float
    u: float

    def __post_init__(self):
        if not 0.0 <= self.Cp <= 1.0:
            raise ConfigError(f"Cp must be in [0, 1], got {self.Cp}")
        if not self.A > 0:
            raise ConfigError(f"swept area must be positive, got {self.A}")
        if not self.rho > 0:
            raise ConfigError(f"air density must be positive, got {self.rho}")
        if not self.u >= 0:
            raise ConfigError(f"wind speed must be nonnegative, got {self.u}")


def wind_power(p: PowerParams) -> float:
    """Power in watts, ``0.5 * Cp * A * rho * u**3``."""
    return 0.5 * p.Cp * p.A * p.rho * p.u ** 3


@dataclass(frozen=True)
class ControllerInput:
    u0: float
    psi: float

    def __post_init__(self):
        if not (math.isfinite(self.u0) and math.isfinite(self.psi)):
            raise ConfigError(f"controller inputs must be finite, got u0={self.u0}, psi={self.psi}")


@dataclass(frozen=True)
class ControllerOutput:
    alpha: float
    dL: float
    dpsi: float


def control(base: RuleBase, inp: ControllerInput,
            grid_size: int = DEFAULT_GRID_SIZE) -> ControllerOutput:
    """Run one controller evaluation. Inputs are clamped to their universes.

    Raises:
        NoRuleFiredError: propagated from inference.
    """
    try:
        u_var, psi_var = base.input(U0), base.input(PSI)
        for name in (ALPHA, DL, DPSI):
            base.output(name)
    except KeyError as exc:
        raise ConfigError(f"rule base does not declare WPP variable {exc.args[0]!r}") from None
    crisp = infer(base, {U0: u_var.clamp(inp.u0), PSI: psi_var.clamp(inp.psi)}, grid_size)
    return ControllerOutput(alpha=crisp[ALPHA], dL=crisp[DL], dpsi=crisp[DPSI])
