"""Weighted Mamdani control of a wind power plant and PSO rule-base optimization."""
from .errors import CapacityError, ConfigError, DimensionError, NoRuleFiredError, ObjectiveError
from .fuzzy import LinguisticVariable, MembershipFunction, fuzzify, membership
from .inference import FuzzyRule, RuleBase, activation, infer
from .pso import Bounds, Direction, PsoParams, StopReason, SwarmResult, optimize, step
from .rulebase_opt import (CutoffPolicy, ModelTarget, apply_weights, generate_noisy_base,
                           model_distance, optimize_rulebase)
from .wpp import ControllerInput, ControllerOutput, PowerParams, control, model_rulebase, wind_power

__version__ = "0.1.0"
