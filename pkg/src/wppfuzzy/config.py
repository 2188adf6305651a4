"""JSON configuration for variables, rule bases, targets and experiment runs.

Rule base files look like::

    {
      "variables": [{"name": "psi", "universe": [0, 90],
                     "terms": {"Z": [[0, 1], [20, 0]], ...}}, ...],
      "inputs": ["u0", "psi"],
      "outputs": ["alpha", "dL", "dpsi"],
      "rules": [{"if": {"u0": "N", "psi": "Z"},
                 "then": {"alpha": "Z", "dL": "L", "dpsi": "Z"},
                 "weight": 1.0}, ...]
    }

Rule order is significant: it fixes the position of every rule in a
weight vector. A top-level ``"comment"`` string is allowed and ignored.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .fuzzy import LinguisticVariable, MembershipFunction
from .inference import FuzzyRule, RuleBase
from .pso import PsoParams
from .rulebase_opt import DEFAULT_CUTOFF, ModelTarget

DEFAULT_CONFIG_NAME = "wpp_default.json"


def default_config_path() -> Path:
    return Path(str(resources.files("wppfuzzy") / "data" / DEFAULT_CONFIG_NAME))


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _variable_from_dict(d: Any, where: str) -> LinguisticVariable:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    try:
        name = d["name"]
        lo, hi = d["universe"]
        terms = {label: MembershipFunction(tuple((float(x), float(y)) for x, y in pts))
                 for label, pts in d["terms"].items()}
    except KeyError as exc:
        raise ConfigError(f"{where}: missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return LinguisticVariable(name=str(name), universe=(float(lo), float(hi)), terms=terms)


def _rule_from_dict(d: Any, where: str) -> FuzzyRule:
    if not isinstance(d, dict) or not isinstance(d.get("if"), dict) or not isinstance(d.get("then"), dict):
        raise ConfigError(f"{where}: a rule needs 'if' and 'then' objects")
    try:
        return FuzzyRule(antecedent=tuple(d["if"].items()), consequent=tuple(d["then"].items()),
                         weight=float(d.get("weight", 1.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def rulebase_from_dict(data: Any, source: str = "<config>", rules_data: Any = None) -> RuleBase:
    """Build a base from parsed JSON; ``rules_data`` may supply the rules separately."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    variables = {}
    for i, vd in enumerate(data.get("variables", [])):
        var = _variable_from_dict(vd, f"{source}: variables[{i}]")
        if var.name in variables:
            raise ConfigError(f"{source}: variables[{i}]: duplicate variable {var.name!r}")
        variables[var.name] = var
    rules_src = data if rules_data is None else rules_data
    try:
        inputs = [variables[n] for n in rules_src.get("inputs", data.get("inputs", []))]
        outputs = [variables[n] for n in rules_src.get("outputs", data.get("outputs", []))]
    except KeyError as exc:
        raise ConfigError(f"{source}: inputs/outputs name undeclared variable {exc.args[0]!r}") from None
    if not inputs or not outputs:
        raise ConfigError(f"{source}: at least one input and one output are required")
    rules = [_rule_from_dict(rd, f"{source}: rules[{i}]") for i, rd in enumerate(rules_src.get("rules", []))]
    try:
        return RuleBase(tuple(inputs), tuple(outputs), tuple(rules))
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_rulebase(path: str | Path, rules_path: str | Path | None = None) -> RuleBase:
    """Load declarations from ``path`` and rules from ``rules_path`` (default: same file)."""
    data = read_json(path)
    rules_data = None
    source = str(path)
    if rules_path is not None and Path(rules_path) != Path(path):
        rules_data = read_json(rules_path)
        source = f"{path} + {rules_path}"
    return rulebase_from_dict(data, source, rules_data)


def _num(x: float):
    # integral values stay ints so hand-written configs round-trip byte-for-byte
    return int(x) if float(x).is_integer() else float(x)


def rulebase_to_dict(base: RuleBase, comment: str | None = None) -> dict:
    out: dict[str, Any] = {}
    if comment:
        out["comment"] = comment
    out["variables"] = [
        {"name": v.name, "universe": [_num(v.universe[0]), _num(v.universe[1])],
         "terms": {label: [[_num(x), _num(d)] for x, d in mf.points] for label, mf in v.terms.items()}}
        for v in base.inputs + base.outputs
    ]
    out["inputs"] = [v.name for v in base.inputs]
    out["outputs"] = [v.name for v in base.outputs]
    out["rules"] = [{"if": dict(r.antecedent), "then": dict(r.consequent), "weight": _num(r.weight)}
                    for r in base.rules]
    return out


def dumps_rulebase(base: RuleBase, comment: str | None = None) -> str:
    """Serialize with one line per variable and per rule."""
    d = rulebase_to_dict(base, comment)
    parts = []
    for key, value in d.items():
        if key in ("variables", "rules"):
            body = ",\n".join("    " + json.dumps(item) for item in value)
            parts.append(f'  "{key}": [\n{body}\n  ]' if value else f'  "{key}": []')
        else:
            parts.append(f"  {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def save_rulebase(path: str | Path, base: RuleBase, comment: str | None = None) -> None:
    Path(path).write_text(dumps_rulebase(base, comment), encoding="utf-8")


def save_target(path: str | Path, target: ModelTarget) -> None:
    Path(path).write_text(json.dumps({"target": [_num(v) for v in target.target_weights]}) + "\n",
                          encoding="utf-8")


def load_target(path: str | Path) -> ModelTarget:
    data = read_json(path)
    if isinstance(data, dict):
        data = data.get("target")
    if not isinstance(data, list):
        raise ConfigError(f"{path}: expected a list of 0/1 values under 'target'")
    try:
        return ModelTarget(tuple(data))
    except (ConfigError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_scenarios(path: str | Path) -> list[tuple[dict, dict]]:
    """Scenario file: ``[{"inputs": {...}, "expected": {...}}, ...]``."""
    data = read_json(path)
    if not isinstance(data, list):
        raise ConfigError(f"{path}: expected a list of scenarios")
    out = []
    for i, sc in enumerate(data):
        try:
            out.append(({k: float(v) for k, v in sc["inputs"].items()},
                        {k: float(v) for k, v in sc["expected"].items()}))
        except (KeyError, TypeError, ValueError, AttributeError):
            raise ConfigError(f"{path}: scenarios[{i}] needs numeric 'inputs' and 'expected'") from None
    return out


@dataclass
class ExperimentSettings:
    trials: int = 10
    extra: int = 184
    base_seed: int = 0


@dataclass
class RunConfig:
    variables: Path = field(default_factory=default_config_path)
    rules: Path | None = None
    pso: PsoParams = field(default_factory=PsoParams)
    cutoff: float = DEFAULT_CUTOFF
    experiment: ExperimentSettings = field(default_factory=ExperimentSettings)

    def load_base(self) -> RuleBase:
        return load_rulebase(self.variables, self.rules)

    def to_dict(self) -> dict:
        return {
            "variables": str(self.variables),
            "rules": None if self.rules is None else str(self.rules),
            "pso": asdict(self.pso),
            "cutoff": self.cutoff,
            "experiment": asdict(self.experiment),
        }


_PSO_KEYS = {f for f in PsoParams.__dataclass_fields__}
_EXP_KEYS = {f for f in ExperimentSettings.__dataclass_fields__}


def load_run_config(path: str | Path | None) -> RunConfig:
    """Parse a run configuration; relative file paths resolve against its directory."""
    if path is None:
        return RunConfig()
    path = Path(path)
    data = read_json(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    unknown = set(data) - {"variables", "rules", "pso", "cutoff", "experiment", "comment"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")

    def resolve(key):
        if data.get(key) is None:
            return None
        p = Path(data[key])
        p = p if p.is_absolute() else path.parent / p
        if not p.is_file():
            raise ConfigError(f"{path}: {key} file {p} does not exist")
        return p

    pso_d = data.get("pso", {})
    exp_d = data.get("experiment", {})
    for name, d, keys in (("pso", pso_d, _PSO_KEYS), ("experiment", exp_d, _EXP_KEYS)):
        if not isinstance(d, dict) or set(d) - keys:
            raise ConfigError(f"{path}: bad '{name}' section (allowed keys: {sorted(keys)})")
    try:
        cfg = RunConfig(
            variables=resolve("variables") or default_config_path(),
            rules=resolve("rules"),
            pso=PsoParams(**pso_d),
            cutoff=float(data.get("cutoff", DEFAULT_CUTOFF)),
            experiment=ExperimentSettings(**exp_d),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return cfg
