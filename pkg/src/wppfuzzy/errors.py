class ConfigError(ValueError):
    """Invalid variable, rule or parameter configuration."""


class NoRuleFiredError(RuntimeError):
    """No rule contributed to an output variable, so its centroid is undefined."""

    def __init__(self, outputs):
        self.outputs = tuple(outputs)
        super().__init__("no rule fired for output(s): " + ", ".join(self.outputs))


class DimensionError(ValueError):
    """Weight vector length does not match the rule count."""


class CapacityError(ValueError):
    """The term space cannot supply the requested number of distinct rules."""


class ObjectiveError(RuntimeError):
    """Objective returned a non-finite value or raised during evaluation."""

    def __init__(self, message, position=None):
        self.position = position
        super().__init__(message)
