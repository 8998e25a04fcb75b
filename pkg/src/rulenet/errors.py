"""Exception types shared across the pipeline stages."""


class ConfigError(ValueError):
    """A configuration value is missing, malformed or out of range."""


class EncodingError(ValueError):
    """An attribute value cannot be encoded under the active scheme."""


class TrainingError(RuntimeError):
    """The optimizer hit a non-recoverable state (non-finite objective)."""


class PruneError(RuntimeError):
    """Pruning preconditions not met."""


class ExtractionError(RuntimeError):
    """Rule extraction cannot proceed (discretization or size limits)."""


class SplitRequired(ExtractionError):
    """A hidden node has too many live inputs for direct tabling."""

    def __init__(self, node: int, fan_in: int, cap: int):
        super().__init__(
            f"hidden node {node} has fan-in {fan_in} > cap {cap}; split required"
        )
        self.node = node
        self.fan_in = fan_in
        self.cap = cap


class RuleError(ValueError):
    """A rule is malformed or internally contradictory."""
