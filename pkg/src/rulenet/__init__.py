"""rulenet: train, prune and convert small feedforward classifiers into
conjunctive if-then rules on a synthetic tabular benchmark."""

__version__ = "0.1.0"

from . import datagen, encoder, network, trainer, pruner, extractor, ruleset
from .errors import (
    ConfigError,
    EncodingError,
    ExtractionError,
    PruneError,
    RuleError,
    SplitRequired,
    TrainingError,
)

__all__ = [
    "datagen", "encoder", "network", "trainer", "pruner", "extractor",
    "ruleset", "ConfigError", "EncodingError", "ExtractionError",
    "PruneError", "RuleError", "SplitRequired", "TrainingError",
]
