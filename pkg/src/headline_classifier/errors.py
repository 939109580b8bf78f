"""Exception types shared across the pipeline stages."""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(PipelineError):
    """An input CSV does not carry the column the source schema requires."""


class StratificationError(PipelineError):
    """A label class is too small to split into train and test."""


class EmptyVocabularyError(PipelineError):
    """Every candidate term was filtered out while building the vocabulary."""


class ConfigError(PipelineError):
    """A training or run configuration value is out of range."""


class DimensionError(PipelineError):
    """Feature vector dimension does not match what a model expects."""


class ModelFormatError(PipelineError):
    """A serialized model or vocabulary file is unreadable or version-mismatched."""
