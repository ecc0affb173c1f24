class GradCascadeError(Exception):
    """Base class for every error raised by gradcascade"""
    pass


class RejectedInputError(GradCascadeError):
    """Raised when an operation receives input outside its domain (non-finite values, empty vectors, too few points)"""
    pass


class StructuralError(GradCascadeError):
    """Raised when two objects that must agree in shape do not (gradient vs model, field vs graph)"""
    pass


class ConfigurationError(GradCascadeError):
    """Raised when a configuration value is invalid or a topology cannot be built with the requested parameters"""
    pass


class CoverageError(GradCascadeError):
    """Raised when an analysis is asked to run over data that does not cover it (empty store, too few scales)"""
    pass


class CorruptStoreError(GradCascadeError):
    """Raised when the content of a run store cannot be read back consistently"""
    pass


class SchemaVersionError(CorruptStoreError):
    """Raised when a stored artifact carries a schema version this release does not understand"""
    pass
