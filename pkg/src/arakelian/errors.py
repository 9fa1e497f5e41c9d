"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class ArakelianError(Exception):
    exit_code = 1


class SchemaError(ArakelianError, ValueError):
    exit_code = 2


class ConfigurationError(ArakelianError, ValueError):
    exit_code = 2


class DomainError(ArakelianError, ValueError):
    exit_code = 2


class PreconditionError(DomainError):
    pass


class ResolutionError(ArakelianError):
    exit_code = 3


class ResourceError(ResolutionError):
    """Requested grid exceeds the configured cell-count limits."""


class ConstructionError(ArakelianError):
    exit_code = 4


class PolicyError(ConstructionError):
    pass


class ZeroOnContourError(ConstructionError):
    pass


class ScaledRepresentationError(ConstructionError, OverflowError):
    pass


class GluingError(ConstructionError):
    pass


class NonconvergenceError(ArakelianError):
    exit_code = 5
