"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so new error types should subclass one
of the four families below rather than ``MdimError`` directly.
"""


class MdimError(Exception):
    """Base class for all library errors."""


class ConfigError(MdimError, ValueError):
    """Invalid parameters or configuration.

    ``key`` carries the dotted config path when the error comes from a
    parsed experiment file.
    """

    def __init__(self, message, key=None):
        self.key = key
        if key:
            message = f"{key}: {message}"
        super().__init__(message)


class RangeError(ConfigError, IndexError):
    pass


class DomainError(MdimError):
    """A group element acted outside the configured domain window."""


class InvalidTransformError(ConfigError):
    pass


class PreconditionError(ConfigError):
    pass


class ResourceError(MdimError):
    """A budget (nodes, configurations, cliques, elements) was exceeded."""


class EstimationError(MdimError):
    pass


class ConsistencyError(MdimError, AssertionError):
    """An identity that must hold exactly was violated (e.g. the count chain)."""
