"""Exception types shared across the package."""


class OdshuttleError(Exception):
    """Base class for package-specific errors."""


class ParseError(OdshuttleError):
    """A structured text file could not be parsed."""

    def __init__(self, path, line_no, message):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class UnknownStopError(OdshuttleError, KeyError):
    """A stop id does not resolve in the travel network."""


class UnreachableStopError(OdshuttleError):
    """No path exists between two stops in graph mode."""


class CapacityExceededError(OdshuttleError):
    """Extending a travel search node would overload the shuttle."""


class InstanceTooLargeError(OdshuttleError):
    """Enumeration or brute-force guard limit exceeded."""
