class HyperentError(Exception):
    """Base class for all simulator errors"""


class StateError(HyperentError, ValueError):
    """A state-algebra precondition failed"""


class StateSpaceOverflow(StateError):
    """The requested layout exceeds the configured state dimension"""

    def __init__(self, dimension: int, limit: int):
        self.dimension = dimension
        self.limit = limit
        super().__init__(
            f"State space of dimension {dimension} exceeds the limit of {limit} "
            f"(about {dimension.bit_length() - 1} two-level subsystems)"
        )


class ParameterError(HyperentError, ValueError):
    """Protocol parameters violate a documented constraint"""


class UnknownProtocolError(HyperentError, KeyError):
    """No protocol is registered under the requested name"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown protocol"


class OutputError(HyperentError, OSError):
    """Writing a result artifact failed"""
