"""Exception types raised by motifscope."""


class MotifscopeError(Exception):
    """Base class for all library errors."""


class GraphError(MotifscopeError, ValueError):
    """Invalid graph construction input."""


class ParseError(MotifscopeError, ValueError):
    """Malformed input file.

    ``location`` is a human-readable position such as ``"line 12"`` or
    ``"block Id 7"``.
    """

    def __init__(self, message: str, location: str | None = None) -> None:
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
