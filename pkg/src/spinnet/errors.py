"""Exception hierarchy shared by all spinnet modules."""


class SpinnetError(Exception):
    """Base class for all errors raised by spinnet."""


class InputError(SpinnetError, ValueError):
    """Malformed or inconsistent arguments (parity violations, wrong sizes, ...)."""


class MoveError(SpinnetError, ValueError):
    """A tree move was requested at a node where it is not applicable."""


class GateError(SpinnetError, ValueError):
    """A gate cannot act on the given state."""


class ParseError(SpinnetError, ValueError):
    """Text input could not be parsed.

    ``position`` is a 0-based character offset for bracket strings,
    ``line`` a 1-based line number for line-oriented files.
    """

    def __init__(self, message, *, position=None, line=None, source=None):
        self.position = position
        self.line = line
        self.source = source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ResourceError(SpinnetError, RuntimeError):
    """A configured size or enumeration budget would be exceeded."""

    def __init__(self, message, *, required=None, allowed=None):
        self.required = required
        self.allowed = allowed
        super().__init__(message)


class NonEuclideanError(SpinnetError, ValueError):
    """Edge lengths do not span a Euclidean tetrahedron (squared volume <= 0)."""

    def __init__(self, volume_squared):
        self.volume_squared = volume_squared
        super().__init__(f"non-Euclidean tetrahedron: V^2 = {float(volume_squared):.6g}")


class TruncationError(SpinnetError, ValueError):
    """A spin cutoff would truncate a sum that must run over its full range."""


class ProgramError(SpinnetError, ValueError):
    """A program step cannot be applied; ``step`` is its 0-based index."""

    def __init__(self, message, *, step=None, descriptor=None):
        self.step = step
        self.descriptor = descriptor
        super().__init__(message)
