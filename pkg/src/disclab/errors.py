"""Exception hierarchy; the CLI maps these onto exit codes."""


class DiscLabError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class GuardError(DiscLabError, ValueError):
    """A precondition, size guard or budget was violated by the caller."""

    exit_code = 2


class InvariantError(DiscLabError, RuntimeError):
    """An internal consistency check failed (signals a bug, not bad input)."""

    exit_code = 3


class ConvergenceError(InvariantError):
    def __init__(self, message, sweeps=None, off_norm=None):
        super().__init__(message)
        self.sweeps = sweeps
        self.off_norm = off_norm


class SoundnessError(InvariantError):
    """A computed lower bound exceeded a proven upper bound."""


class EdgeListError(GuardError):
    """Parse failure in an edge-list document; ``line`` is 1-based."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedLineError(EdgeListError):
    pass


class VertexRangeError(EdgeListError):
    pass


class SelfLoopError(EdgeListError):
    pass


class DuplicateEdgeError(EdgeListError):
    pass
