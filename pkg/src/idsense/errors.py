"""Exception types shared across the library."""


class IdsenseError(Exception):
    """Base class for library-specific failures."""


class AlphabetMismatchError(IdsenseError, ValueError):
    """Operands disagree on an alphabet (name or size)."""


class NonStochasticRowError(IdsenseError, ValueError):
    """A probability vector fails nonnegativity or normalization.

    Carries the offending row label and its sum so callers can point at the
    exact table entry that was rejected.
    """

    def __init__(self, message, row=None, total=None):
        self.row = row
        self.total = total
        super().__init__(message)


class UnreachableObservationError(IdsenseError, ValueError):
    """Conditioning event has zero probability under the averaged channel."""


class ConvergenceError(IdsenseError, RuntimeError):
    """An iterative solver did not reach its tolerance; carries the last gap."""

    def __init__(self, message, gap=None):
        self.gap = gap
        super().__init__(message)


class EmptyTypicalSetError(IdsenseError, ValueError):
    """No sequence satisfies the typicality constraints (epsilon too small for n)."""


class ProtocolConstructionError(IdsenseError, RuntimeError):
    """A coding-scheme component could not be built at the requested size."""


class ChannelFileError(IdsenseError, ValueError):
    """A channel/config description file is malformed; carries a line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")
