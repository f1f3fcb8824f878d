"""Exception types shared across the package."""


class CapnoiseError(Exception):
    """Base class for errors raised by this package."""


class ParseError(CapnoiseError):
    """Malformed scenario or netlist input.

    Carries the 1-based source line (and column, when known) so users can
    locate the offending text.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        prefix = ""
        if line is not None:
            prefix = f"line {line}"
            if column is not None:
                prefix += f", column {column}"
            prefix += ": "
        super().__init__(prefix + message)


class DesignError(CapnoiseError):
    """Requested servo design is infeasible."""


class TopologyError(CapnoiseError):
    """Network cannot be solved (floating node, singular matrix)."""
