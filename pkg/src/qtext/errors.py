"""Exception types shared across the package.

Each class maps to one failure category; the CLI turns them into exit codes.
"""


class QTextError(Exception):
    """Base class for all package errors."""


class CapacityError(QTextError, ValueError):
    """Qubit count outside the supported range."""


class QubitIndexError(QTextError, IndexError):
    """Gate references a qubit that does not exist or repeats one."""


class ShapeError(QTextError, ValueError):
    """Dimensions of the inputs do not fit together."""


class ArgumentError(QTextError, ValueError):
    """An argument violates an operation's precondition."""


class DegenerateInputError(QTextError, ValueError):
    """Input carries no usable signal (zero vector, no known tokens, ...)."""


class DegenerateLabelError(QTextError, ValueError):
    """Training labels do not contain both classes."""


class ParseError(QTextError, ValueError):
    """Malformed input file."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class DataLayoutError(QTextError, ValueError):
    """Dataset directory does not have the expected structure."""


class ConvergenceError(QTextError, RuntimeError):
    """Iterative solver ran out of budget. ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ConfigError(QTextError, ValueError):
    """Invalid configuration or command-line usage."""
