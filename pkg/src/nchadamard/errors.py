"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class NCHadamardError(Exception):
    """Base class for every error raised by this package."""


class ShapeMismatchError(NCHadamardError, ValueError):
    def __init__(self, left, right, what: str = "operands"):
        self.left = tuple(left)
        self.right = tuple(right)
        super().__init__(f"shape mismatch between {what}: {list(self.left)} vs {list(self.right)}")


class PreconditionError(NCHadamardError, ValueError):
    """An input violates a documented precondition of an operation."""

    def __init__(self, message: str, precondition: str | None = None):
        self.precondition = precondition
        super().__init__(message)


class HypothesisError(PreconditionError):
    """A hypothesis of a construction failed numerically.

    ``hypothesis`` names the failed condition, ``residual`` is its measured
    size and ``where`` the worst offending indices (if any).
    """

    def __init__(self, hypothesis: str, residual: float, tol: float, where=None):
        self.hypothesis = hypothesis
        self.residual = float(residual)
        self.tol = float(tol)
        self.where = where
        msg = f"hypothesis '{hypothesis}' fails: residual {self.residual:.3e} > tol {self.tol:.1e}"
        if where is not None:
            msg += f" at {where}"
        super().__init__(msg, precondition=hypothesis)


class VerificationError(NCHadamardError):
    """Raised when an input that must be Hadamard (or magic) is not."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class CapExceededError(NCHadamardError, ValueError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"moment matrix dimension N^k = {size} exceeds cap {cap}")


class MatrixFileError(NCHadamardError):
    """Problem reading a matrix file; ``code`` is a stable machine-readable tag."""

    MALFORMED_JSON = "MALFORMED_JSON"
    SCHEMA = "SCHEMA"
    VERSION = "UNSUPPORTED_VERSION"
    DIM_MISMATCH = "DIM_MISMATCH"
    NONFINITE = "NONFINITE"
    IO = "IO_ERROR"

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")
