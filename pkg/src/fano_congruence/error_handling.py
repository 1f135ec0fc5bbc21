# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Exception hierarchy and numeric error translation."""

from functools import wraps
from typing import Any, Callable, Optional, TypeVar

import numpy as np
from rich.console import Console

console = Console(stderr=True)

T = TypeVar("T")

EXIT_SUCCESS = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class FanoCongruenceError(Exception):
    """Base exception for fano-congruence errors."""

    pass


class BackendMismatchError(FanoCongruenceError):
    """Raised when exact and float scalars meet in one computation."""

    pass


class DegreeMismatchError(FanoCongruenceError):
    """Raised when forms of different degrees are combined."""

    pass


class LineInSurfaceError(FanoCongruenceError):
    """Raised when the line of a Fano point lies on the surface."""

    pass


class MembershipError(FanoCongruenceError):
    """Raised when a Fano point does not lie on S(Y)."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class SingularContactError(FanoCongruenceError):
    """Raised when the surface is singular at a contact point."""

    def __init__(self, message: str, contact: Optional[str] = None):
        super().__init__(message)
        self.contact = contact


class IncidencePatternError(FanoCongruenceError):
    """Raised when the contact pattern does not match what an operation needs."""

    pass


class DegenerateStratumError(FanoCongruenceError):
    """Raised when a point lies in an excluded degenerate stratum."""

    pass


class DegenerateSliceError(FanoCongruenceError):
    """Raised when slice parameters do not determine a line."""

    pass


class FrameError(FanoCongruenceError):
    """Raised when an adapted frame cannot be built."""

    pass


class NotNodalError(FanoCongruenceError):
    """Raised when a point expected to be a node is not one."""

    pass


class NonLefschetzError(FanoCongruenceError):
    """Raised when a pencil has a non-nodal singular member."""

    pass


class SurfaceFileError(FanoCongruenceError):
    """Raised when a surface or point file is malformed."""

    def __init__(self, message: str, entry: Optional[int] = None):
        super().__init__(message)
        self.entry = entry


class ZeroFormError(FanoCongruenceError):
    """Raised when an operation needs a nonzero form."""

    pass


class ConfigurationError(FanoCongruenceError):
    """Raised when configuration is invalid."""

    pass


class InconclusiveError(FanoCongruenceError):
    """Raised when a numeric run cannot certify its result."""

    pass


def handle_numeric_errors(func: Callable[..., T]) -> Callable[..., T]:
    """Decorator to translate numeric failures into fano-congruence errors."""

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> T:
        try:
            return func(*args, **kwargs)
        except FanoCongruenceError:
            raise
        except np.linalg.LinAlgError as e:
            raise InconclusiveError(f"Linear algebra failed in {func.__name__}: {e}") from e
        except ZeroDivisionError as e:
            raise FrameError(f"Division by zero in {func.__name__}: {e}") from e
        except FloatingPointError as e:
            raise InconclusiveError(
                f"Floating point failure in {func.__name__}: {e}"
            ) from e

    return wrapper


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, (InconclusiveError, NonLefschetzError)):
        return EXIT_INCONCLUSIVE
    return EXIT_ERROR


def report_error(operation: str, error: BaseException) -> None:
    """Print an error with its category."""
    console.print(f"[red]❌ {operation} failed ({type(error).__name__}): {error}[/red]")
