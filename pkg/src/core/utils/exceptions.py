"""
core/utils/exceptions.py
Exception hierarchy and error handling utilities
"""
from enum import Enum
from typing import Optional, Dict, Any, Tuple, Callable
import functools
import traceback
import sys


class ErrorSeverity(Enum):
    """Error severity levels"""
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class CddpError(Exception):
    """Base exception for all toolkit errors"""

    exit_code: int = 1

    def __init__(
        self,
        message: str,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        details: Optional[Dict[str, Any]] = None,
        suggestion: Optional[str] = None
    ):
        super().__init__(message)
        self.message = message
        self.severity = severity
        self.details = details or {}
        self.suggestion = suggestion

    def display(self) -> str:
        """Format error for display"""
        lines = [
            f"\n{'='*70}",
            f"{self.severity.value}: {self.message}",
            f"{'='*70}"
        ]

        if self.details:
            lines.append("\nDetails:")
            for key, value in self.details.items():
                lines.append(f"  {key}: {value}")

        if self.suggestion:
            lines.append(f"\nSuggestion: {self.suggestion}")

        lines.append(f"{'='*70}\n")

        return '\n'.join(lines)


class InstanceError(CddpError):
    """Base class for problem-data errors"""
    exit_code = 3


class InvalidInstanceError(InstanceError):
    """Instance data violates a model invariant"""

    def __init__(self, message: str, **details: Any):
        super().__init__(
            message,
            details=details,
            suggestion="Fix the instance data or regenerate it with 'cddp generate'"
        )


class SchemaError(InstanceError):
    """Instance file does not follow the cddp-ts/1 schema"""

    def __init__(self, key: str, reason: str, path: Optional[str] = None):
        self.key = key
        details: Dict[str, Any] = {"key": key}
        if path:
            details["file"] = path
        super().__init__(
            f"Schema error at '{key}': {reason}",
            details=details,
            suggestion="See docs/README.md for the instance file format"
        )


class MergeError(InstanceError):
    """Instances cannot be merged"""

    def __init__(self, message: str, **details: Any):
        super().__init__(
            message,
            details=details,
            suggestion="Generate all members with the same number of capacity levels"
        )


class SolutionError(CddpError):
    """Base class for solution-structure errors"""
    exit_code = 3


class IncompleteSolutionError(SolutionError):
    """A scenario or node has no assignment"""

    def __init__(self, message: str, **details: Any):
        super().__init__(message, details=details)


class SolverError(CddpError):
    """Base class for solver errors"""
    pass


class SearchSpaceTooLargeError(SolverError):
    """Exhaustive enumeration refused"""

    def __init__(self, estimate: float, cap: float):
        self.estimate = estimate
        self.cap = cap
        super().__init__(
            f"Search space too large for exhaustive enumeration: "
            f"~{estimate:.3g} leaves (cap {cap:.3g})",
            details={"estimated_leaves": estimate, "max_leaves": cap},
            suggestion="Use 'cddp scs4b' or raise solver.oracle_max_leaves"
        )


class InvalidBoundError(SolverError):
    """A cluster submodel produced no usable lower bound"""

    def __init__(self, clusters: Any):
        super().__init__(
            "Lower bound is not valid: some cluster submodels have no proven bound",
            severity=ErrorSeverity.WARNING,
            details={"clusters": clusters},
            suggestion="Increase the time limit per submodel"
        )


class EmptyPoolError(SolverError):
    """Every scenario was removed in the singleton phase"""

    def __init__(self, n_scenarios: int):
        super().__init__(
            f"All {n_scenarios} scenarios force outsourcing; nothing left to solve",
            details={"scenarios": n_scenarios},
            suggestion="Check door capacities and disruption fractions"
        )


class ParameterError(CddpError):
    """Algorithm or generator parameter out of range"""
    exit_code = 2

    def __init__(self, name: str, value: Any, expected: str):
        self.name = name
        super().__init__(
            f"Invalid value for {name}: {value!r}",
            details={"parameter": name, "value": value, "expected": expected}
        )


class ModelExportError(CddpError):
    """Reading or writing a model file failed"""

    def __init__(self, path: str, reason: str):
        super().__init__(
            f"Model file error: {path}",
            details={"path": path, "reason": reason}
        )


class ExceptionHandler:
    """Centralized exception handling"""

    @staticmethod
    def handle(error: Exception, exit_on_critical: bool = False) -> None:
        """Handle and display exception"""
        if isinstance(error, CddpError):
            print(error.display(), file=sys.stderr)

            if exit_on_critical and error.severity == ErrorSeverity.CRITICAL:
                sys.exit(error.exit_code)
        else:
            # Wrap unexpected errors
            wrapped = CddpError(
                str(error),
                severity=ErrorSeverity.ERROR,
                details={"type": type(error).__name__},
                suggestion="Re-run with --log-level DEBUG for details"
            )
            print(wrapped.display(), file=sys.stderr)
            traceback.print_exc()

    @staticmethod
    def safe_execute(func: Callable, *
                     args, **kwargs) -> Tuple[Any, Optional[CddpError]]:
        """Execute function safely and return (result, error)"""
        try:
            result = func(*args, **kwargs)
            return result, None
        except CddpError as e:
            return None, e
        except Exception as e:
            wrapped = CddpError(
                str(e),
                details={"type": type(e).__name__}
            )
            return None, wrapped


def handle_errors(exit_on_critical: bool = False):
    """Decorator turning toolkit errors into exit codes"""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except CddpError as e:
                ExceptionHandler.handle(e, exit_on_critical)
                return e.exit_code
            except Exception as e:
                ExceptionHandler.handle(e, exit_on_critical)
                return 1
        return wrapper
    return decorator
