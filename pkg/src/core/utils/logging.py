"""
Logging module for cddp-toolkit
Provides solver logging with audit helpers for solves and algorithm trials
"""
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional


class SolverLogger:
    """Logger wrapper with solve/trial audit capabilities"""

    def __init__(self, name: str = "cddp"):
        self.name = name
        self.logger = logging.getLogger(name)
        self._setup_logger()

    def _setup_logger(self, level: Optional[str] = None) -> None:
        """Setup the logger with appropriate handlers and formatters"""
        # Lazy import to avoid circular import issues
        from .config import get_operational_config
        op_config = get_operational_config()

        log_level = getattr(logging, (level or op_config.log_level).upper(), logging.WARNING)
        self.logger.setLevel(log_level)
        self.logger.propagate = False

        # Clear existing handlers
        self.logger.handlers.clear()

        console_handler = logging.StreamHandler(sys.stderr)
        console_formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        console_handler.setFormatter(console_formatter)
        self.logger.addHandler(console_handler)

        if op_config.log_file:
            log_file_path = Path(op_config.log_file)
            log_file_path.parent.mkdir(parents=True, exist_ok=True)

            file_handler = logging.FileHandler(log_file_path)
            file_formatter = logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
            )
            file_handler.setFormatter(file_formatter)
            self.logger.addHandler(file_handler)

    def set_level(self, level: str) -> None:
        self._setup_logger(level)

    def info(self, message: str) -> None:
        self.logger.info(message)

    def warning(self, message: str) -> None:
        self.logger.warning(message)

    def error(self, message: str) -> None:
        self.logger.error(message)

    def debug(self, message: str) -> None:
        self.logger.debug(message)

    def audit_solve(
            self,
            kind: str,
            status: str,
            value: Optional[float],
            bound: Optional[float],
            seconds: float) -> None:
        """Log the outcome of one solver call"""
        self.logger.info(
            f"SOLVE: {kind} status={status} value={_fmt(value)} "
            f"bound={_fmt(bound)} time={seconds:.3f}s")

    def audit_trial(
            self,
            cluster_id: str,
            decision: str,
            z: float,
            out: int) -> None:
        """Log one matheuristic trial"""
        self.logger.info(
            f"TRIAL: cluster={cluster_id} decision={decision} z={_fmt(z)} out={out}")

    def audit_instance(self, event: str, details: Dict[str, Any]) -> None:
        """Log an instance-level event (generation, merge, refinement)"""
        self.logger.info(f"INSTANCE: {event} - {details}")


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:.6g}"


# Global logger instance
_solver_logger: Optional[SolverLogger] = None


def get_logger() -> SolverLogger:
    """Get the global solver logger instance"""
    global _solver_logger
    if _solver_logger is None:
        _solver_logger = SolverLogger()
    return _solver_logger


def log_solve(kind: str, status: str, value: Optional[float],
              bound: Optional[float], seconds: float) -> None:
    get_logger().audit_solve(kind, status, value, bound, seconds)


def log_trial(cluster_id: str, decision: str, z: float, out: int) -> None:
    get_logger().audit_trial(cluster_id, decision, z, out)
