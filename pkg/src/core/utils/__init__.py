"""
Core utilities for cddp-toolkit
"""
from .config import ConfigManager, get_config_manager
from .logging import SolverLogger, get_logger
from .exceptions import (
    CddpError,
    InstanceError,
    InvalidInstanceError,
    SchemaError,
    MergeError,
    SolutionError,
    IncompleteSolutionError,
    SolverError,
    SearchSpaceTooLargeError,
    InvalidBoundError,
    EmptyPoolError,
    ParameterError,
    ModelExportError,
    ErrorSeverity,
    ExceptionHandler,
    handle_errors
)

__all__ = [
    'ConfigManager', 'get_config_manager', 'SolverLogger', 'get_logger',
    'CddpError', 'InstanceError', 'InvalidInstanceError', 'SchemaError',
    'MergeError', 'SolutionError', 'IncompleteSolutionError', 'SolverError',
    'SearchSpaceTooLargeError', 'InvalidBoundError', 'EmptyPoolError',
    'ParameterError', 'ModelExportError', 'ErrorSeverity', 'ExceptionHandler', 'handle_errors'
]
