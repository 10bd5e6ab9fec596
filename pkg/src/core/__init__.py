"""
core/__init__.py
Problem model, configuration, logging and error handling
"""

from .utils.exceptions import (
    CddpError,
    InstanceError,
    InvalidInstanceError,
    SchemaError,
    SolverError,
    ErrorSeverity,
    ExceptionHandler,
    handle_errors
)
from .model import Instance, FirstStageDesign, ScenarioAssignment, load_instance, save_instance

__all__ = [
    'CddpError',
    'InstanceError',
    'InvalidInstanceError',
    'SchemaError',
    'SolverError',
    'ErrorSeverity',
    'ExceptionHandler',
    'handle_errors',
    'Instance',
    'FirstStageDesign',
    'ScenarioAssignment',
    'load_instance',
    'save_instance',
]
