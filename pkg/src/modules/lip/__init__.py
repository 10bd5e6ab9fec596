"""
Linearized model construction, dimensions and export
"""

from .milp import GenericMILP, ModelDims, MILPBuilder, count_dims, BINARY, CONTINUOUS
from .builder import (
    assemble,
    build_lip,
    lift_solution,
    parse_symbol,
    symbol_name,
    design_from_vector,
    assignments_from_vector,
    outsourcing_flags,
)
from .export import write_lp, write_mps, read_lp

__all__ = [
    'GenericMILP',
    'ModelDims',
    'MILPBuilder',
    'count_dims',
    'BINARY',
    'CONTINUOUS',
    'assemble',
    'build_lip',
    'lift_solution',
    'parse_symbol',
    'symbol_name',
    'design_from_vector',
    'assignments_from_vector',
    'outsourcing_flags',
    'write_lp',
    'write_mps',
    'read_lp',
]
