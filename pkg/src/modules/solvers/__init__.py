"""
In-repo solvers: MILP branch and bound, scenario submodel solvers and
exact whole-instance searches
"""

from .result import SolveResult, SolveStatus
from .branch_and_bound import LinearRelaxation, solve_bb
from .omega import (
    OmegaSubmodel,
    semi_assignment_bound,
    solve_omega,
    solve_omega_exact,
    solve_omega_lsh,
)
from .oracle import brute_force_oracle, search_space_size, solve_bq_bb

__all__ = [
    'SolveResult',
    'SolveStatus',
    'LinearRelaxation',
    'solve_bb',
    'OmegaSubmodel',
    'semi_assignment_bound',
    'solve_omega',
    'solve_omega_exact',
    'solve_omega_lsh',
    'brute_force_oracle',
    'search_space_size',
    'solve_bq_bb',
]
