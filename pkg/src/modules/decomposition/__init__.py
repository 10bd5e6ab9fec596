"""
Scenario cluster decomposition and lower bounds
"""

from .clusters import Cluster, ClusterSet, generate_clusters, make_cluster, scenario_groups
from .submodels import (
    FULL,
    STRIP_ONLY,
    STACK_ONLY,
    build_c_submodel,
    build_strip_c_submodel,
    build_stack_c_submodel,
    build_submodel,
    warm_start,
    warm_start_design,
)
from .bounds import (
    ClusterBound,
    ClusterValue,
    lower_bound,
    solve_cluster_bounds,
    solve_submodel,
    solve_submodels,
)

__all__ = [
    'Cluster',
    'ClusterSet',
    'generate_clusters',
    'make_cluster',
    'scenario_groups',
    'FULL',
    'STRIP_ONLY',
    'STACK_ONLY',
    'build_c_submodel',
    'build_strip_c_submodel',
    'build_stack_c_submodel',
    'build_submodel',
    'warm_start',
    'warm_start_design',
    'ClusterBound',
    'ClusterValue',
    'lower_bound',
    'solve_cluster_bounds',
    'solve_submodel',
    'solve_submodels',
]
