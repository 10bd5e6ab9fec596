"""
modules/decomposition/submodels.py
Cluster submodels and their warm starts
"""
from typing import List, Optional, Tuple

import numpy as np

from core.model import FirstStageDesign, Instance, ScenarioAssignment
from modules.lip import GenericMILP, assemble, lift_solution
from modules.lip.builder import STACK, STRIP
from modules.solvers import OmegaSubmodel, solve_omega
from .clusters import Cluster

FULL = "full"
STRIP_ONLY = "strip"
STACK_ONLY = "stack"
SUBMODEL_KINDS = (FULL, STRIP_ONLY, STACK_ONLY)


def build_c_submodel(instance: Instance, cluster: Cluster) -> GenericMILP:
    """Linear model over the cluster's scenarios with conditional weights"""
    return assemble(instance, cluster.scenarios, cluster.conditional_weights,
                    cluster.strip_doors, cluster.stack_doors, name=f"c{cluster.label}")


def build_strip_c_submodel(instance: Instance, cluster: Cluster) -> GenericMILP:
    """Strip side only, half operational cost, no stack doors"""
    return assemble(instance, cluster.scenarios, cluster.conditional_weights,
                    cluster.strip_doors, cluster.stack_doors, sides=(STRIP,),
                    operational_share=0.5, name=f"c{cluster.label}_strip")


def build_stack_c_submodel(instance: Instance, cluster: Cluster) -> GenericMILP:
    return assemble(instance, cluster.scenarios, cluster.conditional_weights,
                    cluster.strip_doors, cluster.stack_doors, sides=(STACK,),
                    operational_share=0.5, name=f"c{cluster.label}_stack")


_BUILDERS = {
    FULL: build_c_submodel,
    STRIP_ONLY: build_strip_c_submodel,
    STACK_ONLY: build_stack_c_submodel,
}


def build_submodel(instance: Instance, cluster: Cluster, kind: str = FULL) -> GenericMILP:
    return _BUILDERS[kind](instance, cluster)


def _top_doors(instance: Instance, cluster: Cluster, strip: bool) -> List[int]:
    """Cluster doors by descending eligibility count, at most the door bound"""
    counts = {}
    for w in cluster.scenarios:
        scen = instance.scenarios[w]
        nodes = range(scen.n_origins) if strip else range(scen.n_destinations)
        eligible = instance.eligible_strip_doors if strip else instance.eligible_stack_doors
        for node in nodes:
            for door in eligible(node, w):
                counts[door] = counts.get(door, 0) + 1
    doors = sorted(cluster.strip_doors if strip else cluster.stack_doors,
                   key=lambda d: (-counts.get(d, 0), d))
    return doors[:instance.max_strip_doors if strip else instance.max_stack_doors]


def warm_start_design(instance: Instance, cluster: Cluster) -> FirstStageDesign:
    """Top level on the most widely eligible cluster doors"""
    return FirstStageDesign(
        {i: instance.strip_doors[i - 1].n_levels for i in _top_doors(instance, cluster, True)},
        {j: instance.stack_doors[j - 1].n_levels for j in _top_doors(instance, cluster, False)},
    )


def warm_start(instance: Instance, cluster: Cluster, milp: GenericMILP,
               seed: Optional[int] = 0) -> Tuple[np.ndarray, FirstStageDesign, List[ScenarioAssignment]]:
    """
    A feasible point of a cluster submodel.

    The scenarios are solved with the top-level design, then the design is
    trimmed to the doors the assignments use.
    """
    design = warm_start_design(instance, cluster)
    assignments = [solve_omega(OmegaSubmodel.from_design(instance, w, design), seed=seed).assignment
                   for w in cluster.scenarios]
    used_strip = set().union(*(a.strip_doors_used() for a in assignments))
    used_stack = set().union(*(a.stack_doors_used() for a in assignments))
    design = design.restricted_to(used_strip, used_stack)
    values = lift_solution(instance, design, assignments, scenario_ids=cluster.scenarios)
    return milp.vector_from_symbols(values), design, assignments
