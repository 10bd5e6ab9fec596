"""
core/model
Problem data and solution representations
"""

from .instance import (
    DoorSpec,
    Scenario,
    Instance,
    build_instance,
    derive_totals,
    default_outsourcing_penalty,
)
from .solution import (
    FirstStageDesign,
    ScenarioAssignment,
    CostBreakdown,
    Violation,
    VIOLATION_FAMILIES,
    evaluate_solution,
    check_feasibility,
    scenario_cost,
    scenario_operational_cost,
    total_out,
)
from .io import (
    SCHEMA_VERSION,
    instance_to_dict,
    instance_from_dict,
    instance_hash,
    load_instance,
    save_instance,
    design_to_dict,
    design_from_dict,
    load_design,
    save_design,
)

__all__ = [
    'DoorSpec',
    'Scenario',
    'Instance',
    'build_instance',
    'derive_totals',
    'default_outsourcing_penalty',
    'FirstStageDesign',
    'ScenarioAssignment',
    'CostBreakdown',
    'Violation',
    'VIOLATION_FAMILIES',
    'evaluate_solution',
    'check_feasibility',
    'scenario_cost',
    'scenario_operational_cost',
    'total_out',
    'SCHEMA_VERSION',
    'instance_to_dict',
    'instance_from_dict',
    'instance_hash',
    'load_instance',
    'save_instance',
    'design_to_dict',
    'design_from_dict',
    'load_design',
    'save_design',
]
