"""
modules/solvers/result.py
Outcome of a solver call
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Sequence

from core.model import FirstStageDesign, ScenarioAssignment


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    BOUND_ONLY = "bound-only"
    TIMEOUT = "timeout"


@dataclass
class SolveResult:
    """
    Status, incumbent value and proven lower bound of one solve.

    `solution` is the model vector for MILP solves; ω-solves fill
    `assignment`, whole-instance searches fill `design` and `assignments`.
    """

    status: SolveStatus
    value: Optional[float] = None
    bound: Optional[float] = None
    solution: Optional[Any] = None
    nodes: int = 0
    seconds: float = 0.0
    bound_trace: List[float] = field(default_factory=list)
    assignment: Optional[ScenarioAssignment] = None
    design: Optional[FirstStageDesign] = None
    assignments: Optional[Sequence[ScenarioAssignment]] = None

    @property
    def has_incumbent(self) -> bool:
        return self.value is not None

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL

    @property
    def gap(self) -> Optional[float]:
        """Relative gap between incumbent and bound"""
        if self.value is None or self.bound is None:
            return None
        if self.value == 0:
            return 0.0 if self.bound >= 0 else None
        return (self.value - self.bound) / abs(self.value)
