"""
modules/scs4b/params.py
Parameters and report of the scenario-cluster matheuristic
"""
import math
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Mapping, Optional, Tuple

from core.model import FirstStageDesign, Instance, ScenarioAssignment
from core.utils.config import get_algorithm_config, get_solver_config
from core.utils.exceptions import ParameterError

BOUND_OPTIONS = ("1", "2", "both", "none")
ESCALATIONS = ("textual", "literal")
BASIC_CAPACITY_MODES = ("fallback", "always")

STATUS_OK = "ok"
STATUS_NO_INCUMBENT = "no-incumbent"
STATUS_EMPTY_POOL = "empty-pool"

ACCEPTED = "accepted"
REJECTED = "rejected"
ESCALATED = "escalated"
SKIPPED = "skipped"
SPLIT = "split"


@dataclass(frozen=True)
class Scs4bParams:
    """Algorithm settings; unspecified fields come from the algorithm/solver config"""

    kappa: int = 2
    seed: Optional[int] = 0
    rho: float = 0.0
    delta: int = 1
    bound_option: str = "both"
    time_limit: Optional[float] = None
    omega_threshold: Optional[int] = None
    escalation: str = "textual"
    basic_capacity: str = "fallback"
    step0_option: int = 1
    jobs: int = 1
    kappa_overrides: Mapping[Tuple[int, int], int] = field(default_factory=dict)

    @classmethod
    def from_config(cls, **overrides: Any) -> "Scs4bParams":
        """Config defaults with keyword overrides; None overrides are ignored"""
        algorithm, solver = get_algorithm_config(), get_solver_config()
        values: Dict[str, Any] = {
            "kappa": algorithm.kappa,
            "rho": algorithm.rho,
            "delta": algorithm.delta,
            "bound_option": str(algorithm.bound_option),
            "escalation": algorithm.escalation,
            "basic_capacity": algorithm.basic_capacity,
            "step0_option": algorithm.step0_option,
            "time_limit": solver.time_limit,
            "omega_threshold": solver.omega_exact_threshold,
            "jobs": solver.jobs,
        }
        known = {f.name for f in fields(cls)}
        for key, value in overrides.items():
            if key not in known:
                raise ParameterError(key, value, f"one of {sorted(known)}")
            if value is not None:
                values[key] = value
        return cls(**values).validated()

    def validated(self) -> "Scs4bParams":
        if isinstance(self.kappa, bool) or int(self.kappa) != self.kappa or self.kappa < 1:
            raise ParameterError("kappa", self.kappa, "integer >= 1")
        if not 0.0 <= float(self.rho) <= 1.0:
            raise ParameterError("rho", self.rho, "value in [0, 1]")
        if isinstance(self.delta, bool) or int(self.delta) != self.delta or self.delta < 1:
            raise ParameterError("delta", self.delta, "integer >= 1")
        if str(self.bound_option) not in BOUND_OPTIONS:
            raise ParameterError("bound_option", self.bound_option, f"one of {BOUND_OPTIONS}")
        if self.escalation not in ESCALATIONS:
            raise ParameterError("escalation", self.escalation, f"one of {ESCALATIONS}")
        if self.basic_capacity not in BASIC_CAPACITY_MODES:
            raise ParameterError("basic_capacity", self.basic_capacity, f"one of {BASIC_CAPACITY_MODES}")
        if self.step0_option not in (1, 2):
            raise ParameterError("step0_option", self.step0_option, "1 or 2")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ParameterError("time_limit", self.time_limit, "positive seconds")
        if self.jobs < 1:
            raise ParameterError("jobs", self.jobs, "integer >= 1")
        return replace(self, kappa=int(self.kappa), delta=int(self.delta), rho=float(self.rho),
                       bound_option=str(self.bound_option))

    @property
    def wants_option1(self) -> bool:
        return self.bound_option in ("1", "both")

    @property
    def wants_option2(self) -> bool:
        return self.bound_option in ("2", "both")


@dataclass
class TrialRecord:
    """One evaluated first-stage design"""

    cluster: str
    design: str
    z: Optional[float]
    out: int
    decision: str
    escalations: int = 0


@dataclass
class Scs4bReport:
    """Outcome of one run on the refined instance"""

    instance: Instance
    instance_hash: str
    status: str
    upper_bound: Optional[float] = None
    design: Optional[FirstStageDesign] = None
    assignments: Optional[List[ScenarioAssignment]] = None
    option1_bound: Optional[float] = None
    option1_seconds: Optional[float] = None
    option1_proven: bool = False
    option2_bound: Optional[float] = None
    option2_seconds: Optional[float] = None
    option2_proven: bool = False
    removed_scenarios: List[str] = field(default_factory=list)
    removed_weight: float = 0.0
    trials: List[TrialRecord] = field(default_factory=list)
    total_seconds: float = 0.0
    peak_memory_mb: float = 0.0
    reference_value: Optional[float] = None
    oracle_value: Optional[float] = None

    @property
    def best_bound(self) -> Optional[float]:
        """max of the computed bounds"""
        bounds = [b for b in (self.option1_bound, self.option2_bound) if b is not None]
        return max(bounds) if bounds else None

    @property
    def gap(self) -> Optional[float]:
        return gap(self.upper_bound, self.best_bound)

    @property
    def goodness_ratio(self) -> Optional[float]:
        return goodness_ratio(self.upper_bound, self.reference_value)

    @property
    def oracle_gap(self) -> Optional[float]:
        return gap(self.upper_bound, self.oracle_value)

    @property
    def out(self) -> Optional[int]:
        if self.assignments is None:
            return None
        return sum(a.out for a in self.assignments)


def gap(upper: Optional[float], lower: Optional[float]) -> Optional[float]:
    """100 (upper - lower) / upper"""
    if upper is None or lower is None or upper == 0 or not math.isfinite(upper):
        return None
    return 100.0 * (upper - lower) / upper


def goodness_ratio(upper: Optional[float], reference: Optional[float]) -> Optional[float]:
    if upper is None or reference is None or reference == 0:
        return None
    return upper / reference
