"""
core/model/solution.py
First-stage designs, per-scenario assignments, objective evaluation and
constraint checking of the stochastic door design model
"""
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..utils.config import get_model_config
from ..utils.exceptions import IncompleteSolutionError
from .instance import Instance

Selection = FrozenSet[Tuple[int, int]]
LevelMap = Union[Mapping[int, int], Iterable[Tuple[int, int]]]


def _as_selection(levels: LevelMap) -> Selection:
    if isinstance(levels, Mapping):
        return frozenset((int(d), int(k)) for d, k in levels.items())
    return frozenset((int(d), int(k)) for d, k in levels)


@dataclass(frozen=True)
class FirstStageDesign:
    """
    Selected (door, level) pairs on each side.

    A well-formed design selects at most one level per door; the pair form
    lets check_feasibility report designs that break that rule. Level 0 is
    the basic capacity.
    """

    strip_selection: Selection = field(default_factory=frozenset)
    stack_selection: Selection = field(default_factory=frozenset)

    def __init__(self, strip_level: LevelMap = (), stack_level: LevelMap = ()):
        object.__setattr__(self, "strip_selection", _as_selection(strip_level))
        object.__setattr__(self, "stack_selection", _as_selection(stack_level))

    @property
    def strip_level(self) -> Dict[int, int]:
        """door -> level; for a malformed door the highest selected level wins"""
        return _level_map(self.strip_selection)

    @property
    def stack_level(self) -> Dict[int, int]:
        return _level_map(self.stack_selection)

    def key(self) -> Tuple[Tuple[Tuple[int, int], ...], Tuple[Tuple[int, int], ...]]:
        return tuple(sorted(self.strip_selection)), tuple(sorted(self.stack_selection))

    def strip_capacity(self, instance: Instance, door: int) -> float:
        spec = instance.strip_doors[door - 1]
        return math.fsum(spec.capacities[k] for d, k in self.strip_selection if d == door)

    def stack_capacity(self, instance: Instance, door: int) -> float:
        spec = instance.stack_doors[door - 1]
        return math.fsum(spec.capacities[k] for d, k in self.stack_selection if d == door)

    def install_cost(self, instance: Instance) -> float:
        parts = [instance.strip_doors[d - 1].install_costs[k] for d, k in sorted(self.strip_selection)]
        parts += [instance.stack_doors[d - 1].install_costs[k] for d, k in sorted(self.stack_selection)]
        return math.fsum(float(p) for p in parts)

    def restricted_to(self, strip_doors: Iterable[int], stack_doors: Iterable[int]) -> "FirstStageDesign":
        keep_i, keep_j = set(strip_doors), set(stack_doors)
        return FirstStageDesign(
            [(d, k) for d, k in self.strip_selection if d in keep_i],
            [(d, k) for d, k in self.stack_selection if d in keep_j],
        )

    def with_basic_capacities(self, instance: Instance) -> "FirstStageDesign":
        """Doors with no selected level get level 0"""
        strip = dict(self.strip_level)
        stack = dict(self.stack_level)
        for i in range(1, instance.n_strip + 1):
            strip.setdefault(i, 0)
        for j in range(1, instance.n_stack + 1):
            stack.setdefault(j, 0)
        return FirstStageDesign(strip, stack)

    def installed_count(self) -> Tuple[int, int]:
        """Selected pairs with k >= 1 on each side"""
        return (sum(1 for _, k in self.strip_selection if k >= 1),
                sum(1 for _, k in self.stack_selection if k >= 1))

    def describe(self) -> str:
        strip = ",".join(f"{d}:{k}" for d, k in sorted(self.strip_selection)) or "-"
        stack = ",".join(f"{d}:{k}" for d, k in sorted(self.stack_selection)) or "-"
        return f"strip[{strip}] stack[{stack}]"


def _level_map(selection: Selection) -> Dict[int, int]:
    levels: Dict[int, int] = {}
    for door, k in sorted(selection):
        levels[door] = max(k, levels.get(door, k))
    return levels


@dataclass(frozen=True)
class ScenarioAssignment:
    """
    Door of every origin (x) and destination (y) in one scenario.

    None marks a node without assignment. Door 0 is outsourcing; the two
    flags are the outsourcing indicator variables of the scenario.
    """

    x: Tuple[Optional[int], ...]
    y: Tuple[Optional[int], ...]
    uses_inbound_outsourcing: bool
    uses_outbound_outsourcing: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(None if d is None else int(d) for d in self.x))
        object.__setattr__(self, "y", tuple(None if d is None else int(d) for d in self.y))

    @classmethod
    def from_maps(cls, x: Union[Mapping[int, int], Sequence[Optional[int]]],
                  y: Union[Mapping[int, int], Sequence[Optional[int]]],
                  n_origins: Optional[int] = None,
                  n_destinations: Optional[int] = None) -> "ScenarioAssignment":
        """Build with the tightest outsourcing flags"""
        xs = _dense(x, n_origins)
        ys = _dense(y, n_destinations)
        return cls(xs, ys, any(d == 0 for d in xs), any(d == 0 for d in ys))

    @property
    def out(self) -> int:
        return int(self.uses_inbound_outsourcing) + int(self.uses_outbound_outsourcing)

    @property
    def outsources(self) -> bool:
        return self.out > 0

    def strip_doors_used(self) -> FrozenSet[int]:
        return frozenset(d for d in self.x if d)

    def stack_doors_used(self) -> FrozenSet[int]:
        return frozenset(d for d in self.y if d)


def _dense(assignment, size: Optional[int]) -> Tuple[Optional[int], ...]:
    if isinstance(assignment, Mapping):
        size = size if size is not None else (max(assignment) + 1 if assignment else 0)
        return tuple(assignment.get(m) for m in range(size))
    return tuple(assignment)


@dataclass(frozen=True)
class CostBreakdown:
    install_cost: float
    outsourcing_penalty_cost: float
    expected_operational_cost: float
    total: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "total",
            self.install_cost + self.outsourcing_penalty_cost + self.expected_operational_cost)


VIOLATION_FAMILIES = (
    "clique", "cover", "strip_capacity", "stack_capacity", "assignment", "domain", "outsourcing_flag",
)


@dataclass(frozen=True)
class Violation:
    """One broken constraint; scenario is None for first-stage rows"""

    family: str
    scenario: Optional[int]
    entity: str
    excess: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in VIOLATION_FAMILIES:
            raise ValueError(f"unknown violation family {self.family!r}")

    def __str__(self) -> str:
        where = "first stage" if self.scenario is None else f"scenario {self.scenario}"
        extra = f" (excess {self.excess:.6g})" if self.excess else ""
        return f"{self.family}: {self.entity} in {where}{extra}"


def scenario_operational_cost(instance: Instance, w: int, assignment: ScenarioAssignment) -> float:
    """Sum of G over the assigned (origin, destination) pairs of one scenario"""
    if any(d is None for d in assignment.x) or any(d is None for d in assignment.y):
        raise IncompleteSolutionError("Scenario has unassigned nodes", scenario=w)
    flow = instance.scenarios[w].flow.tocoo()
    penalty = instance.outsourcing_penalty
    terms = []
    for m, n, h in zip(flow.row, flow.col, flow.data):
        i, j = assignment.x[m], assignment.y[n]
        rate = penalty if i == 0 or j == 0 else float(instance.distance[i - 1, j - 1])
        terms.append(rate * float(h))
    return math.fsum(terms)


def scenario_cost(instance: Instance, w: int, assignment: ScenarioAssignment) -> float:
    """Second-stage value z2 of one scenario: flag penalties plus operational cost"""
    flags = instance.outsourcing_penalty * assignment.out
    return flags + scenario_operational_cost(instance, w, assignment)


def _check_complete(instance: Instance, assignments: Sequence[Optional[ScenarioAssignment]]) -> None:
    if len(assignments) != instance.n_scenarios:
        raise IncompleteSolutionError(
            "One assignment per scenario is required",
            expected=instance.n_scenarios, received=len(assignments))
    for w, assignment in enumerate(assignments):
        if assignment is None:
            raise IncompleteSolutionError("Missing scenario assignment", scenario=w)
        scen = instance.scenarios[w]
        if len(assignment.x) != scen.n_origins or len(assignment.y) != scen.n_destinations:
            raise IncompleteSolutionError(
                "Assignment does not cover every node of the scenario", scenario=w)


def evaluate_solution(instance: Instance, design: FirstStageDesign,
                      assignments: Sequence[Optional[ScenarioAssignment]]) -> CostBreakdown:
    """Objective value of a complete solution, scenario order independent"""
    _check_complete(instance, assignments)
    penalty_terms = []
    operational_terms = []
    for w, assignment in enumerate(assignments):
        weight = instance.scenarios[w].weight
        penalty_terms.append(weight * instance.outsourcing_penalty * assignment.out)
        operational_terms.append(weight * scenario_operational_cost(instance, w, assignment))
    return CostBreakdown(
        install_cost=design.install_cost(instance),
        outsourcing_penalty_cost=math.fsum(penalty_terms),
        expected_operational_cost=math.fsum(operational_terms),
    )


def _first_stage_violations(instance: Instance, design: FirstStageDesign) -> List[Violation]:
    found: List[Violation] = []
    installed_strip, installed_stack = design.installed_count()
    sides = (
        ("strip", design.strip_selection, instance.strip_doors, instance.max_strip_doors, installed_strip),
        ("stack", design.stack_selection, instance.stack_doors, instance.max_stack_doors, installed_stack),
    )
    for side, selection, doors, upper, installed in sides:
        per_door: Dict[int, int] = {}
        for door, k in sorted(selection):
            if not 1 <= door <= len(doors) or not 0 <= k <= doors[door - 1].n_levels:
                found.append(Violation("domain", None, f"{side} door {door} level {k}"))
                continue
            per_door[door] = per_door.get(door, 0) + 1
        for door, count in sorted(per_door.items()):
            if count > 1:
                found.append(Violation("clique", None, f"{side} door {door}", float(count - 1)))
        if installed > upper:
            found.append(Violation("cover", None, f"{side} doors", float(installed - upper)))
    return found


def _scenario_violations(instance: Instance, design: FirstStageDesign, w: int,
                         assignment: ScenarioAssignment) -> List[Violation]:
    tol = get_model_config().capacity_tolerance
    scen = instance.scenarios[w]
    found: List[Violation] = []
    sides = (
        ("strip", "origin", assignment.x, scen.origin_totals, scen.strip_disruption,
         instance.eligible_strip_doors, design.strip_capacity, assignment.uses_inbound_outsourcing),
        ("stack", "destination", assignment.y, scen.destination_totals, scen.stack_disruption,
         instance.eligible_stack_doors, design.stack_capacity, assignment.uses_outbound_outsourcing),
    )
    for side, node, doors, loads, disruption, eligible, capacity, flag in sides:
        used: Dict[int, List[float]] = {}
        for m, door in enumerate(doors):
            if m >= len(loads):
                found.append(Violation("assignment", w, f"extra {node} {m}"))
                continue
            if door is None:
                found.append(Violation("assignment", w, f"{node} {m}"))
                continue
            if door == 0:
                if not flag:
                    found.append(Violation("outsourcing_flag", w, f"{node} {m}"))
                continue
            if door not in eligible(m, w):
                found.append(Violation("domain", w, f"{node} {m} -> {side} door {door}"))
                continue
            used.setdefault(door, []).append(float(loads[m]))
        for m in range(len(doors), len(loads)):
            found.append(Violation("assignment", w, f"{node} {m}"))
        for door, door_loads in sorted(used.items()):
            net = (1.0 - float(disruption[door - 1])) * capacity(instance, door)
            excess = math.fsum(door_loads) - net
            if excess > tol:
                found.append(Violation(f"{side}_capacity", w, f"{side} door {door}", excess))
    return found


def check_feasibility(instance: Instance, design: FirstStageDesign,
                      assignments: Sequence[Optional[ScenarioAssignment]]) -> List[Violation]:
    """Every violated constraint, first stage first, then scenario by scenario"""
    found = _first_stage_violations(instance, design)
    for w in range(instance.n_scenarios):
        assignment = assignments[w] if w < len(assignments) else None
        if assignment is None:
            found.append(Violation("assignment", w, "scenario"))
            continue
        found.extend(_scenario_violations(instance, design, w, assignment))
    return found


def total_out(assignments: Sequence[ScenarioAssignment]) -> int:
    return sum(a.out for a in assignments if a is not None)

