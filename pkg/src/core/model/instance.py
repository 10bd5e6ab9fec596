"""
core/model/instance.py
Problem data of the two-stage cross-dock door design problem

Doors are numbered from 1 in every public call; door 0 is the outsourcing
'door'. Origin/destination nodes are 0-based rows/columns of a scenario's
flow matrix.
"""
import dataclasses
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..utils.config import get_model_config
from ..utils.exceptions import InvalidInstanceError


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidInstanceError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


def derive_totals(flow) -> Tuple[np.ndarray, np.ndarray]:
    """Row sums S_m and column sums R_n of a flow matrix"""
    matrix = sp.csr_matrix(flow, dtype=np.float64)
    if matrix.nnz and matrix.data.min() < 0:
        raise InvalidInstanceError(
            "Flow matrix has negative entries", min_entry=float(matrix.data.min()))
    origin_totals = np.asarray(matrix.sum(axis=1)).ravel()
    destination_totals = np.asarray(matrix.sum(axis=0)).ravel()
    return origin_totals, destination_totals


@dataclass(frozen=True, eq=False)
class DoorSpec:
    """Capacity ladder of one door; index 0 is the basic capacity"""

    capacities: np.ndarray
    install_costs: np.ndarray

    def __post_init__(self) -> None:
        caps = _frozen_array(self.capacities, "capacities")
        costs = _frozen_array(self.install_costs, "install_costs")
        if caps.ndim != 1 or caps.size < 2 or caps.shape != costs.shape:
            raise InvalidInstanceError(
                "A door needs a basic capacity plus at least one level, with one cost per level",
                capacities=caps.tolist(), install_costs=costs.tolist())
        if np.any(caps < 0) or np.any(costs < 0):
            raise InvalidInstanceError("Door capacities and costs must be nonnegative")
        if np.any(np.diff(caps[1:]) <= 0):
            raise InvalidInstanceError(
                "Capacities must be strictly increasing over levels 1..|K|",
                capacities=caps.tolist())
        object.__setattr__(self, "capacities", caps)
        object.__setattr__(self, "install_costs", costs)

    @classmethod
    def from_levels(cls, level_capacities: Sequence[float], level_costs: Sequence[float],
                    basic_capacity: float, basic_cost: float) -> "DoorSpec":
        return cls(np.r_[basic_capacity, level_capacities], np.r_[basic_cost, level_costs])

    @property
    def n_levels(self) -> int:
        """|K|, levels 1..|K| (the basic level 0 is not counted)"""
        return int(self.capacities.size - 1)

    @property
    def max_capacity(self) -> float:
        return float(self.capacities.max())


@dataclass(frozen=True, eq=False)
class Scenario:
    """One realisation of the second-stage data"""

    weight: float
    flow: sp.csr_matrix
    strip_disruption: np.ndarray
    stack_disruption: np.ndarray
    name: str = ""
    origin_totals: np.ndarray = field(init=False, repr=False)
    destination_totals: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        flow = sp.csr_matrix(self.flow, dtype=np.float64)
        flow.eliminate_zeros()
        origin_totals, destination_totals = derive_totals(flow)
        strip = _frozen_array(self.strip_disruption, "strip_disruption")
        stack = _frozen_array(self.stack_disruption, "stack_disruption")
        for label, vec in (("strip", strip), ("stack", stack)):
            if np.any(vec < 0) or np.any(vec > 1):
                raise InvalidInstanceError(
                    f"{label} disruption fractions must lie in [0, 1]", scenario=self.name)
        if not 0 < self.weight <= 1:
            raise InvalidInstanceError(
                "Scenario weight must lie in (0, 1]", weight=self.weight, scenario=self.name)
        origin_totals.setflags(write=False)
        destination_totals.setflags(write=False)
        object.__setattr__(self, "flow", flow)
        object.__setattr__(self, "strip_disruption", strip)
        object.__setattr__(self, "stack_disruption", stack)
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(self, "origin_totals", origin_totals)
        object.__setattr__(self, "destination_totals", destination_totals)

    @cached_property
    def dense_flow(self) -> np.ndarray:
        dense = self.flow.toarray()
        dense.setflags(write=False)
        return dense

    @property
    def n_origins(self) -> int:
        return int(self.flow.shape[0])

    @property
    def n_destinations(self) -> int:
        return int(self.flow.shape[1])

    def with_weight(self, weight: float) -> "Scenario":
        return Scenario(weight, self.flow, self.strip_disruption, self.stack_disruption, self.name)


def default_outsourcing_penalty(strip_doors: Sequence[DoorSpec], stack_doors: Sequence[DoorSpec],
                                distance: np.ndarray, scenarios: Sequence[Scenario],
                                factor: Optional[float] = None) -> float:
    """F0 = factor * (max F_ki + max F_kj + max E_ij * sum of all flows)"""
    factor = get_model_config().penalty_factor if factor is None else factor

    def top_cost(doors: Sequence[DoorSpec]) -> float:
        return max((float(d.install_costs[1:].max()) for d in doors), default=0.0)

    max_distance = float(distance.max()) if distance.size else 0.0
    total_flow = math.fsum(float(s.flow.sum()) for s in scenarios)
    value = factor * (top_cost(strip_doors) + top_cost(stack_doors) + max_distance * total_flow)
    return value if value > 0 else 1.0


@dataclass(frozen=True, eq=False)
class Instance:
    """Full problem data; immutable after construction"""

    strip_doors: Tuple[DoorSpec, ...]
    stack_doors: Tuple[DoorSpec, ...]
    max_strip_doors: int
    max_stack_doors: int
    distance: np.ndarray
    outsourcing_penalty: float
    scenarios: Tuple[Scenario, ...]
    name: str = ""
    # per-scenario cost tensors; not data, so outside init, repr and comparison
    _cost_tensors: Dict[int, np.ndarray] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "strip_doors", tuple(self.strip_doors))
        object.__setattr__(self, "stack_doors", tuple(self.stack_doors))
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        distance = _frozen_array(self.distance, "distance").reshape(
            len(self.strip_doors), len(self.stack_doors)) if np.size(self.distance) else \
            np.zeros((len(self.strip_doors), len(self.stack_doors)))
        object.__setattr__(self, "distance", distance)
        self._validate()

    def _validate(self) -> None:
        tol = get_model_config().weight_tolerance
        if self.max_strip_doors < 1 or self.max_stack_doors < 1:
            raise InvalidInstanceError(
                "Door upper bounds must be at least 1",
                max_strip_doors=self.max_strip_doors, max_stack_doors=self.max_stack_doors)
        if np.any(self.distance < 0):
            raise InvalidInstanceError("Distances must be nonnegative")
        if self.outsourcing_penalty <= 0:
            raise InvalidInstanceError(
                "Outsourcing penalty must be positive", outsourcing_penalty=self.outsourcing_penalty)
        if self.scenarios:
            total = math.fsum(s.weight for s in self.scenarios)
            if abs(total - 1.0) > tol:
                raise InvalidInstanceError("Scenario weights must sum to 1", weight_sum=total)
        for w, scen in enumerate(self.scenarios):
            if scen.strip_disruption.size != self.n_strip or scen.stack_disruption.size != self.n_stack:
                raise InvalidInstanceError(
                    "Disruption vectors must have one entry per door", scenario=w)

    # ----- sizes -----

    @property
    def n_strip(self) -> int:
        return len(self.strip_doors)

    @property
    def n_stack(self) -> int:
        return len(self.stack_doors)

    @property
    def n_scenarios(self) -> int:
        return len(self.scenarios)

    @property
    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.scenarios])

    # ----- eligibility -----

    @cached_property
    def _eligibility(self) -> List[Tuple[Tuple[FrozenSet[int], ...], Tuple[FrozenSet[int], ...]]]:
        strip_top = np.array([d.max_capacity for d in self.strip_doors])
        stack_top = np.array([d.max_capacity for d in self.stack_doors])
        tol = get_model_config().capacity_tolerance
        result = []
        for scen in self.scenarios:
            strip_net = (1.0 - scen.strip_disruption) * strip_top
            stack_net = (1.0 - scen.stack_disruption) * stack_top
            strip_sets = tuple(
                frozenset(int(i) + 1 for i in np.flatnonzero(load <= strip_net + tol))
                for load in scen.origin_totals)
            stack_sets = tuple(
                frozenset(int(j) + 1 for j in np.flatnonzero(load <= stack_net + tol))
                for load in scen.destination_totals)
            result.append((strip_sets, stack_sets))
        return result

    def eligible_strip_doors(self, m: int, w: int) -> FrozenSet[int]:
        """I_m^w: strip doors whose largest net capacity admits origin m's full load"""
        return self._eligibility[w][0][m]

    def eligible_stack_doors(self, n: int, w: int) -> FrozenSet[int]:
        """J_n^w: stack doors whose largest net capacity admits destination n's full load"""
        return self._eligibility[w][1][n]

    # ----- costs -----

    def operational_cost(self, i: int, m: int, n: int, j: int, w: int) -> float:
        """G_minj^w; the outsourcing branch applies when i = 0 or j = 0"""
        h = float(self.scenarios[w].dense_flow[m, n])
        if i == 0 or j == 0:
            return self.outsourcing_penalty * h
        return float(self.distance[i - 1, j - 1]) * h

    def cost_tensor(self, w: int) -> np.ndarray:
        """G^w as an array indexed [m, i, n, j] with door 0 = outsourcing"""
        cache = self._cost_tensors
        if w not in cache:
            flow = self.scenarios[w].dense_flow
            door_cost = np.full((self.n_strip + 1, self.n_stack + 1), self.outsourcing_penalty)
            door_cost[1:, 1:] = self.distance
            tensor = flow[:, None, :, None] * door_cost[None, :, None, :]
            tensor.setflags(write=False)
            cache[w] = tensor
        return cache[w]

    @property
    def total_flow(self) -> float:
        return math.fsum(float(s.flow.sum()) for s in self.scenarios)

    # ----- derived instances -----

    def with_scenarios(self, indices: Sequence[int], renormalize: bool = True) -> "Instance":
        """Instance restricted to the given scenarios"""
        chosen = [self.scenarios[w] for w in indices]
        if renormalize and chosen:
            mass = math.fsum(s.weight for s in chosen)
            chosen = [s.with_weight(s.weight / mass) for s in chosen]
        return dataclasses.replace(self, scenarios=tuple(chosen))

    def with_outsourcing_penalty(self, value: float) -> "Instance":
        """Same data with a new F0; level-0 install costs follow F0"""

        def rebase(doors: Sequence[DoorSpec]) -> Tuple[DoorSpec, ...]:
            return tuple(DoorSpec(d.capacities, np.r_[value, d.install_costs[1:]]) for d in doors)

        return dataclasses.replace(
            self, outsourcing_penalty=float(value),
            strip_doors=rebase(self.strip_doors), stack_doors=rebase(self.stack_doors))

    # ----- serialization -----

    def to_json(self) -> str:
        # Lazy import to avoid circular import issues
        from .io import canonical_json
        return canonical_json(self)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        import json
        from .io import instance_from_dict
        return instance_from_dict(json.loads(text))

    def instance_hash(self) -> str:
        from .io import instance_hash
        return instance_hash(self)

    def node_range(self) -> Tuple[str, str]:
        """'min-max' origin and destination counts over the scenarios"""
        if not self.scenarios:
            return "0-0", "0-0"
        origins = [s.n_origins for s in self.scenarios]
        destinations = [s.n_destinations for s in self.scenarios]
        return f"{min(origins)}-{max(origins)}", f"{min(destinations)}-{max(destinations)}"


def build_instance(strip_doors: Sequence[DoorSpec], stack_doors: Sequence[DoorSpec],
                   distance, scenarios: Sequence[Scenario], max_strip_doors: Optional[int] = None,
                   max_stack_doors: Optional[int] = None, outsourcing_penalty: Optional[float] = None,
                   name: str = "") -> Instance:
    """Assemble an instance, filling F0 and the level-0 costs by the default rule"""
    distance = np.asarray(distance, dtype=np.float64).reshape(len(strip_doors), len(stack_doors))
    penalty = outsourcing_penalty if outsourcing_penalty is not None else \
        default_outsourcing_penalty(strip_doors, stack_doors, distance, scenarios)
    instance = Instance(
        strip_doors=tuple(strip_doors),
        stack_doors=tuple(stack_doors),
        max_strip_doors=max_strip_doors if max_strip_doors is not None else len(strip_doors),
        max_stack_doors=max_stack_doors if max_stack_doors is not None else len(stack_doors),
        distance=distance,
        outsourcing_penalty=penalty,
        scenarios=tuple(scenarios),
        name=name,
    )
    return instance.with_outsourcing_penalty(penalty)
