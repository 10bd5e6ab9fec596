"""
modules/testbed/generator.py
Basic scenario cluster (BSC) instances and their merging

One BSC instance holds one scenario per slack percentage. Every scenario
draws its own flow matrix; the first-stage capacity ladder is shared by all
doors and scaled to the scenario with the largest base capacity, while
smaller scenarios see a uniform disruption D = 1 - base / B.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from core.model import DoorSpec, Instance, Scenario, build_instance
from core.utils.config import get_model_config, get_testbed_config
from core.utils.exceptions import InvalidInstanceError, MergeError
from core.utils.logging import get_logger


def _testbed_default(name: str):
    return field(default_factory=lambda: getattr(get_testbed_config(), name))


@dataclass(frozen=True)
class BscSpec:
    """Parameters of one BSC instance |M| x |I| S"""

    n_nodes: int
    n_doors: int
    seed: Optional[int] = None
    slack_set: Tuple[int, ...] = _testbed_default("slack_set")
    density: float = _testbed_default("density")
    flow_range: Tuple[int, int] = _testbed_default("flow_range")
    n_levels: int = _testbed_default("n_levels")
    cost_factor: float = _testbed_default("cost_factor")
    door_offset: int = 1
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "slack_set", tuple(int(s) for s in self.slack_set))
        object.__setattr__(self, "flow_range", tuple(int(v) for v in self.flow_range))
        if self.n_nodes < 1 or self.n_doors < 1:
            raise InvalidInstanceError(
                "A BSC needs at least one node and one door",
                n_nodes=self.n_nodes, n_doors=self.n_doors)
        if not self.slack_set:
            raise InvalidInstanceError("slack_set must not be empty")
        if not 0 < self.density <= 1:
            raise InvalidInstanceError("density must lie in (0, 1]", density=self.density)
        low, high = self.flow_range
        if low > high or low < 0:
            raise InvalidInstanceError("flow_range must satisfy 0 <= low <= high", flow_range=self.flow_range)
        if self.n_levels < 1:
            raise InvalidInstanceError("At least one capacity level is required", n_levels=self.n_levels)

    @property
    def label(self) -> str:
        return self.name or f"{self.n_nodes}x{self.n_doors}S"


@dataclass(frozen=True)
class MergeSpec:
    """How member BSC instances are combined"""

    members: Tuple[BscSpec, ...] = ()
    n_levels: int = _testbed_default("n_levels")
    cost_factor: float = _testbed_default("cost_factor")
    door_offset: int = 1
    name: str = ""


def balanced_pattern(rng: np.random.Generator, n_rows: int, n_cols: int,
                     nnz: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nonzero positions with every row and column count within one of the mean.

    Positions are (m, (perm[m] + shift) mod N) for distinct random shifts;
    the last shift covers only the remaining rows.
    """
    nnz = int(min(max(nnz, 0), n_rows * n_cols))
    if nnz == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if n_rows > n_cols:
        cols, rows = balanced_pattern(rng, n_cols, n_rows, nnz)
        return rows, cols
    full, rest = divmod(nnz, n_rows)
    shifts = rng.choice(n_cols, size=full + (1 if rest else 0), replace=False)
    perm = rng.permutation(n_cols)[:n_rows]
    rows, cols = [], []
    for t, shift in enumerate(shifts):
        chosen = np.arange(n_rows) if t < full else np.sort(rng.choice(n_rows, size=rest, replace=False))
        rows.append(chosen)
        cols.append((perm[chosen] + shift) % n_cols)
    return np.concatenate(rows), np.concatenate(cols)


def _scenario_flow(rng: np.random.Generator, spec: BscSpec) -> sp.csr_matrix:
    n = spec.n_nodes
    nnz = int(round(spec.density * n * n))
    rows, cols = balanced_pattern(rng, n, n, nnz)
    low, high = spec.flow_range
    values = rng.integers(low, high, size=rows.size, endpoint=True).astype(np.float64)
    return sp.csr_matrix((values, (rows, cols)), shape=(n, n))


def distance_matrix(n_strip: int, n_stack: int) -> np.ndarray:
    """E_ij = 8 + |i - j|, clipped to [8, 8 + |I| - 1]"""
    i = np.arange(1, n_strip + 1)[:, None]
    j = np.arange(1, n_stack + 1)[None, :]
    return np.minimum(8.0 + np.abs(i - j), 8.0 + max(n_strip, 1) - 1)


def level_ladder(base_capacity: float, n_levels: int) -> np.ndarray:
    """Capacities base * (ladder_base + ladder_step * k) for k = 1..n_levels"""
    config = get_testbed_config()
    k = np.arange(1, n_levels + 1)
    return base_capacity * (config.ladder_base + config.ladder_step * k)


def _door(ladder: np.ndarray, cost_factor: float) -> DoorSpec:
    basic_level = min(max(get_model_config().basic_capacity_level, 1), ladder.size)
    capacities = np.r_[ladder[basic_level - 1], ladder]
    # level-0 cost is replaced by F0 when the instance is assembled
    return DoorSpec(capacities, cost_factor * capacities)


def eligibility_upscale(ladders: Sequence[np.ndarray], strip_disruption: Sequence[np.ndarray],
                        stack_disruption: Sequence[np.ndarray], scenarios: Sequence[sp.csr_matrix],
                        n_strip: int) -> float:
    """Smallest factor >= 1 giving every node of every scenario an eligible door"""
    top = np.array([ladder.max() for ladder in ladders])
    factor = 1.0
    for flow, d_strip, d_stack in zip(scenarios, strip_disruption, stack_disruption):
        sides = (
            (np.asarray(flow.sum(axis=1)).ravel(), (1.0 - d_strip) * top[:n_strip]),
            (np.asarray(flow.sum(axis=0)).ravel(), (1.0 - d_stack) * top[n_strip:]),
        )
        for loads, net in sides:
            positive = net[net > 0]
            if positive.size == 0:
                continue
            best = positive.max()
            factor = max(factor, float(loads.max(initial=0.0)) / best)
    return factor


def generate_bsc(spec: BscSpec) -> Instance:
    """One scenario per slack value, uniform weights, shared capacity ladder"""
    rng = np.random.default_rng(spec.seed)
    n_doors = spec.n_doors
    flows = [_scenario_flow(rng, spec) for _ in spec.slack_set]
    totals = [float(f.sum()) for f in flows]
    bases = [total / (2 * n_doors) + (slack / 100.0) * total
             for total, slack in zip(totals, spec.slack_set)]
    top_base = max(bases) if max(bases) > 0 else 1.0
    disruptions = [np.full(n_doors, 1.0 - base / top_base) for base in bases]

    ladder = level_ladder(top_base, spec.n_levels)
    factor = eligibility_upscale([ladder] * (2 * n_doors), disruptions, disruptions, flows, n_doors)
    ladder = ladder * factor

    weight = 1.0 / len(spec.slack_set)
    scenarios = [
        Scenario(weight, flow, d, d.copy(), name=f"{spec.label}_s{slack}")
        for flow, d, slack in zip(flows, disruptions, spec.slack_set)
    ]
    doors = [_door(ladder, spec.cost_factor) for _ in range(n_doors)]
    instance = build_instance(
        strip_doors=doors,
        stack_doors=list(doors),
        distance=distance_matrix(n_doors, n_doors),
        scenarios=scenarios,
        max_strip_doors=n_doors + spec.door_offset,
        max_stack_doors=n_doors + spec.door_offset,
        name=spec.label,
    )
    get_logger().audit_instance("generate", {
        "name": instance.name, "seed": spec.seed, "scenarios": instance.n_scenarios,
        "doors": n_doors, "upscale": round(factor, 6)})
    return instance


def _member_ladders(member: Instance, side: str) -> List[np.ndarray]:
    doors = member.strip_doors if side == "strip" else member.stack_doors
    return [np.asarray(d.capacities[1:]) for d in doors]


def merge_bsc(merge_spec: MergeSpec, members: Sequence[Instance]) -> Instance:
    """
    Union of the members' scenarios over the largest door sets.

    A scenario inherited from a member with fewer doors is fully disrupted
    (D = 1) on the doors its member lacks.
    """
    if not members:
        raise MergeError("Nothing to merge")
    for position, member in enumerate(members):
        for door in member.strip_doors + member.stack_doors:
            if door.n_levels != merge_spec.n_levels:
                raise MergeError(
                    "Members must share the number of capacity levels",
                    member=member.name or position, levels=door.n_levels,
                    expected=merge_spec.n_levels)

    n_strip = max(m.n_strip for m in members)
    n_stack = max(m.n_stack for m in members)

    def merged_ladders(side: str, count: int) -> List[np.ndarray]:
        ladders: List[Optional[np.ndarray]] = [None] * count
        for member in members:
            for d, ladder in enumerate(_member_ladders(member, side)):
                ladders[d] = ladder.copy() if ladders[d] is None else np.maximum(ladders[d], ladder)
        return [ladder for ladder in ladders if ladder is not None]

    strip_ladders = merged_ladders("strip", n_strip)
    stack_ladders = merged_ladders("stack", n_stack)

    flows, strip_d, stack_d, names, weights = [], [], [], [], []
    for member in members:
        for scen in member.scenarios:
            flows.append(scen.flow)
            strip_d.append(np.r_[scen.strip_disruption, np.ones(n_strip - member.n_strip)])
            stack_d.append(np.r_[scen.stack_disruption, np.ones(n_stack - member.n_stack)])
            names.append(scen.name)
            weights.append(scen.weight)

    factor = eligibility_upscale(strip_ladders + stack_ladders, strip_d, stack_d, flows, n_strip)
    mass = math.fsum(weights)
    scenarios = [
        Scenario(w / mass, flow, ds, dt, name=name)
        for w, flow, ds, dt, name in zip(weights, flows, strip_d, stack_d, names)
    ]
    name = merge_spec.name or "+".join(m.name for m in members)
    instance = build_instance(
        strip_doors=[_door(ladder * factor, merge_spec.cost_factor) for ladder in strip_ladders],
        stack_doors=[_door(ladder * factor, merge_spec.cost_factor) for ladder in stack_ladders],
        distance=distance_matrix(n_strip, n_stack),
        scenarios=scenarios,
        max_strip_doors=n_strip + merge_spec.door_offset,
        max_stack_doors=n_stack + merge_spec.door_offset,
        name=name,
    )
    get_logger().audit_instance("merge", {
        "name": name, "members": len(members), "scenarios": instance.n_scenarios,
        "doors": (n_strip, n_stack), "upscale": round(factor, 6)})
    return instance


def table1_row(instance: Instance) -> Tuple[int, int, int, str, str]:
    """(|Omega|, |I|, |J|, origin range, destination range)"""
    origins, destinations = instance.node_range()
    return instance.n_scenarios, instance.n_strip, instance.n_stack, origins, destinations
