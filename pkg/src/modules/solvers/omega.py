"""
modules/solvers/omega.py
Second-stage scenario submodels with the first-stage design fixed

Each submodel is a capacitated door assignment problem with a quadratic
(distance x flow) objective. Two solvers are provided: an exact depth-first
branch and bound with the semi-assignment bound, and a local search
heuristic (greedy construction, then shift/swap descent with restarts).
"""
import math
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.model import FirstStageDesign, Instance, ScenarioAssignment
from core.utils.config import get_model_config, get_solver_config
from core.utils.logging import log_solve
from .result import SolveResult, SolveStatus


@dataclass(frozen=True, eq=False)
class OmegaSubmodel:
    """One scenario with fixed net door capacities"""

    instance: Instance
    scenario: int
    strip_capacity: np.ndarray
    stack_capacity: np.ndarray
    design: Optional[FirstStageDesign] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        strip = np.maximum(np.asarray(self.strip_capacity, dtype=np.float64), 0.0)
        stack = np.maximum(np.asarray(self.stack_capacity, dtype=np.float64), 0.0)
        object.__setattr__(self, "strip_capacity", strip)
        object.__setattr__(self, "stack_capacity", stack)

    @classmethod
    def from_design(cls, instance: Instance, w: int, design: FirstStageDesign) -> "OmegaSubmodel":
        """Net capacities (1 - D) * S of the selected levels; 0 for doors without one"""
        scen = instance.scenarios[w]
        strip = np.array([design.strip_capacity(instance, i) for i in range(1, instance.n_strip + 1)])
        stack = np.array([design.stack_capacity(instance, j) for j in range(1, instance.n_stack + 1)])
        return cls(instance, w, (1.0 - scen.strip_disruption) * strip,
                   (1.0 - scen.stack_disruption) * stack, design)

    # ----- data views -----

    @cached_property
    def flow(self) -> np.ndarray:
        return self.instance.scenarios[self.scenario].dense_flow

    @property
    def origin_loads(self) -> np.ndarray:
        return self.instance.scenarios[self.scenario].origin_totals

    @property
    def destination_loads(self) -> np.ndarray:
        return self.instance.scenarios[self.scenario].destination_totals

    @property
    def n_origins(self) -> int:
        return self.flow.shape[0]

    @property
    def n_destinations(self) -> int:
        return self.flow.shape[1]

    @property
    def penalty(self) -> float:
        return self.instance.outsourcing_penalty

    @cached_property
    def door_cost(self) -> np.ndarray:
        """Unit cost per (strip door, stack door); row/column 0 is outsourcing"""
        cost = np.full((self.instance.n_strip + 1, self.instance.n_stack + 1), self.penalty)
        cost[1:, 1:] = self.instance.distance
        return cost

    @cached_property
    def strip_domains(self) -> List[List[int]]:
        """Doors each origin may use: eligible and with room for its load"""
        tol = get_model_config().capacity_tolerance
        loads = self.origin_loads
        return [[0] + [i for i in sorted(self.instance.eligible_strip_doors(m, self.scenario))
                       if self.strip_capacity[i - 1] + tol >= loads[m]]
                for m in range(self.n_origins)]

    @cached_property
    def stack_domains(self) -> List[List[int]]:
        tol = get_model_config().capacity_tolerance
        loads = self.destination_loads
        return [[0] + [j for j in sorted(self.instance.eligible_stack_doors(n, self.scenario))
                       if self.stack_capacity[j - 1] + tol >= loads[n]]
                for n in range(self.n_destinations)]

    # ----- evaluation -----

    def value(self, x: Sequence[int], y: Sequence[int]) -> float:
        """F0 * (flags) + sum of h * cost over the assigned pairs"""
        x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
        flags = int(np.any(x == 0)) + int(np.any(y == 0))
        coo = self.instance.scenarios[self.scenario].flow.tocoo()
        rates = self.door_cost[x[coo.row], y[coo.col]]
        return self.penalty * flags + math.fsum((rates * coo.data).tolist())

    def is_feasible(self, x: Sequence[int], y: Sequence[int]) -> bool:
        tol = get_model_config().capacity_tolerance
        for doors, loads, capacity, domains in (
                (x, self.origin_loads, self.strip_capacity, self.strip_domains),
                (y, self.destination_loads, self.stack_capacity, self.stack_domains)):
            used = np.zeros(capacity.size + 1)
            for node, door in enumerate(doors):
                if door not in domains[node]:
                    return False
                used[door] += loads[node]
            if np.any(used[1:] > capacity + tol):
                return False
        return True

    def assignment(self, x: Sequence[int], y: Sequence[int]) -> ScenarioAssignment:
        return ScenarioAssignment.from_maps([int(d) for d in x], [int(d) for d in y])

    @property
    def size(self) -> int:
        """|M| * |I|, the exact/heuristic switch"""
        return self.n_origins * self.instance.n_strip


# ---------------------------------------------------------------------------
# local search heuristic
# ---------------------------------------------------------------------------

class _LocalSearch:
    """Greedy construction plus first-improvement shift/swap descent"""

    def __init__(self, sub: OmegaSubmodel):
        self.sub = sub
        self.H = sub.flow
        self.C = sub.door_cost
        self.tol = get_model_config().capacity_tolerance
        self.S = sub.origin_loads
        self.R = sub.destination_loads

    def construct(self, rng: Optional[np.random.Generator]) -> Tuple[np.ndarray, np.ndarray]:
        sub, H, C = self.sub, self.H, self.C
        x = np.full(sub.n_origins, -1)
        y = np.full(sub.n_destinations, -1)
        remaining_strip = sub.strip_capacity.copy()
        remaining_stack = sub.stack_capacity.copy()

        # optimistic per-destination unit cost for every strip door
        best_stack = np.array([[C[i, sub.stack_domains[n]].min() for n in range(sub.n_destinations)]
                               for i in range(C.shape[0])])

        def priority(loads: np.ndarray) -> np.ndarray:
            keys = loads if rng is None else loads * rng.uniform(0.75, 1.25, size=loads.size)
            return np.argsort(-keys, kind="stable")

        for m in priority(self.S):
            choice, choice_cost = 0, H[m] @ best_stack[0] + sub.penalty
            for i in sub.strip_domains[m][1:]:
                if remaining_strip[i - 1] + self.tol < self.S[m]:
                    continue
                cost = H[m] @ best_stack[i]
                if cost < choice_cost:
                    choice, choice_cost = i, cost
            x[m] = choice
            if choice:
                remaining_strip[choice - 1] -= self.S[m]

        for n in priority(self.R):
            column = H[:, n]
            choice, choice_cost = 0, column @ C[x, 0] + sub.penalty
            for j in sub.stack_domains[n][1:]:
                if remaining_stack[j - 1] + self.tol < self.R[n]:
                    continue
                cost = column @ C[x, j]
                if cost < choice_cost:
                    choice, choice_cost = j, cost
            y[n] = choice
            if choice:
                remaining_stack[choice - 1] -= self.R[n]
        return x, y

    def _side(self, origins: bool, x: np.ndarray, y: np.ndarray):
        sub = self.sub
        if origins:
            return x, self.S, sub.strip_capacity, sub.strip_domains, lambda node, a, b: \
                self.H[node] @ (self.C[b, y] - self.C[a, y])
        return y, self.R, sub.stack_capacity, sub.stack_domains, lambda node, a, b: \
            self.H[:, node] @ (self.C[x, b] - self.C[x, a])

    def _improve_side(self, origins: bool, x: np.ndarray, y: np.ndarray) -> bool:
        doors, loads, capacity, domains, delta_of = self._side(origins, x, y)
        used = np.zeros(capacity.size + 1)
        np.add.at(used, doors, loads)
        penalty = self.sub.penalty
        improved = False

        # shift moves
        for node in range(doors.size):
            a = doors[node]
            zeros = int(np.count_nonzero(doors == 0))
            for b in domains[node]:
                if b == a or (b and used[b] + loads[node] > capacity[b - 1] + self.tol):
                    continue
                flag = (-penalty if a == 0 and zeros == 1 else 0.0) + (penalty if b == 0 and zeros == 0 else 0.0)
                if delta_of(node, a, b) + flag < -1e-9:
                    doors[node] = b
                    used[a] -= loads[node]
                    used[b] += loads[node]
                    improved = True
                    break

        # swap moves
        for first in range(doors.size):
            for second in range(first + 1, doors.size):
                a, b = doors[first], doors[second]
                if a == b or b not in domains[first] or a not in domains[second]:
                    continue
                shift = loads[second] - loads[first]
                if b and used[b] - shift > capacity[b - 1] + self.tol:
                    continue
                if a and used[a] + shift > capacity[a - 1] + self.tol:
                    continue
                gain = delta_of(first, a, b) + delta_of(second, b, a)
                if gain < -1e-9:
                    doors[first], doors[second] = b, a
                    used[a] += shift
                    used[b] -= shift
                    improved = True
        return improved

    def descend(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        while True:
            improved = self._improve_side(True, x, y)
            improved = self._improve_side(False, x, y) or improved
            if not improved:
                return x, y


def solve_omega_lsh(sub: OmegaSubmodel, seed: Optional[int] = 0,
                    restarts: Optional[int] = None) -> SolveResult:
    """Heuristic solve; the first restart is the deterministic greedy order"""
    start = time.perf_counter()
    restarts = get_solver_config().lsh_restarts if restarts is None else max(1, restarts)
    rng = np.random.default_rng(seed)
    search = _LocalSearch(sub)
    best: Optional[Tuple[float, np.ndarray, np.ndarray]] = None
    for attempt in range(restarts):
        x, y = search.construct(None if attempt == 0 else rng)
        x, y = search.descend(x, y)
        value = sub.value(x, y)
        if best is None or value < best[0] - 1e-9:
            best = (value, x.copy(), y.copy())
    value, x, y = best
    seconds = time.perf_counter() - start
    log_solve(f"lsh[w{sub.scenario}]", SolveStatus.FEASIBLE.value, value, None, seconds)
    return SolveResult(SolveStatus.FEASIBLE, value, None, (tuple(x), tuple(y)),
                       nodes=restarts, seconds=seconds, assignment=sub.assignment(x, y))


# ---------------------------------------------------------------------------
# exact search
# ---------------------------------------------------------------------------

class _ExactSearch:
    """Depth-first search over node-to-door choices"""

    def __init__(self, sub: OmegaSubmodel, node_limit: int, deadline: Optional[float]):
        self.sub = sub
        self.C = sub.door_cost
        self.penalty = sub.penalty
        self.tol = get_model_config().capacity_tolerance
        self.node_limit = node_limit
        self.deadline = deadline
        self.nodes = 0
        self.limit_hit = False

        H = sub.flow
        rows, cols = np.nonzero(H)
        self.pairs = [(int(m), int(n), float(H[m, n])) for m, n in zip(rows, cols)]
        self.origin_pairs: List[List[int]] = [[] for _ in range(sub.n_origins)]
        self.destination_pairs: List[List[int]] = [[] for _ in range(sub.n_destinations)]
        for p, (m, n, _) in enumerate(self.pairs):
            self.origin_pairs[m].append(p)
            self.destination_pairs[n].append(p)

        # per pair: cheapest rate with neither, only the strip, only the stack endpoint fixed
        self.free_rate, self.strip_rate, self.stack_rate = [], [], []
        for m, n, _ in self.pairs:
            block = self.C[np.ix_(sub.strip_domains[m], sub.stack_domains[n])]
            self.free_rate.append(float(block.min()))
            self.strip_rate.append(self.C[:, sub.stack_domains[n]].min(axis=1))
            self.stack_rate.append(self.C[sub.strip_domains[m], :].min(axis=0))

        # heaviest nodes first, both sides interleaved by load
        loads = [(float(sub.origin_loads[m]), 0, m) for m in range(sub.n_origins)]
        loads += [(float(sub.destination_loads[n]), 1, n) for n in range(sub.n_destinations)]
        self.order = [(side, node) for _, side, node in sorted(loads, key=lambda t: (-t[0], t[1], t[2]))]

        self.x = np.full(sub.n_origins, -1)
        self.y = np.full(sub.n_destinations, -1)
        self.contribution = [h * r for (_, _, h), r in zip(self.pairs, self.free_rate)]
        self.forced_strip = any(len(d) == 1 for d in sub.strip_domains)
        self.forced_stack = any(len(d) == 1 for d in sub.stack_domains)
        self.best_value = math.inf
        self.best: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def _pair_rate(self, p: int) -> float:
        m, n, _ = self.pairs[p]
        i, j = self.x[m], self.y[n]
        if i >= 0 and j >= 0:
            return self.C[i, j]
        if i >= 0:
            return self.strip_rate[p][i]
        if j >= 0:
            return self.stack_rate[p][j]
        return self.free_rate[p]

    def _flags(self) -> float:
        strip = self.forced_strip or bool(np.any(self.x == 0))
        stack = self.forced_stack or bool(np.any(self.y == 0))
        return self.penalty * (int(strip) + int(stack))

    def root_bound(self) -> float:
        return self._flags() + math.fsum(self.contribution)

    def run(self, incumbent: Optional[Tuple[np.ndarray, np.ndarray]]) -> None:
        if incumbent is not None:
            self.best = (np.asarray(incumbent[0]).copy(), np.asarray(incumbent[1]).copy())
            self.best_value = self.sub.value(*self.best)
        remaining = [self.sub.strip_capacity.copy(), self.sub.stack_capacity.copy()]
        self._dive(0, math.fsum(self.contribution), remaining)

    def _dive(self, depth: int, operational: float, remaining: List[np.ndarray]) -> None:
        if self.limit_hit:
            return
        self.nodes += 1
        if self.nodes >= self.node_limit or (self.deadline is not None and time.perf_counter() > self.deadline):
            self.limit_hit = True
            return
        if depth == len(self.order):
            value = self.sub.value(self.x, self.y)
            if value < self.best_value - 1e-9:
                self.best_value = value
                self.best = (self.x.copy(), self.y.copy())
            return

        side, node = self.order[depth]
        doors = self.x if side == 0 else self.y
        domain = self.sub.strip_domains[node] if side == 0 else self.sub.stack_domains[node]
        pairs = self.origin_pairs[node] if side == 0 else self.destination_pairs[node]
        load = (self.sub.origin_loads if side == 0 else self.sub.destination_loads)[node]
        capacity = remaining[side]

        options = []
        before = [self.contribution[p] for p in pairs]
        for door in domain:
            if door and capacity[door - 1] + self.tol < load:
                continue
            doors[node] = door
            after = [self.pairs[p][2] * self._pair_rate(p) for p in pairs]
            doors[node] = -1
            options.append((operational - sum(before) + sum(after), door, after))
        options.sort(key=lambda t: (t[0], t[1]))

        for new_operational, door, after in options:
            doors[node] = door
            bound = new_operational + self._flags()
            if bound < self.best_value - 1e-9 * max(1.0, abs(self.best_value)):
                for p, value in zip(pairs, after):
                    self.contribution[p] = value
                if door:
                    capacity[door - 1] -= load
                self._dive(depth + 1, new_operational, remaining)
                if door:
                    capacity[door - 1] += load
                for p, value in zip(pairs, before):
                    self.contribution[p] = value
            doors[node] = -1
            if self.limit_hit:
                return


def semi_assignment_bound(sub: OmegaSubmodel) -> float:
    """Lower bound on z2 that ignores shared capacity but keeps per-node room"""
    return _ExactSearch(sub, node_limit=0, deadline=None).root_bound()


def solve_omega_exact(sub: OmegaSubmodel, time_limit: Optional[float] = None,
                      node_limit: Optional[int] = None, seed: Optional[int] = 0) -> SolveResult:
    """Exact solve seeded with one greedy/descent pass"""
    config = get_solver_config()
    start = time.perf_counter()
    time_limit = config.time_limit if time_limit is None else time_limit
    deadline = None if time_limit is None else start + time_limit
    search = _ExactSearch(sub, config.node_limit if node_limit is None else node_limit, deadline)
    root_bound = search.root_bound()
    warm = _LocalSearch(sub)
    search.run(warm.descend(*warm.construct(None)))

    x, y = search.best
    value = search.best_value
    seconds = time.perf_counter() - start
    if search.limit_hit:
        status, bound = SolveStatus.FEASIBLE, min(root_bound, value)
    else:
        status, bound = SolveStatus.OPTIMAL, value
    log_solve(f"exact[w{sub.scenario}]", status.value, value, bound, seconds)
    return SolveResult(status, value, bound, (tuple(x), tuple(y)), nodes=search.nodes,
                       seconds=seconds, assignment=sub.assignment(x, y))


def solve_omega(sub: OmegaSubmodel, threshold: Optional[int] = None, seed: Optional[int] = 0,
                time_limit: Optional[float] = None) -> SolveResult:
    """Exact when |M| * |I| <= threshold, otherwise the local search"""
    threshold = get_solver_config().omega_exact_threshold if threshold is None else threshold
    if sub.size <= threshold:
        return solve_omega_exact(sub, time_limit=time_limit, seed=seed)
    return solve_omega_lsh(sub, seed=seed)
