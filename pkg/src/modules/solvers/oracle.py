"""
modules/solvers/oracle.py
Exact whole-instance searches on the binary quadratic model

brute_force_oracle enumerates everything and is meant for verification on
tiny instances. solve_bq_bb enumerates first-stage designs depth-first,
prunes with install cost plus per-scenario bounds and solves every leaf
scenario with the exact ω-search.
"""
import itertools
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.model import FirstStageDesign, Instance, ScenarioAssignment, evaluate_solution
from core.utils.config import get_model_config, get_solver_config
from core.utils.exceptions import SearchSpaceTooLargeError
from core.utils.logging import get_logger, log_solve
from .omega import OmegaSubmodel, semi_assignment_bound, solve_omega_exact
from .result import SolveResult, SolveStatus


def _level_choices(instance: Instance) -> Tuple[List[range], List[range]]:
    """Per door: 0 = not installed, else the level 1..|K|"""
    return ([range(door.n_levels + 1) for door in instance.strip_doors],
            [range(door.n_levels + 1) for door in instance.stack_doors])


def _designs(instance: Instance):
    strip_choices, stack_choices = _level_choices(instance)
    strip_vectors = [v for v in itertools.product(*strip_choices)
                     if sum(1 for k in v if k) <= instance.max_strip_doors]
    stack_vectors = [v for v in itertools.product(*stack_choices)
                     if sum(1 for k in v if k) <= instance.max_stack_doors]
    for strip in strip_vectors:
        for stack in stack_vectors:
            yield FirstStageDesign({i + 1: k for i, k in enumerate(strip) if k},
                                   {j + 1: k for j, k in enumerate(stack) if k})


def _node_options(instance: Instance, w: int) -> Tuple[List[List[int]], List[List[int]]]:
    scen = instance.scenarios[w]
    strip = [[0] + sorted(instance.eligible_strip_doors(m, w)) for m in range(scen.n_origins)]
    stack = [[0] + sorted(instance.eligible_stack_doors(n, w)) for n in range(scen.n_destinations)]
    return strip, stack


def search_space_size(instance: Instance) -> float:
    """Designs times the summed per-scenario assignment combinations"""
    strip_choices, stack_choices = _level_choices(instance)
    designs = math.prod(len(r) for r in strip_choices) * math.prod(len(r) for r in stack_choices)
    per_design = 0.0
    for w in range(instance.n_scenarios):
        strip, stack = _node_options(instance, w)
        per_design += math.prod(len(o) for o in strip) * math.prod(len(o) for o in stack)
    return float(designs) * max(per_design, 1.0)


class _ScenarioTable:
    """All assignments of one scenario with their loads and z2 values"""

    def __init__(self, instance: Instance, w: int):
        scen = instance.scenarios[w]
        strip, stack = _node_options(instance, w)
        xs, ys = list(itertools.product(*strip)), list(itertools.product(*stack))
        self.X = np.array(xs, dtype=np.int64).reshape(len(xs), scen.n_origins)
        self.Y = np.array(ys, dtype=np.int64).reshape(len(ys), scen.n_destinations)
        self.strip_load = np.zeros((self.X.shape[0], instance.n_strip + 1))
        for m in range(scen.n_origins):
            np.add.at(self.strip_load, (np.arange(self.X.shape[0]), self.X[:, m]), scen.origin_totals[m])
        self.stack_load = np.zeros((self.Y.shape[0], instance.n_stack + 1))
        for n in range(scen.n_destinations):
            np.add.at(self.stack_load, (np.arange(self.Y.shape[0]), self.Y[:, n]), scen.destination_totals[n])

        penalty = instance.outsourcing_penalty
        rates = np.full((instance.n_strip + 1, instance.n_stack + 1), penalty)
        rates[1:, 1:] = instance.distance
        table = np.zeros((self.X.shape[0], self.Y.shape[0]))
        coo = scen.flow.tocoo()
        for m, n, h in zip(coo.row, coo.col, coo.data):
            table += h * rates[self.X[:, m][:, None], self.Y[:, n][None, :]]
        table += penalty * np.any(self.X == 0, axis=1)[:, None]
        table += penalty * np.any(self.Y == 0, axis=1)[None, :]
        self.table = table
        self.strip_disruption = scen.strip_disruption
        self.stack_disruption = scen.stack_disruption

    def best(self, instance: Instance, design: FirstStageDesign) -> Tuple[float, ScenarioAssignment]:
        tol = get_model_config().capacity_tolerance
        strip_cap = np.array([design.strip_capacity(instance, i) for i in range(1, instance.n_strip + 1)])
        stack_cap = np.array([design.stack_capacity(instance, j) for j in range(1, instance.n_stack + 1)])
        fits_x = np.all(self.strip_load[:, 1:] <= (1.0 - self.strip_disruption) * strip_cap + tol, axis=1)
        fits_y = np.all(self.stack_load[:, 1:] <= (1.0 - self.stack_disruption) * stack_cap + tol, axis=1)
        rows, cols = np.flatnonzero(fits_x), np.flatnonzero(fits_y)
        block = self.table[np.ix_(rows, cols)]
        a, b = np.unravel_index(int(np.argmin(block)), block.shape)
        x, y = self.X[rows[a]], self.Y[cols[b]]
        return float(block[a, b]), ScenarioAssignment.from_maps([int(d) for d in x], [int(d) for d in y])


def brute_force_oracle(instance: Instance, max_leaves: Optional[float] = None) -> SolveResult:
    """Exhaustive optimum of the binary quadratic model"""
    cap = get_solver_config().oracle_max_leaves if max_leaves is None else max_leaves
    estimate = search_space_size(instance)
    if estimate > cap:
        raise SearchSpaceTooLargeError(estimate, cap)

    start = time.perf_counter()
    tables = [_ScenarioTable(instance, w) for w in range(instance.n_scenarios)]
    weights = instance.weights
    best_value = math.inf
    best: Optional[Tuple[FirstStageDesign, List[ScenarioAssignment]]] = None
    designs = 0
    for design in _designs(instance):
        designs += 1
        value = design.install_cost(instance)
        assignments = []
        for w, table in enumerate(tables):
            z2, assignment = table.best(instance, design)
            value += weights[w] * z2
            assignments.append(assignment)
        if value < best_value:
            best_value, best = value, (design, assignments)

    design, assignments = best
    total = evaluate_solution(instance, design, assignments).total
    seconds = time.perf_counter() - start
    log_solve("oracle", SolveStatus.OPTIMAL.value, total, total, seconds)
    return SolveResult(SolveStatus.OPTIMAL, total, total, nodes=designs, seconds=seconds,
                       design=design, assignments=assignments)


def _net_capacities(instance: Instance, w: int, strip_levels: Sequence[Optional[int]],
                    stack_levels: Sequence[Optional[int]]) -> Tuple[np.ndarray, np.ndarray]:
    """None = undecided, taken at the top level"""
    scen = instance.scenarios[w]

    def gross(doors, levels) -> np.ndarray:
        return np.array([door.capacities[1:].max() if k is None else (door.capacities[k] if k else 0.0)
                         for door, k in zip(doors, levels)])

    return ((1.0 - scen.strip_disruption) * gross(instance.strip_doors, strip_levels),
            (1.0 - scen.stack_disruption) * gross(instance.stack_doors, stack_levels))


def solve_bq_bb(instance: Instance, time_limit: Optional[float] = None,
                node_limit: Optional[int] = None) -> SolveResult:
    """Depth-first design enumeration with exact scenario solves at the leaves"""
    config = get_solver_config()
    time_limit = config.time_limit if time_limit is None else time_limit
    node_limit = config.node_limit if node_limit is None else node_limit
    start = time.perf_counter()
    deadline = None if time_limit is None else start + time_limit
    weights = instance.weights
    n_strip, n_stack = instance.n_strip, instance.n_stack
    doors = [(0, d) for d in range(n_strip)] + [(1, d) for d in range(n_stack)]
    strip_levels: List[Optional[int]] = [None] * n_strip
    stack_levels: List[Optional[int]] = [None] * n_stack

    cache: Dict[Tuple[int, Tuple[float, ...], Tuple[float, ...]], SolveResult] = {}
    state = {"nodes": 0, "limited": False, "proven": True}
    incumbent: Dict[str, object] = {"value": math.inf, "design": None, "assignments": None}

    def scenario_bound(w: int) -> float:
        strip, stack = _net_capacities(instance, w, strip_levels, stack_levels)
        return semi_assignment_bound(OmegaSubmodel(instance, w, strip, stack))

    def out_of_budget() -> bool:
        return state["nodes"] >= node_limit or (deadline is not None and time.perf_counter() > deadline)

    def leaf(install: float) -> None:
        design = FirstStageDesign({i + 1: k for i, k in enumerate(strip_levels) if k},
                                  {j + 1: k for j, k in enumerate(stack_levels) if k})
        value = install
        rest = [weights[w] * scenario_bound(w) for w in range(instance.n_scenarios)]
        assignments = []
        for w in range(instance.n_scenarios):
            if value + math.fsum(rest[w:]) >= incumbent["value"] - 1e-9:
                return
            sub = OmegaSubmodel.from_design(instance, w, design)
            key = (w, tuple(sub.strip_capacity.tolist()), tuple(sub.stack_capacity.tolist()))
            if key not in cache:
                remaining = None if deadline is None else max(deadline - time.perf_counter(), 1e-3)
                cache[key] = solve_omega_exact(sub, time_limit=remaining)
            result = cache[key]
            if not result.is_optimal:
                state["proven"] = False
            value += weights[w] * result.value
            assignments.append(result.assignment)
        if value < incumbent["value"] - 1e-9:
            incumbent.update(value=value, design=design, assignments=assignments)

    def dive(depth: int, install: float, counts: List[int]) -> None:
        if state["limited"]:
            return
        state["nodes"] += 1
        if out_of_budget():
            state["limited"] = True
            return
        if depth == len(doors):
            leaf(install)
            return
        side, d = doors[depth]
        spec = (instance.strip_doors if side == 0 else instance.stack_doors)[d]
        levels = strip_levels if side == 0 else stack_levels
        upper = instance.max_strip_doors if side == 0 else instance.max_stack_doors
        for k in list(range(spec.n_levels, 0, -1)) + [0]:
            if k and counts[side] >= upper:
                continue
            levels[d] = k
            cost = install + (float(spec.install_costs[k]) if k else 0.0)
            bound = cost + math.fsum(weights[w] * scenario_bound(w) for w in range(instance.n_scenarios))
            if bound < incumbent["value"] - 1e-9:
                counts[side] += 1 if k else 0
                dive(depth + 1, cost, counts)
                counts[side] -= 1 if k else 0
            levels[d] = None
            if state["limited"]:
                return

    root_bound = math.fsum(weights[w] * scenario_bound(w) for w in range(instance.n_scenarios))
    dive(0, 0.0, [0, 0])
    seconds = time.perf_counter() - start

    if incumbent["design"] is None:
        status = SolveStatus.TIMEOUT if state["limited"] else SolveStatus.INFEASIBLE
        result = SolveResult(status, None, root_bound if state["limited"] else None,
                             nodes=state["nodes"], seconds=seconds)
    else:
        design, assignments = incumbent["design"], incumbent["assignments"]
        total = evaluate_solution(instance, design, assignments).total
        if state["limited"] or not state["proven"]:
            get_logger().info(f"BQ search stopped early after {state['nodes']} nodes")
            result = SolveResult(SolveStatus.FEASIBLE, total, min(root_bound, total), nodes=state["nodes"],
                                 seconds=seconds, design=design, assignments=assignments)
        else:
            result = SolveResult(SolveStatus.OPTIMAL, total, total, nodes=state["nodes"], seconds=seconds,
                                 design=design, assignments=assignments)
    log_solve("bq-bb", result.status.value, result.value, result.bound, seconds)
    return result
