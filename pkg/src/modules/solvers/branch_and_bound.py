"""
modules/solvers/branch_and_bound.py
Best-first branch and bound over the binary columns of a GenericMILP

Node relaxations are linear programs solved with scipy's HiGHS backend.
Child relaxations are solved when the child is created, so every open node
carries its own bound and branching column.
"""
import heapq
import itertools
import math
import time
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from core.utils.config import get_solver_config
from core.utils.logging import get_logger, log_solve
from modules.lip.milp import EQ, GE, LE, GenericMILP
from .result import SolveResult, SolveStatus

Fixings = Tuple[Tuple[int, float], ...]


class LinearRelaxation:
    """LP relaxation of a model under changing variable bounds"""

    def __init__(self, milp: GenericMILP):
        self.milp = milp
        matrix = milp.matrix.tocsr()
        le, ge, eq = milp.senses == LE, milp.senses == GE, milp.senses == EQ
        if np.any(le | ge):
            self.A_ub = sp.vstack([matrix[le], -matrix[ge]]).tocsr()
            self.b_ub = np.concatenate([milp.rhs[le], -milp.rhs[ge]])
        else:
            self.A_ub, self.b_ub = None, None
        if np.any(eq):
            self.A_eq, self.b_eq = matrix[eq], milp.rhs[eq]
        else:
            self.A_eq, self.b_eq = None, None

    def solve(self, lower: np.ndarray, upper: np.ndarray,
              time_limit: Optional[float] = None) -> Tuple[str, Optional[float], Optional[np.ndarray]]:
        """('optimal', value, x) | ('infeasible', None, None) | ('unknown', None, None)"""
        if np.any(lower > upper):
            return "infeasible", None, None
        if self.milp.n_vars == 0:
            return "optimal", 0.0, np.zeros(0)
        options = {"time_limit": max(time_limit, 1e-3)} if time_limit is not None else {}
        result = linprog(
            self.milp.objective,
            A_ub=self.A_ub, b_ub=self.b_ub,
            A_eq=self.A_eq, b_eq=self.b_eq,
            bounds=np.column_stack((lower, upper)),
            method="highs",
            options=options,
        )
        if result.status == 0:
            x = np.clip(result.x, lower, upper)
            return "optimal", float(result.fun), x
        if result.status == 2:
            return "infeasible", None, None
        return "unknown", None, None


def choose_branching_column(x: np.ndarray, binary: np.ndarray, objective: np.ndarray,
                            tol: float) -> Optional[int]:
    """Most fractional binary; ties by largest |objective coefficient|"""
    candidates = binary[np.abs(x[binary] - np.round(x[binary])) > tol]
    if candidates.size == 0:
        return None
    closeness = np.minimum(x[candidates], 1.0 - x[candidates])
    order = np.lexsort((-np.abs(objective[candidates]), -closeness))
    return int(candidates[order[0]])


def solve_bb(milp: GenericMILP, time_limit: Optional[float] = None, node_limit: Optional[int] = None,
             initial_solution: Optional[Sequence[float]] = None) -> SolveResult:
    """
    Exact branch and bound; a limit hit returns the incumbent and the best
    open bound (status feasible / bound-only / timeout), never silently.
    """
    config = get_solver_config()
    tol = config.integrality_tolerance
    time_limit = config.time_limit if time_limit is None else time_limit
    node_limit = config.node_limit if node_limit is None else node_limit
    start = time.perf_counter()

    def remaining() -> Optional[float]:
        return None if time_limit is None else time_limit - (time.perf_counter() - start)

    relaxation = LinearRelaxation(milp)
    binary = np.flatnonzero(milp.binary_mask)
    incumbent_value = math.inf
    incumbent: Optional[np.ndarray] = None

    if initial_solution is not None:
        warm = np.asarray(initial_solution, dtype=np.float64)
        if milp.is_feasible(warm, tol):
            incumbent, incumbent_value = warm.copy(), milp.evaluate(warm)
        else:
            get_logger().debug(f"Warm start rejected for {milp.name}")

    def bounds_for(fixings: Fixings) -> Tuple[np.ndarray, np.ndarray]:
        lower, upper = milp.lower.copy(), milp.upper.copy()
        for col, value in fixings:
            lower[col] = upper[col] = value
        return lower, upper

    def evaluate(fixings: Fixings) -> Tuple[str, Optional[float], Optional[int]]:
        """Solve a node LP; integral points update the incumbent"""
        nonlocal incumbent, incumbent_value
        lower, upper = bounds_for(fixings)
        status, value, x = relaxation.solve(lower, upper, remaining())
        if status != "optimal":
            return status, None, None
        col = choose_branching_column(x, binary, milp.objective, tol)
        if col is None:
            point = x.copy()
            point[binary] = np.round(point[binary])
            if milp.is_feasible(point, tol * 10):
                candidate = milp.evaluate(point)
                if candidate < incumbent_value:
                    incumbent, incumbent_value = point, candidate
            else:
                get_logger().debug(f"Rounded node point rejected for {milp.name}")
            return "integral", value, None
        return "branch", value, col

    counter = itertools.count()
    heap: List[Tuple[float, int, int, Fixings, int]] = []
    trace: List[float] = []
    nodes = 0

    root_status, root_value, root_col = evaluate(())
    limit_hit = root_status == "unknown"
    if root_status == "branch":
        heapq.heappush(heap, (root_value, 0, next(counter), (), root_col))

    def global_bound() -> float:
        open_bound = heap[0][0] if heap else math.inf
        return min(open_bound, incumbent_value)

    if root_status in ("branch", "integral"):
        trace.append(global_bound())

    while heap and not limit_hit:
        if nodes >= node_limit or (remaining() is not None and remaining() <= 0):
            limit_hit = True
            break
        bound, negative_depth, _, fixings, col = heapq.heappop(heap)
        if bound >= incumbent_value - 1e-9 * max(1.0, abs(incumbent_value)):
            heap.clear()
            break
        nodes += 1
        for value in (1.0, 0.0):
            child = fixings + ((col, value),)
            status, child_bound, child_col = evaluate(child)
            if status == "unknown":
                # keep the child open with the parent's bound
                heapq.heappush(heap, (bound, negative_depth - 1, next(counter), child, col))
                limit_hit = True
            elif status == "branch":
                heapq.heappush(heap, (max(child_bound, bound), negative_depth - 1, next(counter), child, child_col))
        trace.append(max(global_bound(), trace[-1] if trace else -math.inf))

    seconds = time.perf_counter() - start
    has_incumbent = incumbent is not None
    if not limit_hit or (not heap and root_status != "unknown"):
        if has_incumbent:
            result = SolveResult(SolveStatus.OPTIMAL, incumbent_value, incumbent_value, incumbent,
                                 nodes, seconds, trace)
        else:
            result = SolveResult(SolveStatus.INFEASIBLE, None, None, None, nodes, seconds, trace)
    else:
        open_bound = global_bound() if root_status != "unknown" else None
        if root_status == "unknown" and not has_incumbent:
            status = SolveStatus.TIMEOUT
        elif has_incumbent:
            status = SolveStatus.FEASIBLE
        else:
            status = SolveStatus.BOUND_ONLY
        if open_bound is not None and math.isinf(open_bound):
            open_bound = None
        result = SolveResult(status, incumbent_value if has_incumbent else None, open_bound,
                             incumbent, nodes, seconds, trace)
    log_solve(f"bb[{milp.name}]", result.status.value, result.value, result.bound, seconds)
    return result
