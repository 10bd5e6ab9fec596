"""
modules/decomposition/bounds.py
Cluster submodel solves and lower-bound aggregation

Option 1 solves one submodel per cluster; option 2 solves the strip-only
and stack-only relaxations. The aggregate is the cluster-weighted sum of
the submodels' proven bounds.
"""
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from core.model import FirstStageDesign, Instance, ScenarioAssignment
from core.progress import ProgressBar
from core.utils.config import get_solver_config
from core.utils.exceptions import InvalidBoundError, ParameterError
from core.utils.logging import get_logger
from modules.lip import assignments_from_vector, design_from_vector, outsourcing_flags
from modules.solvers import SolveResult, solve_bb
from .clusters import Cluster, ClusterSet
from .submodels import FULL, STACK_ONLY, STRIP_ONLY, build_submodel, warm_start

OPTION_KINDS = {1: (FULL,), 2: (STRIP_ONLY, STACK_ONLY)}


@dataclass
class ClusterValue:
    """One solved submodel"""

    cluster: Cluster
    kind: str
    result: SolveResult
    design: Optional[FirstStageDesign] = None
    assignments: Optional[List[ScenarioAssignment]] = None
    outsourcing: Dict[int, int] = field(default_factory=dict)

    @property
    def value(self) -> Optional[float]:
        """Proven lower bound of the submodel"""
        return self.result.bound

    @property
    def proven(self) -> bool:
        return self.result.is_optimal

    @property
    def outsources(self) -> bool:
        return any(self.outsourcing.values())


@dataclass
class ClusterBound:
    """Per-cluster submodel values of one bounding option"""

    option: int
    clusters: ClusterSet
    entries: Dict[int, Tuple[ClusterValue, ...]]
    seconds: float = 0.0

    def cluster_value(self, cluster_id: int) -> Optional[float]:
        values = [entry.value for entry in self.entries[cluster_id]]
        if any(v is None for v in values):
            return None
        return math.fsum(values)

    @property
    def invalid_clusters(self) -> List[str]:
        return [c.label for c in self.clusters if self.cluster_value(c.id) is None]

    @property
    def proven(self) -> bool:
        """Every submodel solved to optimality"""
        return all(e.proven for entries in self.entries.values() for e in entries)

    @property
    def value(self) -> float:
        return lower_bound(self)


def lower_bound(cluster_bound: ClusterBound, option: Optional[int] = None) -> float:
    """Sum over clusters of w^c times the cluster value"""
    if option is not None and option != cluster_bound.option:
        raise ParameterError("option", option, f"{cluster_bound.option} (the option that was solved)")
    invalid = cluster_bound.invalid_clusters
    if invalid:
        raise InvalidBoundError(invalid)
    return math.fsum(c.weight * cluster_bound.cluster_value(c.id) for c in cluster_bound.clusters)


def solve_submodel(instance: Instance, cluster: Cluster, kind: str = FULL,
                   time_limit: Optional[float] = None, node_limit: Optional[int] = None,
                   use_warm_start: bool = True) -> ClusterValue:
    """Build, warm start and solve one cluster submodel"""
    milp = build_submodel(instance, cluster, kind)
    initial = warm_start(instance, cluster, milp)[0] if use_warm_start else None
    result = solve_bb(milp, time_limit=time_limit, node_limit=node_limit, initial_solution=initial)
    value = ClusterValue(cluster, kind, result)
    if result.solution is not None:
        value.design = design_from_vector(milp, result.solution)
        value.outsourcing = outsourcing_flags(milp, result.solution)
        if kind == FULL:
            value.assignments = assignments_from_vector(milp, instance, result.solution, cluster.scenarios)
    return value


def _solve_task(task: Tuple[Instance, Cluster, str, Optional[float], Optional[int], bool]) -> ClusterValue:
    return solve_submodel(*task)


def solve_submodels(instance: Instance, tasks: Sequence[Tuple[Cluster, str]], time_limit: Optional[float] = None,
                    node_limit: Optional[int] = None, jobs: Optional[int] = None,
                    use_warm_start: bool = True, progress: bool = False) -> List[ClusterValue]:
    """Solve independent submodels; results come back in task order"""
    jobs = get_solver_config().jobs if jobs is None else jobs
    payload = [(instance, cluster, kind, time_limit, node_limit, use_warm_start) for cluster, kind in tasks]
    bar = ProgressBar(len(payload), message="Submodels", enabled=progress)
    results: List[ClusterValue] = []
    if jobs <= 1 or len(payload) <= 1:
        for item in payload:
            results.append(_solve_task(item))
            bar.update()
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for value in pool.map(_solve_task, payload):
                results.append(value)
                bar.update()
    bar.finish()
    return results


def solve_cluster_bounds(instance: Instance, clusters: ClusterSet, option: int = 1,
                         time_limit: Optional[float] = None, jobs: Optional[int] = None,
                         node_limit: Optional[int] = None, use_warm_start: bool = True,
                         progress: bool = False) -> ClusterBound:
    """Solve every submodel of the option and collect them by cluster id"""
    if option not in OPTION_KINDS:
        raise ParameterError("option", option, "1 or 2")
    start = time.perf_counter()
    tasks = [(cluster, kind) for cluster in clusters for kind in OPTION_KINDS[option]]
    values = solve_submodels(instance, tasks, time_limit, node_limit, jobs, use_warm_start, progress)
    entries: Dict[int, Tuple[ClusterValue, ...]] = {}
    for value in values:
        entries[value.cluster.id] = entries.get(value.cluster.id, ()) + (value,)
    bound = ClusterBound(option, clusters, entries, time.perf_counter() - start)
    if bound.invalid_clusters:
        get_logger().warning(f"Option {option} bound has unsolved clusters: {bound.invalid_clusters}")
    else:
        get_logger().info(f"Option {option} bound over {len(clusters)} clusters in {bound.seconds:.2f}s")
    return bound
