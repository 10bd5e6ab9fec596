"""
modules/scs4b/algorithm.py
Scenario-cluster matheuristic: singleton pool, cluster exploration, lazy
evaluation of first-stage designs, capacity escalation and incumbent
bookkeeping
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from core.model import (
    FirstStageDesign,
    Instance,
    ScenarioAssignment,
    evaluate_solution,
    total_out,
)
from core.progress import Stopwatch
from core.utils.exceptions import EmptyPoolError, InvalidBoundError
from core.utils.logging import get_logger, log_trial
from modules.decomposition import (
    FULL,
    STACK_ONLY,
    STRIP_ONLY,
    Cluster,
    ClusterBound,
    ClusterValue,
    generate_clusters,
    lower_bound,
    make_cluster,
    solve_cluster_bounds,
    solve_submodel,
    solve_submodels,
)
from modules.solvers import OmegaSubmodel, solve_omega
from .params import (
    ACCEPTED,
    ESCALATED,
    REJECTED,
    SKIPPED,
    SPLIT,
    STATUS_EMPTY_POOL,
    STATUS_NO_INCUMBENT,
    STATUS_OK,
    Scs4bParams,
    Scs4bReport,
    TrialRecord,
)

ACCEPT = "accept"
ESCALATE = "escalate"
REJECT = "reject"


@dataclass
class SingletonPool:
    """Step 0 outcome: the refined instance and one design per kept scenario"""

    instance: Instance
    kept: List[int]
    designs: Dict[int, FirstStageDesign]
    removed: List[int] = field(default_factory=list)
    removed_weight: float = 0.0


@dataclass
class Evaluation:
    """A design evaluated scenario by scenario"""

    design: FirstStageDesign
    z: float
    out: int
    assignments: List[ScenarioAssignment]


def _singleton_values(instance: Instance, params: Scs4bParams) -> List[Tuple[ClusterValue, ...]]:
    kinds = (FULL,) if params.step0_option == 1 else (STRIP_ONLY, STACK_ONLY)
    tasks = []
    for w, scen in enumerate(instance.scenarios):
        cluster = make_cluster(instance, w, (w,), (scen.n_origins, scen.n_destinations), 1)
        tasks += [(cluster, kind) for kind in kinds]
    values = solve_submodels(instance, tasks, params.time_limit, jobs=params.jobs)
    return [tuple(values[w * len(kinds):(w + 1) * len(kinds)]) for w in range(instance.n_scenarios)]


def step0_singleton_pool(instance: Instance, params: Scs4bParams) -> SingletonPool:
    """
    Solve every singleton submodel. Scenarios whose solution outsources are
    removed and the remaining weights renormalised.
    """
    logger = get_logger()
    kept: List[int] = []
    designs: Dict[int, FirstStageDesign] = {}
    removed: List[int] = []
    for w, values in enumerate(_singleton_values(instance, params)):
        if any(v.outsources for v in values):
            removed.append(w)
            continue
        kept.append(w)
        parts = [v.design for v in values if v.design is not None]
        if len(parts) == len(values):
            designs[w] = FirstStageDesign(
                set().union(*(p.strip_selection for p in parts)),
                set().union(*(p.stack_selection for p in parts)))
        else:
            logger.warning(f"Singleton submodel of scenario {w} has no incumbent; it gets no pool design")

    if not kept:
        raise EmptyPoolError(instance.n_scenarios)
    removed_weight = math.fsum(instance.scenarios[w].weight for w in removed)
    if removed:
        logger.info(f"Step 0 removed scenarios {removed} carrying weight {removed_weight:.6g}")
    refined = instance.with_scenarios(kept, renormalize=True)
    position = {w: pos for pos, w in enumerate(kept)}
    return SingletonPool(refined, kept, {position[w]: d for w, d in designs.items()}, removed, removed_weight)


def explore_cluster(cluster: Cluster, pool: SingletonPool, instance: Instance, params: Scs4bParams,
                    known: Optional[Dict[int, ClusterValue]] = None) -> List[Tuple[Cluster, Optional[FirstStageDesign]]]:
    """
    Candidate designs of a cluster.

    A singleton takes its pool design. A larger cluster takes the design of
    its submodel, unless that solution outsources: then the cluster is
    replaced by its singletons, each with its pool design.
    """
    if cluster.is_singleton:
        return [(cluster, pool.designs.get(cluster.scenarios[0]))]
    value = (known or {}).get(cluster.id)
    if value is None:
        value = solve_submodel(instance, cluster, FULL, params.time_limit)
    if value.design is None:
        get_logger().warning(f"Cluster {cluster.label}: submodel stopped without a feasible point")
        return [(cluster, None)]
    if value.outsources:
        return [(single, pool.designs.get(single.scenarios[0])) for single in cluster.split(instance)]
    return [(cluster, value.design)]


def _positive_load_doors(instance: Instance, assignments: Sequence[ScenarioAssignment]) -> Tuple[set, set]:
    strip, stack = set(), set()
    for w, assignment in enumerate(assignments):
        scen = instance.scenarios[w]
        strip |= {i for m, i in enumerate(assignment.x) if i and scen.origin_totals[m] > 0}
        stack |= {j for n, j in enumerate(assignment.y) if j and scen.destination_totals[n] > 0}
    return strip, stack


def lazy_evaluate(design: FirstStageDesign, instance: Instance, params: Scs4bParams,
                  cache: Optional[Dict[tuple, Evaluation]] = None) -> Evaluation:
    """
    Solve every scenario with the design fixed and price the result.

    Install costs count only doors that carry load in some scenario; a used
    door without a level in the design is charged at its basic level.
    """
    key = design.key()
    if cache is not None and key in cache:
        return cache[key]

    basic = design.with_basic_capacities(instance)
    assignments: List[ScenarioAssignment] = []
    for w in range(instance.n_scenarios):
        first = basic if params.basic_capacity == "always" else design
        result = solve_omega(OmegaSubmodel.from_design(instance, w, first), params.omega_threshold, params.seed)
        if result.assignment.outsources and first is not basic:
            result = solve_omega(OmegaSubmodel.from_design(instance, w, basic), params.omega_threshold, params.seed)
        assignments.append(result.assignment)

    strip_used, stack_used = _positive_load_doors(instance, assignments)
    strip_levels, stack_levels = design.strip_level, design.stack_level
    trimmed = FirstStageDesign({i: strip_levels.get(i, 0) for i in strip_used},
                               {j: stack_levels.get(j, 0) for j in stack_used})
    evaluation = Evaluation(trimmed, evaluate_solution(instance, trimmed, assignments).total,
                            total_out(assignments), assignments)
    if cache is not None:
        cache[key] = evaluation
    return evaluation


def escalate_design(design: FirstStageDesign, instance: Instance, params: Scs4bParams) -> Optional[FirstStageDesign]:
    """Raise every level 0 < k < |K|; None when no level can grow"""
    grew = False

    def grow(levels: Dict[int, int], doors) -> Dict[int, int]:
        nonlocal grew
        raised = {}
        for door, k in levels.items():
            top = doors[door - 1].n_levels
            if 0 < k < top:
                step = params.delta if params.escalation == "textual" else params.delta * top
                raised[door] = min(k + step, top)
                grew = True
            else:
                raised[door] = k
        return raised

    escalated = FirstStageDesign(grow(design.strip_level, instance.strip_doors),
                                 grow(design.stack_level, instance.stack_doors))
    return escalated if grew else None


def step4_accept_or_escalate(trial: Evaluation, params: Scs4bParams, incumbent: Optional[float],
                             instance: Instance) -> Tuple[str, Optional[FirstStageDesign]]:
    """Accept, escalate (with the raised design) or reject a trial"""
    limit = params.rho * instance.n_scenarios
    best = math.inf if incumbent is None else incumbent
    if trial.out <= limit + 1e-9 and trial.z < best:
        return ACCEPT, None
    escalated = escalate_design(trial.design, instance, params)
    if escalated is not None:
        return ESCALATE, escalated
    return REJECT, None


def _bound(instance: Instance, clusters, option: int, params: Scs4bParams) -> Tuple[ClusterBound, Optional[float]]:
    result = solve_cluster_bounds(instance, clusters, option, params.time_limit, params.jobs)
    try:
        return result, lower_bound(result)
    except InvalidBoundError as error:
        get_logger().warning(error.message)
        return result, None


def run(instance: Instance, params: Optional[Scs4bParams] = None, reference_value: Optional[float] = None,
        oracle_value: Optional[float] = None) -> Scs4bReport:
    """Steps 0 to 5; the report refers to the refined instance"""
    params = (params or Scs4bParams.from_config()).validated()
    logger = get_logger()
    watch = Stopwatch()

    try:
        pool = step0_singleton_pool(instance, params)
    except EmptyPoolError as error:
        logger.warning(error.message)
        watch.sample()
        return Scs4bReport(instance, instance.instance_hash(), STATUS_EMPTY_POOL,
                           removed_scenarios=[s.name or str(w) for w, s in enumerate(instance.scenarios)],
                           removed_weight=1.0, total_seconds=watch.elapsed, peak_memory_mb=watch.peak_rss_mb,
                           reference_value=reference_value, oracle_value=oracle_value)

    refined = pool.instance
    report = Scs4bReport(refined, refined.instance_hash(), STATUS_NO_INCUMBENT,
                         removed_scenarios=[instance.scenarios[w].name or str(w) for w in pool.removed],
                         removed_weight=pool.removed_weight,
                         reference_value=reference_value, oracle_value=oracle_value)

    clusters = generate_clusters(refined, params.kappa, params.seed, params.kappa_overrides)
    known: Dict[int, ClusterValue] = {}
    if params.wants_option1:
        result, report.option1_bound = _bound(refined, clusters, 1, params)
        report.option1_seconds, report.option1_proven = result.seconds, result.proven
        known = {cid: entries[0] for cid, entries in result.entries.items()}
    if params.wants_option2:
        result, report.option2_bound = _bound(refined, clusters, 2, params)
        report.option2_seconds, report.option2_proven = result.seconds, result.proven
    watch.sample()

    cache: Dict[tuple, Evaluation] = {}
    for cluster in sorted(clusters, key=lambda c: (-c.weight, c.id)):
        candidates = explore_cluster(cluster, pool, refined, params, known)
        if len(candidates) > 1 or candidates[0][0] is not cluster:
            report.trials.append(TrialRecord(cluster.label, "-", None, 0, SPLIT))
            log_trial(cluster.label, SPLIT, math.nan, 0)
        for source, design in candidates:
            if design is None:
                report.trials.append(TrialRecord(source.label, "-", None, 0, SKIPPED))
                log_trial(source.label, SKIPPED, math.nan, 0)
                continue
            _evaluate_candidate(source, design, refined, params, report, cache)
        watch.sample()

    if report.design is not None:
        report.status = STATUS_OK
    report.total_seconds = watch.elapsed
    report.peak_memory_mb = watch.sample()
    logger.info(f"SCS4B finished: status={report.status} ub={report.upper_bound} gap={report.gap}")
    return report


def _evaluate_candidate(source: Cluster, design: FirstStageDesign, instance: Instance, params: Scs4bParams,
                        report: Scs4bReport, cache: Dict[tuple, Evaluation]) -> None:
    """Step 3 and Step 4 for one candidate design, escalating until accepted or rejected"""
    escalations = 0
    while True:
        trial = lazy_evaluate(design, instance, params, cache)
        decision, escalated = step4_accept_or_escalate(trial, params, report.upper_bound, instance)
        label = {ACCEPT: ACCEPTED, ESCALATE: ESCALATED, REJECT: REJECTED}[decision]
        report.trials.append(TrialRecord(source.label, trial.design.describe(), trial.z, trial.out,
                                         label, escalations))
        log_trial(source.label, label, trial.z, trial.out)
        if decision == ACCEPT:
            report.upper_bound = trial.z
            report.design = trial.design
            report.assignments = list(trial.assignments)
            return
        if decision == REJECT:
            return
        design = escalated
        escalations += 1
