"""
modules/lip/builder.py
Linearized (RLT1) model of the stochastic door design problem

The same assembly routine produces the full model, the cluster submodels
(copied first-stage variables over the cluster's doors, conditional
weights) and the strip-only / stack-only relaxations with half operational
costs.
"""
import re
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.model import FirstStageDesign, Instance, ScenarioAssignment
from .milp import BINARY, CONTINUOUS, EQ, LE, GenericMILP, MILPBuilder, Symbol

STRIP = "strip"
STACK = "stack"
BOTH = (STRIP, STACK)


def symbol_name(symbol: Symbol) -> str:
    """Export name of a model symbol"""
    kind = symbol[0]
    if kind == "a":
        return f"a_i{symbol[1]}_k{symbol[2]}"
    if kind == "b":
        return f"b_j{symbol[1]}_k{symbol[2]}"
    if kind == "a0":
        return f"a0_w{symbol[1]}"
    if kind == "b0":
        return f"b0_w{symbol[1]}"
    if kind == "x":
        return f"x_w{symbol[1]}_m{symbol[2]}_i{symbol[3]}"
    if kind == "y":
        return f"y_w{symbol[1]}_n{symbol[2]}_j{symbol[3]}"
    if kind == "v":
        return "v_w{}_m{}_i{}_n{}_j{}".format(*symbol[1:])
    raise ValueError(f"Unknown symbol kind: {kind!r}")


_SYMBOL_PATTERNS = [
    (re.compile(r"^a_i(\d+)_k(\d+)$"), "a"),
    (re.compile(r"^b_j(\d+)_k(\d+)$"), "b"),
    (re.compile(r"^a0_w(\d+)$"), "a0"),
    (re.compile(r"^b0_w(\d+)$"), "b0"),
    (re.compile(r"^x_w(\d+)_m(\d+)_i(\d+)$"), "x"),
    (re.compile(r"^y_w(\d+)_n(\d+)_j(\d+)$"), "y"),
    (re.compile(r"^v_w(\d+)_m(\d+)_i(\d+)_n(\d+)_j(\d+)$"), "v"),
]


def parse_symbol(name: str) -> Optional[Symbol]:
    """Inverse of symbol_name; None for foreign names"""
    for pattern, kind in _SYMBOL_PATTERNS:
        match = pattern.match(name)
        if match:
            return (kind,) + tuple(int(g) for g in match.groups())
    return None


def _var(builder: MILPBuilder, symbol: Symbol, kind: str, objective: float = 0.0) -> int:
    return builder.add_var(symbol_name(symbol), kind, objective, symbol=symbol)


def assemble(instance: Instance, scenario_ids: Sequence[int], weights: Sequence[float],
             strip_doors: Optional[Iterable[int]] = None, stack_doors: Optional[Iterable[int]] = None,
             sides: Tuple[str, ...] = BOTH, operational_share: float = 1.0,
             name: str = "lip") -> GenericMILP:
    """
    Build the linear model over a subset of scenarios.

    Scenario symbols keep the instance's scenario index. First-stage
    variables exist for the given doors and levels k >= 1 only.
    """
    strip_doors = sorted(strip_doors) if strip_doors is not None else list(range(1, instance.n_strip + 1))
    stack_doors = sorted(stack_doors) if stack_doors is not None else list(range(1, instance.n_stack + 1))
    use_strip, use_stack = STRIP in sides, STACK in sides
    builder = MILPBuilder(name)
    penalty = instance.outsourcing_penalty

    alpha: Dict[int, List[Tuple[int, int]]] = {}
    beta: Dict[int, List[Tuple[int, int]]] = {}
    if use_strip:
        for i in strip_doors:
            spec = instance.strip_doors[i - 1]
            alpha[i] = [(k, _var(builder, ("a", i, k), BINARY, spec.install_costs[k]))
                        for k in range(1, spec.n_levels + 1)]
    if use_stack:
        for j in stack_doors:
            spec = instance.stack_doors[j - 1]
            beta[j] = [(k, _var(builder, ("b", j, k), BINARY, spec.install_costs[k]))
                       for k in range(1, spec.n_levels + 1)]

    # first-stage rows: clique per door, then the cover row, per side
    for label, levels, upper in ((STRIP, alpha, instance.max_strip_doors),
                                 (STACK, beta, instance.max_stack_doors)):
        if (label == STRIP and not use_strip) or (label == STACK and not use_stack):
            continue
        for door, cols in levels.items():
            builder.add_row(f"clique_{label}_{door}", [(c, 1.0) for _, c in cols], LE, 1.0)
        builder.add_row(f"cover_{label}", [(c, 1.0) for cols in levels.values() for _, c in cols],
                        LE, float(upper))

    for w, weight in zip(scenario_ids, weights):
        _scenario_block(builder, instance, w, float(weight), alpha, beta,
                        use_strip, use_stack, operational_share, penalty)
    return builder.build()


def _scenario_block(builder: MILPBuilder, instance: Instance, w: int, weight: float,
                    alpha: Mapping[int, List[Tuple[int, int]]], beta: Mapping[int, List[Tuple[int, int]]],
                    use_strip: bool, use_stack: bool, share: float, penalty: float) -> None:
    scen = instance.scenarios[w]
    origins, destinations = range(scen.n_origins), range(scen.n_destinations)
    strip_options = [[0] + sorted(instance.eligible_strip_doors(m, w)) for m in origins]
    stack_options = [[0] + sorted(instance.eligible_stack_doors(n, w)) for n in destinations]

    a0 = _var(builder, ("a0", w), BINARY, weight * penalty) if use_strip else None
    b0 = _var(builder, ("b0", w), BINARY, weight * penalty) if use_stack else None
    x = {(m, i): _var(builder, ("x", w, m, i), BINARY)
         for m in origins for i in strip_options[m]} if use_strip else {}
    y = {(n, j): _var(builder, ("y", w, n, j), BINARY)
         for n in destinations for j in stack_options[n]} if use_stack else {}

    cost = instance.cost_tensor(w)
    v: Dict[Tuple[int, int, int, int], int] = {}
    for m in origins:
        for i in strip_options[m]:
            for n in destinations:
                for j in stack_options[n]:
                    coefficient = share * weight * float(cost[m, i, n, j])
                    v[m, i, n, j] = _var(builder, ("v", w, m, i, n, j), CONTINUOUS, coefficient)

    if use_strip:
        _assignment_rows(builder, "strip", w, scen.origin_totals, scen.strip_disruption,
                         instance.strip_doors, alpha, strip_options, x, a0)
    if use_stack:
        _assignment_rows(builder, "stack", w, scen.destination_totals, scen.stack_disruption,
                         instance.stack_doors, beta, stack_options, y, b0)

    if use_strip:
        for m in origins:
            for i in strip_options[m]:
                for n in destinations:
                    terms = [(v[m, i, n, j], 1.0) for j in stack_options[n]] + [(x[m, i], -1.0)]
                    builder.add_row(f"rlt_x_w{w}_m{m}_i{i}_n{n}", terms, EQ, 0.0)
    if use_stack:
        for m in origins:
            for n in destinations:
                for j in stack_options[n]:
                    terms = [(v[m, i, n, j], 1.0) for i in strip_options[m]] + [(y[n, j], -1.0)]
                    builder.add_row(f"rlt_y_w{w}_m{m}_n{n}_j{j}", terms, EQ, 0.0)


def _assignment_rows(builder: MILPBuilder, label: str, w: int, loads: np.ndarray,
                     disruption: np.ndarray, doors, levels: Mapping[int, List[Tuple[int, int]]],
                     options: List[List[int]], assign: Mapping[Tuple[int, int], int], flag: int) -> None:
    # capacity rows, skipped when no node may use the door
    n_doors = len(doors)
    for door in range(1, n_doors + 1):
        users = [(assign[node, door], float(loads[node]))
                 for node in range(len(options)) if door in options[node][1:]]
        if not users:
            continue
        net = 1.0 - float(disruption[door - 1])
        capacity_terms = [(col, -net * float(doors[door - 1].capacities[k])) for k, col in levels.get(door, [])]
        builder.add_row(f"cap_{label}_w{w}_{door}", users + capacity_terms, LE, 0.0)
    for node, node_options in enumerate(options):
        builder.add_row(f"assign_{label}_w{w}_{node}", [(assign[node, d], 1.0) for d in node_options], EQ, 1.0)
    for node in range(len(options)):
        builder.add_row(f"out_{label}_w{w}_{node}", [(assign[node, 0], 1.0), (flag, -1.0)], LE, 0.0)


def build_lip(instance: Instance) -> GenericMILP:
    """Full linearized model over every scenario"""
    ids = list(range(instance.n_scenarios))
    return assemble(instance, ids, [s.weight for s in instance.scenarios],
                    name=instance.name or "lip")


def lift_solution(instance: Instance, design: FirstStageDesign,
                  assignments: Sequence[Optional[ScenarioAssignment]],
                  scenario_ids: Optional[Sequence[int]] = None) -> Dict[Symbol, float]:
    """
    Nonzero LIP values of a (design, assignment) point.

    Level-0 selections have no column and are left out; v takes the value
    x * y, so exactly one v per (m, n) pair is 1.
    """
    values: Dict[Symbol, float] = {}
    for i, k in design.strip_selection:
        if k >= 1:
            values["a", i, k] = 1.0
    for j, k in design.stack_selection:
        if k >= 1:
            values["b", j, k] = 1.0
    ids = scenario_ids if scenario_ids is not None else range(len(assignments))
    for w, assignment in zip(ids, assignments):
        if assignment is None:
            continue
        if assignment.uses_inbound_outsourcing:
            values["a0", w] = 1.0
        if assignment.uses_outbound_outsourcing:
            values["b0", w] = 1.0
        for m, i in enumerate(assignment.x):
            values["x", w, m, i] = 1.0
        for n, j in enumerate(assignment.y):
            values["y", w, n, j] = 1.0
        for m, i in enumerate(assignment.x):
            for n, j in enumerate(assignment.y):
                values["v", w, m, i, n, j] = 1.0
    return values


def design_from_vector(milp: GenericMILP, vector: Sequence[float], tol: float = 0.5) -> FirstStageDesign:
    """First-stage design read from the a/b columns of a solution"""
    x = np.asarray(vector, dtype=np.float64)
    strip, stack = [], []
    for symbol, col in milp.symbols.items():
        if symbol[0] == "a" and x[col] > tol:
            strip.append((symbol[1], symbol[2]))
        elif symbol[0] == "b" and x[col] > tol:
            stack.append((symbol[1], symbol[2]))
    return FirstStageDesign(strip, stack)


def outsourcing_flags(milp: GenericMILP, vector: Sequence[float], tol: float = 0.5) -> Dict[int, int]:
    """Scenario index -> number of outsourcing flags set in a solution"""
    x = np.asarray(vector, dtype=np.float64)
    flags: Dict[int, int] = {}
    for symbol, col in milp.symbols.items():
        if symbol[0] in ("a0", "b0"):
            flags[symbol[1]] = flags.get(symbol[1], 0) + int(x[col] > tol)
    return flags


def assignments_from_vector(milp: GenericMILP, instance: Instance, vector: Sequence[float],
                            scenario_ids: Sequence[int], tol: float = 0.5) -> List[ScenarioAssignment]:
    """Per-scenario assignments read from the x/y columns; flags from a0/b0"""
    x = np.asarray(vector, dtype=np.float64)
    xs = {w: [None] * instance.scenarios[w].n_origins for w in scenario_ids}
    ys = {w: [None] * instance.scenarios[w].n_destinations for w in scenario_ids}
    for symbol, col in milp.symbols.items():
        if x[col] <= tol:
            continue
        if symbol[0] == "x" and symbol[1] in xs:
            xs[symbol[1]][symbol[2]] = symbol[3]
        elif symbol[0] == "y" and symbol[1] in ys:
            ys[symbol[1]][symbol[2]] = symbol[3]
    flags = {s: x[c] > tol for s, c in milp.symbols.items() if s[0] in ("a0", "b0")}
    return [
        ScenarioAssignment(tuple(xs[w]), tuple(ys[w]),
                           flags.get(("a0", w), False), flags.get(("b0", w), False))
        for w in scenario_ids
    ]
