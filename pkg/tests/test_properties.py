"""
Property-based tests
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import factories
from core.model import FirstStageDesign, ScenarioAssignment, evaluate_solution
from modules.decomposition import generate_clusters
from modules.scs4b import Scs4bParams, escalate_design, gap
from modules.solvers import OmegaSubmodel, solve_omega_exact, solve_omega_lsh
from modules.testbed import BscSpec, balanced_pattern, generate_bsc

pytestmark = pytest.mark.property

TINY = factories.tiny_instance()
GENERATED = generate_bsc(BscSpec(3, 2, seed=4, slack_set=(5, 10, 15, 20, 25, 30, 35), name="p"))

levels = st.integers(min_value=0, max_value=2)
designs = st.builds(
    FirstStageDesign,
    st.dictionaries(st.sampled_from([1, 2]), levels, max_size=2),
    st.dictionaries(st.sampled_from([1, 2]), levels, max_size=2),
)


@st.composite
def patterns(draw):
    n_rows = draw(st.integers(min_value=1, max_value=8))
    n_cols = draw(st.integers(min_value=n_rows, max_value=10))
    nnz = draw(st.integers(min_value=0, max_value=n_rows * n_cols))
    return n_rows, n_cols, nnz, draw(st.integers(min_value=0, max_value=2 ** 32 - 1))


@settings(max_examples=50, deadline=None)
@given(patterns())
def test_balanced_pattern_rows(case):
    n_rows, n_cols, nnz, seed = case
    rows, cols = balanced_pattern(np.random.default_rng(seed), n_rows, n_cols, nnz)
    assert rows.size == nnz
    assert len(set(zip(rows.tolist(), cols.tolist()))) == nnz
    assert np.all(cols < n_cols)
    counts = np.bincount(rows, minlength=n_rows)
    assert counts.max() - counts.min() <= 1


@settings(max_examples=30, deadline=None)
@given(kappa=st.integers(min_value=1, max_value=8), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_clusters_partition_scenarios(kappa, seed):
    clusters = generate_clusters(GENERATED, kappa=kappa, seed=seed)
    members = sorted(w for cluster in clusters for w in cluster.scenarios)
    assert members == list(range(GENERATED.n_scenarios))
    assert all(cluster.size <= kappa for cluster in clusters)
    assert float(clusters.weights.sum()) == pytest.approx(1.0)
    assert [c.id for c in clusters] == list(range(len(clusters)))


@settings(max_examples=30, deadline=None)
@given(design=designs, w=st.integers(min_value=0, max_value=1), seed=st.integers(min_value=0, max_value=100))
def test_local_search_never_beats_exact(design, w, seed):
    sub = OmegaSubmodel.from_design(TINY, w, design)
    exact = solve_omega_exact(sub)
    heuristic = solve_omega_lsh(sub, seed=seed)
    assert sub.is_feasible(*exact.solution)
    assert sub.is_feasible(*heuristic.solution)
    assert heuristic.value >= exact.value - 1e-9


@settings(max_examples=30, deadline=None)
@given(design=designs)
def test_escalation_only_raises_levels(design):
    params = Scs4bParams.from_config(escalation="textual", delta=1)
    escalated = escalate_design(design, TINY, params)
    if escalated is None:
        assert all(k in (0, 2) for k in list(design.strip_level.values()) + list(design.stack_level.values()))
        return
    for before, after in ((design.strip_level, escalated.strip_level),
                          (design.stack_level, escalated.stack_level)):
        assert set(before) == set(after)
        assert all(before[d] <= after[d] <= 2 for d in before)


@settings(max_examples=30, deadline=None)
@given(x=st.lists(st.integers(0, 2), min_size=2, max_size=2), y=st.lists(st.integers(0, 2), min_size=2, max_size=2))
def test_scenario_order_does_not_change_total(x, y):
    assignment = ScenarioAssignment.from_maps(x, y)
    other = ScenarioAssignment.from_maps(list(reversed(x)), y)
    design = FirstStageDesign({1: 2, 2: 1}, {1: 1})
    reordered = TINY.with_scenarios([1, 0])
    forward = evaluate_solution(TINY, design, [assignment, other]).total
    backward = evaluate_solution(reordered, design, [other, assignment]).total
    assert forward == pytest.approx(backward)


@given(upper=st.floats(min_value=1.0, max_value=1e7), share=st.floats(min_value=0.0, max_value=1.0))
def test_gap_within_percent_range(upper, share):
    value = gap(upper, upper * share)
    assert -1e-9 <= value <= 100.0 + 1e-9
