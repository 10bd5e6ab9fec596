"""
Scenario-cluster matheuristic with lazy scenario evaluation
"""

from .params import (
    Scs4bParams,
    Scs4bReport,
    TrialRecord,
    gap,
    goodness_ratio,
    STATUS_OK,
    STATUS_NO_INCUMBENT,
    STATUS_EMPTY_POOL,
)
from .algorithm import (
    Evaluation,
    SingletonPool,
    escalate_design,
    explore_cluster,
    lazy_evaluate,
    run,
    step0_singleton_pool,
    step4_accept_or_escalate,
)

__all__ = [
    'Scs4bParams',
    'Scs4bReport',
    'TrialRecord',
    'gap',
    'goodness_ratio',
    'STATUS_OK',
    'STATUS_NO_INCUMBENT',
    'STATUS_EMPTY_POOL',
    'Evaluation',
    'SingletonPool',
    'escalate_design',
    'explore_cluster',
    'lazy_evaluate',
    'run',
    'step0_singleton_pool',
    'step4_accept_or_escalate',
]
