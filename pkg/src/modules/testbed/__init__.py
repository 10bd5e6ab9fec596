"""
Seeded instance generator
"""

from .generator import (
    BscSpec,
    MergeSpec,
    generate_bsc,
    merge_bsc,
    table1_row,
    balanced_pattern,
    distance_matrix,
    level_ladder,
)

__all__ = [
    'BscSpec',
    'MergeSpec',
    'generate_bsc',
    'merge_bsc',
    'table1_row',
    'balanced_pattern',
    'distance_matrix',
    'level_ladder',
]
