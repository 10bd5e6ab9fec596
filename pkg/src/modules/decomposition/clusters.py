"""
modules/decomposition/clusters.py
Two-step scenario cluster generation

Step 1 groups scenarios with the same number of origins and destinations.
Step 2 cuts every group, in a seeded random order, into chunks of kappa
scenarios; the last chunk of a group takes the remainder.
"""
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.model import Instance
from core.utils.exceptions import ParameterError

GroupKey = Tuple[int, int]


@dataclass(frozen=True)
class Cluster:
    """Scenario cluster with its weight and door subsets"""

    id: int
    scenarios: Tuple[int, ...]
    weight: float
    conditional_weights: Tuple[float, ...]
    strip_doors: FrozenSet[int]
    stack_doors: FrozenSet[int]
    group: GroupKey
    kappa: int
    member: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.scenarios)

    @property
    def is_singleton(self) -> bool:
        return len(self.scenarios) == 1

    @property
    def label(self) -> str:
        """'3' for a generated cluster, '3.1' for a singleton split off cluster 3"""
        return str(self.id) if self.member is None else f"{self.id}.{self.member}"

    def split(self, instance: Instance) -> List["Cluster"]:
        """Singleton clusters of the members, in scenario order"""
        return [make_cluster(instance, self.id, (w,), self.group, 1, member=pos)
                for pos, w in enumerate(self.scenarios)]


def cluster_doors(instance: Instance, scenarios: Sequence[int]) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """Union of the eligible door sets over the cluster's scenarios and nodes"""
    strip, stack = set(), set()
    for w in scenarios:
        scen = instance.scenarios[w]
        for m in range(scen.n_origins):
            strip |= instance.eligible_strip_doors(m, w)
        for n in range(scen.n_destinations):
            stack |= instance.eligible_stack_doors(n, w)
    return frozenset(strip), frozenset(stack)


def make_cluster(instance: Instance, cluster_id: int, scenarios: Sequence[int], group: GroupKey,
                 kappa: int, member: Optional[int] = None) -> Cluster:
    scenarios = tuple(sorted(int(w) for w in scenarios))
    weights = [instance.scenarios[w].weight for w in scenarios]
    total = math.fsum(weights)
    strip, stack = cluster_doors(instance, scenarios)
    return Cluster(cluster_id, scenarios, total, tuple(wt / total for wt in weights),
                   strip, stack, group, kappa, member)


@dataclass(frozen=True)
class ClusterSet:
    """Partition of the scenario set"""

    clusters: Tuple[Cluster, ...]
    seed: Optional[int] = None

    def __iter__(self) -> Iterator[Cluster]:
        return iter(self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    def by_id(self, cluster_id: int) -> Cluster:
        for cluster in self.clusters:
            if cluster.id == cluster_id:
                return cluster
        raise KeyError(cluster_id)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.clusters])

    def groups(self) -> Dict[GroupKey, List[Cluster]]:
        grouped: Dict[GroupKey, List[Cluster]] = {}
        for cluster in self.clusters:
            grouped.setdefault(cluster.group, []).append(cluster)
        return grouped

    def largest(self) -> Cluster:
        """Cluster with the most scenarios; lowest id on ties"""
        return max(self.clusters, key=lambda c: (c.size, -c.id))


def scenario_groups(instance: Instance) -> Dict[GroupKey, List[int]]:
    """Step 1: scenario indices keyed by (|M|, |N|), keys sorted"""
    groups: Dict[GroupKey, List[int]] = {}
    for w, scen in enumerate(instance.scenarios):
        groups.setdefault((scen.n_origins, scen.n_destinations), []).append(w)
    return dict(sorted(groups.items()))


def generate_clusters(instance: Instance, kappa: int = 2, seed: Optional[int] = 0,
                      overrides: Optional[Mapping[GroupKey, int]] = None) -> ClusterSet:
    """Partition the scenarios; identical seed and instance give the identical partition"""
    overrides = dict(overrides or {})
    for key, value in [(None, kappa)] + list(overrides.items()):
        if int(value) != value or value < 1:
            raise ParameterError("kappa" if key is None else f"kappa{key}", value, "integer >= 1")

    rng = np.random.default_rng(seed)
    clusters: List[Cluster] = []
    for key, members in scenario_groups(instance).items():
        size = int(overrides.get(key, kappa))
        order = rng.permutation(np.array(members, dtype=np.int64))
        for start in range(0, len(order), size):
            chunk = order[start:start + size]
            clusters.append(make_cluster(instance, len(clusters), chunk.tolist(), key, size))
    return ClusterSet(tuple(clusters), seed)
