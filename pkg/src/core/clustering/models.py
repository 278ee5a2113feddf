"""Dendrogram and flat clustering containers."""

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Set, Tuple

import numpy as np


@dataclass(frozen=True)
class MergeStep:
    """One agglomeration: clusters ``left`` and ``right`` become ``new_id``."""

    left: int
    right: int
    linkage: float
    new_id: int
    center: int
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Full merge history of the agglomerative clustering.

    Leaves carry ids ``0..leaf_count-1``; the i-th merge creates id
    ``leaf_count + i``.
    """

    leaf_count: int
    merge_steps: Tuple[MergeStep, ...] = field(default_factory=tuple)

    def as_linkage_matrix(self) -> np.ndarray:
        """Export in ``scipy.cluster.hierarchy`` linkage-matrix format."""
        return np.array(
            [[s.left, s.right, s.linkage, s.size] for s in self.merge_steps],
            dtype=float,
        ).reshape(-1, 4)

    def to_dict(self) -> dict:
        return {
            "leaf_count": self.leaf_count,
            "merges": [
                {
                    "left": s.left,
                    "right": s.right,
                    "linkage": s.linkage,
                    "new_id": s.new_id,
                    "center": s.center,
                }
                for s in self.merge_steps
            ],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


@dataclass(frozen=True)
class Clustering:
    """Flat partition of points; ``labels[i]`` is the cluster of point ``i`` in ``1..m``."""

    labels: np.ndarray
    m: int

    def groups(self) -> List[List[int]]:
        """Member indices of every cluster, in label order."""
        out: List[List[int]] = [[] for _ in range(self.m)]
        for index, label in enumerate(self.labels):
            out[int(label) - 1].append(index)
        return out

    def as_sets(self) -> Set[FrozenSet[int]]:
        return {frozenset(group) for group in self.groups()}

    def is_partition(self) -> bool:
        """Labels use exactly ``1..m`` and every label is nonempty."""
        return set(int(x) for x in self.labels) == set(range(1, self.m + 1))

    def to_dict(self) -> Dict[str, object]:
        return {"m": self.m, "labels": [int(x) for x in self.labels]}
