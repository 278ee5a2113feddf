"""Agglomerative clustering with minimax linkage.

The radius of a set around one of its members is the largest distance from
that member to the others; the minimax radius is the smallest such radius and
the member achieving it is the set's center. Two clusters are as far apart as
the minimax radius of their union. Cutting the resulting dendrogram at any
number of clusters only changes the clusters merged at that level.
"""

from typing import Dict, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.spatial.distance import pdist, squareform

from src.core.clustering.models import Clustering, Dendrogram, MergeStep
from src.utils.exceptions import ValidationError
from src.utils.helpers import relabel_by_smallest_member


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts


def _radius_in(dist: np.ndarray, members: Sequence[int]) -> Tuple[float, int]:
    """Minimax radius of ``members`` under a precomputed distance matrix.

    ``members`` must be sorted so that ties resolve to the lowest index.
    """
    idx = np.asarray(members)
    radii = dist[np.ix_(idx, idx)].max(axis=1)
    best = int(np.argmin(radii))
    return float(radii[best]), int(idx[best])


def minimax_radius(points) -> Tuple[float, int]:
    """Minimax radius of a point set and the index of its center.

    Args:
        points: ``(n, d)`` array-like, n ≥ 1

    Returns:
        ``(radius, center)`` where ``center`` indexes ``points``; ties go to
        the lowest index
    """
    pts = _as_points(points)
    if pts.shape[0] == 0:
        raise ValidationError("minimax_radius of an empty set")
    dist = squareform(pdist(pts)) if pts.shape[0] > 1 else np.zeros((1, 1))
    return _radius_in(dist, range(pts.shape[0]))


def minimax_linkage(s1, s2) -> float:
    """Minimax linkage of two disjoint nonempty point sets."""
    a, b = _as_points(s1), _as_points(s2)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValidationError("minimax_linkage of an empty set")
    return minimax_radius(np.vstack([a, b]))[0]


def hierarchical_cluster(points) -> Dendrogram:
    """Build the full minimax-linkage dendrogram.

    Starts from singletons and repeatedly merges the pair of active clusters
    with the smallest linkage; ties go to the lexicographically smallest
    ``(smaller id, larger id)`` pair. After a merge only the linkages between
    the new cluster and the remaining ones are recomputed.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n == 0:
        raise ValidationError("hierarchical_cluster needs at least one point")

    dist = squareform(pdist(pts)) if n > 1 else np.zeros((1, 1))
    members: Dict[int, Tuple[int, ...]] = {i: (i,) for i in range(n)}
    linkage: Dict[Tuple[int, int], Tuple[float, int]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            # Two-point radius is their distance, centered on the lower index
            linkage[(i, j)] = (float(dist[i, j]), i)

    steps = []
    next_id = n
    while len(members) > 1:
        best_pair = None
        best_value = np.inf
        for pair in sorted(linkage):
            value = linkage[pair][0]
            if value < best_value:
                best_value = value
                best_pair = pair

        left, right = best_pair
        _, center = linkage[best_pair]
        merged = tuple(sorted(members.pop(left) + members.pop(right)))
        linkage = {
            pair: v for pair, v in linkage.items() if left not in pair and right not in pair
        }
        for other, other_members in members.items():
            union = tuple(sorted(merged + other_members))
            linkage[(other, next_id)] = _radius_in(dist, union)
        members[next_id] = merged

        steps.append(
            MergeStep(
                left=left,
                right=right,
                linkage=best_value,
                new_id=next_id,
                center=center,
                size=len(merged),
            )
        )
        next_id += 1

    logger.debug(f"Built minimax dendrogram over {n} points")
    return Dendrogram(leaf_count=n, merge_steps=tuple(steps))


def cut_dendrogram(d: Dendrogram, m: int) -> Clustering:
    """Flat clustering after ``leaf_count - m`` merges.

    Labels run ``1..m`` ordered by each cluster's smallest member index.
    """
    if not 1 <= m <= d.leaf_count:
        raise ValidationError(
            f"Cannot cut a dendrogram of {d.leaf_count} leaves into {m} clusters",
            m=m,
            leaf_count=d.leaf_count,
        )

    owner = {i: i for i in range(d.leaf_count)}
    for step in d.merge_steps[: d.leaf_count - m]:
        for leaf, cluster in owner.items():
            if cluster in (step.left, step.right):
                owner[leaf] = step.new_id

    raw = [owner[i] for i in range(d.leaf_count)]
    return Clustering(labels=relabel_by_smallest_member(raw), m=m)
