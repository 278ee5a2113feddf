"""Base-station clustering into virtual base-stations."""

from src.core.clustering.models import Clustering, Dendrogram, MergeStep
from src.core.clustering.minimax import (
    cut_dendrogram,
    hierarchical_cluster,
    minimax_linkage,
    minimax_radius,
)
from src.core.clustering.baselines import (
    affinity_matrix,
    kmeans_cluster,
    spectral_cluster,
    spectral_embedding,
)

__all__ = [
    "Clustering",
    "Dendrogram",
    "MergeStep",
    "cut_dendrogram",
    "hierarchical_cluster",
    "minimax_linkage",
    "minimax_radius",
    "affinity_matrix",
    "kmeans_cluster",
    "spectral_cluster",
    "spectral_embedding",
]
