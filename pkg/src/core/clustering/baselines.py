"""K-means and spectral clustering baselines."""

import warnings

import numpy as np
from loguru import logger
from scipy.linalg import LinAlgError, eigh
from scipy.spatial.distance import pdist, squareform
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from src.core.clustering.models import Clustering
from src.utils.exceptions import ClusteringError, SpectralClusteringError, ValidationError
from src.utils.helpers import relabel_by_smallest_member, sklearn_seed

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 100


def _check_m(n: int, m: int) -> None:
    if not 1 <= m <= n:
        raise ValidationError(f"Cannot form {m} clusters from {n} points", m=m, n=n)


def _kmeans_labels(data: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """Lloyd iterations from k-means++ seeding, best of the restarts by inertia.

    ``tol=0`` makes scikit-learn stop only once assignments stop changing (or
    at the iteration cap).
    """
    model = KMeans(
        n_clusters=m,
        init="k-means++",
        n_init=KMEANS_RESTARTS,
        max_iter=KMEANS_MAX_ITER,
        tol=0.0,
        random_state=sklearn_seed(rng),
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=ConvergenceWarning)
        labels = model.fit_predict(data)
    return labels


def _to_clustering(labels: np.ndarray, m: int, algorithm: str) -> Clustering:
    relabelled = relabel_by_smallest_member(labels.tolist())
    found = int(relabelled.max()) if relabelled.size else 0
    if found != m:
        raise ClusteringError(
            f"{algorithm} produced {found} nonempty clusters instead of {m}",
            algorithm=algorithm,
            m=m,
        )
    return Clustering(labels=relabelled, m=m)


def kmeans_cluster(points, m: int, rng: np.random.Generator) -> Clustering:
    """K-means partition of ``points`` into ``m`` clusters.

    Args:
        points: ``(n, 2)`` coordinates
        m: Number of clusters, ``1 ≤ m ≤ n``
        rng: Seeded stream; the same stream state gives the same labels

    Returns:
        Clustering labelled ``1..m`` by smallest member index
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    _check_m(n, m)
    if m == n:
        return Clustering(labels=np.arange(1, n + 1), m=m)
    if m == 1:
        return Clustering(labels=np.ones(n, dtype=int), m=1)
    return _to_clustering(_kmeans_labels(pts, m, rng), m, "kmeans")


def affinity_matrix(points, sigma: float) -> np.ndarray:
    """Gaussian affinity ``exp(-d² / (2σ²))`` with a zero diagonal."""
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    pts = np.asarray(points, dtype=float)
    sq = squareform(pdist(pts, "sqeuclidean")) if pts.shape[0] > 1 else np.zeros((1, 1))
    affinity = np.exp(-sq / (2.0 * sigma**2))
    np.fill_diagonal(affinity, 0.0)
    return affinity


def spectral_embedding(affinity: np.ndarray, m: int) -> np.ndarray:
    """Row-normalised top-``m`` eigenvectors of ``D^-1/2 A D^-1/2``."""
    degree = affinity.sum(axis=1)
    if np.any(degree <= 0):
        isolated = np.flatnonzero(degree <= 0).tolist()
        raise SpectralClusteringError(
            f"Points {isolated} have zero affinity to every other point",
            isolated=isolated,
        )
    inv_sqrt = 1.0 / np.sqrt(degree)
    normalized = inv_sqrt[:, None] * affinity * inv_sqrt[None, :]
    n = affinity.shape[0]
    try:
        # Ascending eigenvalues; keep the largest m
        _, vectors = eigh(normalized, subset_by_index=[n - m, n - 1])
    except (LinAlgError, ValueError) as e:
        raise SpectralClusteringError(f"Eigendecomposition failed: {e}") from e

    if not np.all(np.isfinite(vectors)):
        raise SpectralClusteringError("Eigenvectors contain non-finite values")
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms <= 0):
        raise SpectralClusteringError("Spectral embedding has a zero row")
    return vectors / norms[:, None]


def spectral_cluster(points, m: int, sigma: float, rng: np.random.Generator) -> Clustering:
    """Normalised spectral clustering (Ng, Jordan and Weiss).

    Args:
        points: ``(n, 2)`` coordinates
        m: Number of clusters, ``1 ≤ m ≤ n``
        sigma: Affinity scale in meters
        rng: Seeded stream for the k-means step

    Raises:
        SpectralClusteringError: if the embedding cannot be computed
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    _check_m(n, m)
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    if m == 1:
        return Clustering(labels=np.ones(n, dtype=int), m=1)

    embedding = spectral_embedding(affinity_matrix(pts, sigma), m)
    labels = _kmeans_labels(embedding, m, rng)
    logger.debug(f"Spectral clustering: n={n}, m={m}, sigma={sigma:.2f}")
    return _to_clustering(labels, m, "spectral")
