"""
K-Means over binary feature vectors.

Seeding is k-means++; refinement is Lloyd's algorithm under the squared
Euclidean inertia. ``cluster`` runs ``n_init`` seeded restarts and keeps
the one with the lowest inertia.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from apps.core.errors import FeatureFuzzError
from apps.core.seeds import make_rng, validate_seed
from apps.corpus.dataset import Dataset
from apps.features.catalog import Centroid

logger = logging.getLogger(__name__)


class DegenerateData(FeatureFuzzError):
    pass


class InvalidClusterParams(FeatureFuzzError):
    pass


@dataclass(frozen=True)
class ClusterParams:
    k: int
    seed: int
    n_init: int = 10
    max_iter: int = 300
    tolerance: float = 1e-4

    def __post_init__(self):
        if self.k < 1:
            raise InvalidClusterParams(f"k must be positive, got {self.k}")
        if self.n_init < 1:
            raise InvalidClusterParams(f"n-init must be positive, got {self.n_init}")
        if self.max_iter < 1:
            raise InvalidClusterParams(f"max-iter must be positive, got {self.max_iter}")
        if self.tolerance < 0:
            raise InvalidClusterParams(f"tolerance must be non-negative, got {self.tolerance}")
        try:
            validate_seed(self.seed)
        except ValueError as exc:
            raise InvalidClusterParams(str(exc)) from None


@dataclass
class LloydRun:
    """One restart: final centers and labels plus the inertia after every step."""

    centers: np.ndarray
    labels: np.ndarray
    inertia: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class ClusterResult:
    centroids: tuple[Centroid, ...]
    assignment: dict[str, int]
    inertia: float
    iterations_run: int
    restart_index: int
    cluster_sizes: tuple[int, ...]
    converged: bool
    params: ClusterParams
    restart_inertias: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return len(self.centroids)

    def centroid_matrix(self) -> np.ndarray:
        return np.array([centroid.values for centroid in self.centroids], dtype=float)


def squared_distances(data: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """n×k matrix of squared Euclidean distances."""
    return ((data[:, np.newaxis, :] - centers[np.newaxis, :, :]) ** 2).sum(axis=2)


def assign(data: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # argmin returns the first minimum, so ties go to the lowest cluster index
    distances = squared_distances(data, centers)
    labels = np.argmin(distances, axis=1)
    return labels, distances[np.arange(len(data)), labels]


def inertia_of(data: np.ndarray, centers: np.ndarray) -> float:
    return float(assign(data, centers)[1].sum())


def kmeans_plus_plus(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """
    Choose ``k`` initial centers among the rows of ``data``.

    The first is uniform; each next one is drawn with probability
    proportional to its squared distance to the nearest center so far, so
    duplicates of chosen points are never picked again.
    """
    n = len(data)
    if k < 1 or n == 0:
        raise DegenerateData("k-means++ needs k >= 1 and at least one point")
    distinct = len(np.unique(data, axis=0))
    if distinct < k:
        raise DegenerateData(f"only {distinct} distinct vectors for k={k}")

    chosen = [int(rng.integers(n))]
    closest = ((data - data[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        cumulative = np.cumsum(closest)
        target = rng.random() * cumulative[-1]
        index = min(int(np.searchsorted(cumulative, target, side="right")), n - 1)
        chosen.append(index)
        closest = np.minimum(closest, ((data - data[index]) ** 2).sum(axis=1))
    return data[chosen].astype(float)


def _update_means(data: np.ndarray, labels: np.ndarray, previous: np.ndarray) -> np.ndarray:
    k = len(previous)
    centers = previous.copy()
    sizes = np.bincount(labels, minlength=k)
    for index in np.flatnonzero(sizes):
        centers[index] = data[labels == index].mean(axis=0)

    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        # distance of every point to the center of the cluster it sits in
        spread = ((data - centers[labels]) ** 2).sum(axis=1)
        for index in empty:
            farthest = int(np.argmax(spread))
            logger.debug("Cluster %d is empty; reseeding it at point %d", index, farthest)
            centers[index] = data[farthest]
            spread = np.minimum(spread, ((data - centers[index]) ** 2).sum(axis=1))
    return centers


def lloyd(data: np.ndarray, centers: np.ndarray, max_iter: int, tolerance: float) -> LloydRun:
    """
    Alternate mean updates and nearest-center assignment.

    Stops once the assignment no longer changes (the result is then a fixed
    point), when the relative inertia improvement falls below a positive
    ``tolerance`` with no empty cluster, or after ``max_iter`` updates. A
    tolerance of 0 waits for the assignment to settle. Whatever the stop,
    the returned labels and inertia are measured against the returned centers.
    """
    k = len(centers)
    centers = np.array(centers, dtype=float)
    labels, distances = assign(data, centers)
    inertia = float(distances.sum())
    history = [inertia]
    converged = False
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        centers = _update_means(data, labels, centers)
        new_labels, distances = assign(data, centers)
        new_inertia = float(distances.sum())
        history.append(new_inertia)

        stable = np.array_equal(new_labels, labels)
        full = bool(np.all(np.bincount(new_labels, minlength=k)))
        improvement = (inertia - new_inertia) / inertia if inertia > 0 else 0.0
        labels, inertia = new_labels, new_inertia
        if full and (stable or (tolerance > 0 and improvement < tolerance)):
            converged = True
            break

    if not np.all(np.bincount(labels, minlength=k)):
        logger.warning("Restart finished with an empty cluster after %d iterations", iterations)
    return LloydRun(centers, labels, inertia, iterations, converged, history)


def cluster_matrix(data: np.ndarray, params: ClusterParams) -> tuple[int, LloydRun, list[float]]:
    """
    Best of ``params.n_init`` restarts over the rows of ``data``.

    Restart ``r`` draws from ``make_rng(params.seed, r)``. The winner has the
    minimum inertia, ties going to the lowest restart index.
    """
    if len(data) == 0:
        raise DegenerateData("no parsable vectors to cluster")
    best_index, best_run = -1, None
    inertias = []
    for restart in range(params.n_init):
        rng = make_rng(params.seed, restart)
        seeds = kmeans_plus_plus(data, params.k, rng)
        run = lloyd(data, seeds, params.max_iter, params.tolerance)
        inertias.append(run.inertia)
        logger.debug(
            "k=%d restart %d: inertia %.6f after %d iterations", params.k, restart, run.inertia, run.iterations
        )
        if best_run is None or run.inertia < best_run.inertia:
            best_index, best_run = restart, run
    return best_index, best_run, inertias


def cluster(dataset: Dataset, params: ClusterParams) -> ClusterResult:
    ids, data = dataset.binary_matrix()
    best_index, run, inertias = cluster_matrix(data, params)
    logger.info(
        "k=%d: kept restart %d of %d with inertia %.6f", params.k, best_index, params.n_init, run.inertia
    )
    sizes = np.bincount(run.labels, minlength=params.k)
    return ClusterResult(
        centroids=tuple(Centroid.from_values(np.clip(center, 0.0, 1.0)) for center in run.centers),
        assignment={record_id: int(label) for record_id, label in zip(ids, run.labels)},
        inertia=run.inertia,
        iterations_run=run.iterations,
        restart_index=best_index,
        cluster_sizes=tuple(int(size) for size in sizes),
        converged=run.converged,
        params=params,
        restart_inertias=tuple(inertias),
    )
