"""K-means over encoded feature vectors, used to split the positive examples
into groups that are easier to describe by a single default clause.

Seeding is the D^2-weighted scheme: the first center is drawn uniformly from
the data points, each further center with probability proportional to the
squared distance to the nearest center already chosen. Lloyd iterations then
alternate assignment and mean updates; a cluster that loses all its points is
re-seeded at the point farthest from its nearest center, so clusters are
re-populated rather than silently dropped.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError

log = logging.getLogger(__name__)


@dataclass
class ClusterModel:
    centers: np.ndarray  # (k, d)
    labels: np.ndarray  # (n,) cluster index per row
    inertia: float  # within-cluster sum of squared distances at the end
    n_iter: int
    wcss_history: list[float] = field(default_factory=list)  # one entry per assignment step

    @property
    def k(self) -> int:
        return len(self.centers)

    def groups(self) -> list[np.ndarray]:
        """Row indices per cluster, in cluster order."""
        return [np.flatnonzero(self.labels == j) for j in range(self.k)]


def _sq_dists(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(n, k) squared Euclidean distances."""
    diff = X[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def kmeanspp_seed(X: np.ndarray, k: int, rng: np.random.RandomState) -> np.ndarray:
    if k < 1:
        raise UsageError("k must be >= 1")
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]), dtype=np.float64)
    centers[0] = X[rng.randint(n)]
    for j in range(1, k):
        d2 = _sq_dists(X, centers[:j]).min(axis=1)
        total = float(d2.sum())
        if total <= 0.0:  # every point coincides with a chosen center
            log.warning("k exceeds the number of distinct points; duplicating centers")
            centers[j] = X[rng.randint(n)]
        else:
            centers[j] = X[rng.choice(n, p=d2 / total)]
    return centers


def kmeans_cluster(
    X: np.ndarray, k: int, seed: int = 0, max_iters: int = 300
) -> ClusterModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise UsageError("clustering input must be a 2-d array")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise UsageError(f"k must be in [1, {n}], got {k}")
    if max_iters < 1:
        raise UsageError("max_iters must be >= 1")

    rng = np.random.RandomState(seed)
    centers = kmeanspp_seed(X, k, rng)
    labels = np.full(n, -1, dtype=np.int64)
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, max_iters + 1):
        d2 = _sq_dists(X, centers)
        new_labels = d2.argmin(axis=1)  # ties resolve to the lowest index

        # Re-seed any emptied cluster at the point farthest from all centers.
        for j in np.flatnonzero(np.bincount(new_labels, minlength=k) == 0):
            far = int(d2.min(axis=1).argmax())
            centers[j] = X[far]
            new_labels[far] = j
            d2 = _sq_dists(X, centers)

        history.append(float(d2[np.arange(n), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = X[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)

    inertia = float(_sq_dists(X, centers)[np.arange(n), labels].sum())
    return ClusterModel(
        centers=centers, labels=labels, inertia=inertia, n_iter=n_iter, wcss_history=history
    )
