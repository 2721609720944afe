"""Lloyd's k-means with k-means++ seeding, plus most-common-term cluster labels."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import TooFewPointsError
from ..textproc import TokenStats


@dataclass
class ClusterModel:
    k: int
    assignments: list[int]
    centroids: np.ndarray
    inertia: float
    n_iter: int = 0
    converged: bool = False
    # inertia after every assignment step, first to last
    inertia_history: list[float] = field(default_factory=list)
    labels: dict[int, list[str]] = field(default_factory=dict)

    def sizes(self) -> list[int]:
        counts = Counter(self.assignments)
        return [counts.get(c, 0) for c in range(self.k)]


def sq_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) squared Euclidean distances, summed elementwise for a fixed reduction order."""
    return ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def assign(x: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = sq_distances(x, centroids)
    labels = np.argmin(d, axis=1)  # first minimum, so ties go to the lowest id
    return labels, d[np.arange(len(x)), labels]


def kmeans_plus_plus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centers = [int(rng.integers(n))]
    closest = ((x - x[centers[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # every remaining point coincides with a center: take the first unused one
            idx = next(i for i in range(n) if i not in centers)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(idx)
        closest = np.minimum(closest, ((x - x[idx]) ** 2).sum(axis=1))
    return x[centers].copy()


def _repair_empty(x: np.ndarray, labels: np.ndarray, dist: np.ndarray, k: int) -> None:
    """Move the point farthest from its centroid into each empty cluster, in place."""
    for c in range(k):
        if np.any(labels == c):
            continue
        sizes = np.bincount(labels, minlength=k)
        movable = sizes[labels] > 1
        far = int(np.argmax(np.where(movable, dist, -1.0)))
        labels[far] = c
        dist[far] = 0.0


def kmeans(
    vectors: Sequence[Sequence[float]] | np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> ClusterModel:
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("vectors must be a 2-D array")
    n = len(x)
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        raise TooFewPointsError(f"{n} points cannot form {k} clusters")
    rng = np.random.default_rng(seed)
    centroids = kmeans_plus_plus(x, k, rng)
    history: list[float] = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        labels, dist = assign(x, centroids)
        history.append(float(dist.sum()))
        _repair_empty(x, labels, dist, k)
        new = np.stack([x[labels == c].mean(axis=0) for c in range(k)])
        shift = float(np.sqrt(((new - centroids) ** 2).sum(axis=1)).max())
        centroids = new
        if shift < tol:
            converged = True
            break
    labels, dist = assign(x, centroids)
    _repair_empty(x, labels, dist, k)  # coincident points can leave a centroid with no takers
    inertia = float(dist.sum())
    history.append(inertia)
    return ClusterModel(
        k=k,
        assignments=[int(c) for c in labels],
        centroids=centroids,
        inertia=inertia,
        n_iter=it,
        converged=converged,
        inertia_history=history,
    )


def label_clusters(
    assignments: Sequence[int],
    section_stats: Sequence[TokenStats],
    k: int | None = None,
    m: int = 3,
    stopwords: Iterable[str] = (),
) -> dict[int, list[str]]:
    """Top ``m`` terms per cluster by summed frequency, ties alphabetical."""
    if len(assignments) != len(section_stats):
        raise ValueError("assignments and sections differ in length")
    stop = set(stopwords)
    k = k if k is not None else (max(assignments) + 1 if assignments else 0)
    totals: dict[int, Counter] = {c: Counter() for c in range(k)}
    for c, stats in zip(assignments, section_stats):
        totals[c].update({t: n for t, n in stats.term_counts.items() if t not in stop})
    return {c: [t for t, _ in sorted(cnt.items(), key=lambda kv: (-kv[1], kv[0]))[:m]] for c, cnt in totals.items()}
