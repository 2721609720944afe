"""Exact t-SNE for small corpora (a few thousand points at most).

Each point gets a Gaussian precision found by bisection so that its
conditional neighbour distribution has entropy ``log(perplexity)``. The
symmetrized affinities are matched by a Student-t kernel in 2-D through
momentum gradient descent with early exaggeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import PerplexityTooLargeError, TooFewPointsError

ENTROPY_TOL = 1e-5
MAX_BISECTION = 50
EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
LEARNING_RATE = 200.0
MOMENTUM_EARLY = 0.5
MOMENTUM_LATE = 0.8
INIT_STD = 1e-4
_EPS = 1e-12


@dataclass
class Projection2D:
    coords: np.ndarray
    perplexity: float
    kl_divergence_final: float
    seed: int
    # (iteration, KL) checkpoints, taken after the exaggeration phase
    kl_history: list[tuple[int, float]] = field(default_factory=list)


def squared_distances(x: np.ndarray) -> np.ndarray:
    sq = (x * x).sum(axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def _row_entropy(d: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    """Entropy (nats) and probabilities of exp(-beta * d) normalized; ``d`` is shifted to min 0."""
    p = np.exp(-beta * d)
    total = p.sum()
    p /= total
    return math.log(total) + beta * float(d @ p), p


def conditional_affinities(
    dist: np.ndarray, perplexity: float, tol: float = ENTROPY_TOL, max_steps: int = MAX_BISECTION
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-stochastic p_{j|i}, the precisions and the entropy reached per row.

    The search runs on log(beta): it doubles or halves until the target is
    bracketed, then bisects.
    """
    n = dist.shape[0]
    target = math.log(perplexity)
    p = np.zeros((n, n))
    betas = np.zeros(n)
    entropies = np.zeros(n)
    for i in range(n):
        d = np.delete(dist[i], i)
        d = d - d.min()
        scale = float(np.mean(d))
        log_beta = -math.log(scale) if scale > 0 else 0.0
        lo, hi = -math.inf, math.inf
        h, row = _row_entropy(d, math.exp(log_beta))
        for _ in range(max_steps):
            if abs(h - target) < tol:
                break
            if h > target:  # too flat: raise precision
                lo = log_beta
                log_beta = log_beta + 1.0 if hi == math.inf else 0.5 * (log_beta + hi)
            else:
                hi = log_beta
                log_beta = log_beta - 1.0 if lo == -math.inf else 0.5 * (log_beta + lo)
            h, row = _row_entropy(d, math.exp(log_beta))
        p[i, np.arange(n) != i] = row
        betas[i] = math.exp(log_beta)
        entropies[i] = h
    return p, betas, entropies


def joint_affinities(x: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetric p_ij = (p_{j|i} + p_{i|j}) / 2n, summing to one."""
    cond, _, _ = conditional_affinities(squared_distances(x), perplexity)
    n = len(x)
    return (cond + cond.T) / (2.0 * n)


def _student_t(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    num = 1.0 / (1.0 + squared_distances(y))
    np.fill_diagonal(num, 0.0)
    return num, num / num.sum()


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float((p[mask] * np.log(p[mask] / np.maximum(q[mask], _EPS))).sum())


def tsne(
    vectors: np.ndarray,
    perplexity: float = 30.0,
    seed: int = 0,
    iters: int = 1000,
    learning_rate: float = LEARNING_RATE,
    checkpoint_every: int = 50,
) -> Projection2D:
    x = np.asarray(vectors, dtype=np.float64)
    n = len(x)
    if n < 4:
        raise TooFewPointsError(f"t-SNE needs at least 4 points, got {n}")
    if not perplexity < n - 1:
        raise PerplexityTooLargeError(f"perplexity {perplexity} must be below n - 1 = {n - 1}")
    if perplexity <= 0:
        raise ValueError("perplexity must be positive")

    p = joint_affinities(x, perplexity)
    rng = np.random.default_rng(seed)
    y = rng.normal(0.0, INIT_STD, size=(n, 2))
    velocity = np.zeros_like(y)
    history: list[tuple[int, float]] = []

    for it in range(1, iters + 1):
        exaggerate = it <= EXAGGERATION_ITERS
        momentum = MOMENTUM_EARLY if exaggerate else MOMENTUM_LATE
        p_eff = p * EXAGGERATION if exaggerate else p
        num, q = _student_t(y)
        pq = (p_eff - q) * num
        grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
        velocity = momentum * velocity - learning_rate * grad
        y = y + velocity
        y = y - y.mean(axis=0)
        if not exaggerate and (it % checkpoint_every == 0 or it == iters):
            history.append((it, kl_divergence(p, _student_t(y)[1])))

    kl = kl_divergence(p, _student_t(y)[1])
    return Projection2D(coords=y, perplexity=float(perplexity), kl_divergence_final=kl, seed=seed, kl_history=history)
