"""Seeded random desk-scale instances for property sweeps."""
from __future__ import annotations

import numpy as np

from .systems import Alphabet, FiniteSystem, Pattern, ShiftSystem, WeightFamily


def metric_repair(M: np.ndarray) -> np.ndarray:
    """Shortest-path closure of a symmetric nonnegative matrix (Floyd-Warshall)."""
    D = np.array(M, dtype=float)
    np.fill_diagonal(D, 0.0)
    D = np.minimum(D, D.T)
    for k in range(len(D)):
        D = np.minimum(D, D[:, [k]] + D[[k], :])
    return D


def random_metric(n: int, rng, quantum: float | None = None, top: float = 0.9) -> np.ndarray:
    """A random metric on n points with diameter ``top`` (< 1).

    With ``quantum`` the raw entries are rounded to multiples of it before
    the repair, which produces plenty of exact distance ties.
    """
    rng = np.random.default_rng(rng)
    if n == 1:
        return np.zeros((1, 1))
    A = rng.uniform(0.05, 1.0, size=(n, n))
    if quantum:
        A = np.maximum(np.round(A / quantum), 1) * quantum
    D = metric_repair(np.triu(A, 1) + np.triu(A, 1).T)
    D = D / D.max() * top
    if quantum:
        # keep ties exact after rescaling
        D = np.round(D / (quantum * top)) * (quantum * top)
        D = metric_repair(D)
    return D


def random_finite_system(n: int, rng, permute: bool = True, quantum: float | None = None) -> FiniteSystem:
    rng = np.random.default_rng(rng)
    D = random_metric(n, rng, quantum)
    perm = tuple(int(v) for v in rng.permutation(n)) if permute else None
    return FiniteSystem(D, perm)


def lambda_weights(lam: float, radius: int, rank: int = 1) -> WeightFamily:
    """Explicit finite family alpha_g = lam^{|g|_1}, |g|_1 <= radius."""
    return WeightFamily(lam=lam, radius=radius, rank=rank)


def random_subshift(rng, max_points: int = 12, min_points: int = 3, tries: int = 200) -> ShiftSystem:
    """A forbidden-pattern subshift with between min_points and max_points configurations."""
    rng = np.random.default_rng(rng)
    for _ in range(tries):
        K = int(rng.integers(2, 4))
        side = int(rng.integers(2, 4))
        alpha = Alphabet.explicit(random_metric(K, rng) * 0.5)
        weights = lambda_weights(float(rng.uniform(0.2, 0.6)), int(rng.integers(1, 3)))
        pats = []
        for _ in range(int(rng.integers(1, 3))):
            L = int(rng.integers(1, 3))
            pats.append(Pattern.word([int(s) for s in rng.integers(0, K, size=L)]))
        sys = ShiftSystem(alpha, weights, side, forbidden=tuple(pats))
        if K ** side > 10_000:
            continue
        n = len(sys.enumerate())
        if min_points <= n <= max_points:
            return sys
    raise RuntimeError("could not draw a subshift of the requested size")
