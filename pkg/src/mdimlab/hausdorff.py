"""Scale-limited Hausdorff measures and dimension at a scale on finite point sets.

H^s_eps(E) = inf sum_i effdiam(E_i)^s over covers by sets of diameter < eps,
where effdiam(A) = max(diam A, floor) and 0^0 = 1.

Exact mode runs a subset dynamic program.  The candidate family (all sets of
diameter < eps) is closed under subsets and the weight is monotone, so an
optimal cover can be taken to be a partition: the program assigns the lowest
uncovered point to one admissible block at a time.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ResourceError
from .packing import TIE_TOL, _greedy_cliques, _members, proximity_adjacency, resolve_distances

S_MAX = 64.0
BISECTION_WIDTH = 1e-6
EXACT_LIMIT = 14


@dataclass(frozen=True)
class HausdorffQuery:
    s: float
    epsilon: float
    phi: float = 1.0
    floor: float = 0.0
    mode: str = "exact"
    exact_limit: int = EXACT_LIMIT

    def __post_init__(self):
        if self.s < 0:
            raise ConfigError("s must be nonnegative", key="s")
        if not 0 < self.epsilon <= 1:
            raise ConfigError("epsilon must lie in (0, 1]", key="epsilon")
        if not self.phi > 0:
            raise ConfigError("phi must be positive", key="phi")
        if not 0 <= self.floor < 1:
            raise ConfigError("floor must lie in [0, 1)", key="floor")
        if self.mode not in ("exact", "greedy"):
            raise ConfigError(f"unknown Hausdorff mode {self.mode!r}", key="mode")


@dataclass
class DimAtScale:
    value: float
    width: float
    witness: list = field(default_factory=list)
    capped: bool = False
    below_phi: bool = False
    mode: str = "exact"


def subset_diameters(D: np.ndarray) -> np.ndarray:
    """diam[mask] for every subset mask of the points (vectorized doubling)."""
    n = len(D)
    diam = np.zeros(1 << n)
    for b in range(n):
        md = np.zeros(1 << b)
        for j in range(b):
            lo = 1 << j
            md[lo:2 * lo] = np.maximum(md[:lo], D[b, j])
        diam[1 << b: 2 << b] = np.maximum(diam[:1 << b], md)
    return diam


def _powered(e: np.ndarray, s: float) -> np.ndarray:
    # numpy follows 0**0 == 1
    return np.power(e, s)


class _ExactCovers:
    """Precomputed admissible blocks for repeated H^s evaluations."""

    def __init__(self, D: np.ndarray, eps: float, floor: float):
        n = len(D)
        self.n = n
        diam = subset_diameters(D)
        ok = diam < eps - TIE_TOL
        ok[0] = False
        masks = np.flatnonzero(ok)
        low = (masks & -masks)
        self.blocks = {}
        for b in range(n):
            sel = masks[low == (1 << b)]
            self.blocks[b] = (sel.astype(np.int64), np.maximum(diam[sel], floor))

    def measure(self, s: float, want_cover: bool = False):
        n = self.n
        full = (1 << n) - 1
        f = np.zeros(1 << n)
        choice = np.zeros(1 << n, dtype=np.int64) if want_cover else None
        wts = {b: _powered(e, s) for b, (_, e) in self.blocks.items()}
        for R in range(1, full + 1):
            b = (R & -R).bit_length() - 1
            C = self.blocks[b][0]
            fit = (C & ~R) == 0
            Cf = C[fit]
            tot = wts[b][fit] + f[R ^ Cf]
            k = int(np.argmin(tot))
            f[R] = tot[k]
            if want_cover:
                choice[R] = Cf[k]
        if not want_cover:
            return float(f[full]), None
        cover, R = [], full
        while R:
            cover.append(_members(int(choice[R])))
            R ^= int(choice[R])
        return float(f[full]), cover


class _BallCovers:
    """Ball-cover variant: blocks are balls {y : d(x, y) <= r} of diameter < eps."""

    def __init__(self, D: np.ndarray, eps: float, floor: float):
        n = len(D)
        self.n = n
        diam = subset_diameters(D)
        balls = set()
        for x in range(n):
            for r in np.unique(D[x]):
                m = 0
                for y in np.flatnonzero(D[x] <= r + TIE_TOL).tolist():
                    m |= 1 << y
                if diam[m] < eps - TIE_TOL:
                    balls.add(m)
        self.balls = np.array(sorted(balls), dtype=np.int64)
        self.eff = np.maximum(diam[self.balls], floor)

    def measure(self, s: float, want_cover: bool = False):
        n = self.n
        full = (1 << n) - 1
        w = _powered(self.eff, s)
        f = np.full(1 << n, np.inf)
        f[0] = 0.0
        choice = np.zeros(1 << n, dtype=np.int64)
        # f[U] = cheapest cover of the uncovered set U
        for U in range(1, full + 1):
            b = U & -U
            hit = (self.balls & b) != 0
            Bs = self.balls[hit]
            tot = w[hit] + f[U & ~Bs]
            k = int(np.argmin(tot))
            f[U] = tot[k]
            choice[U] = Bs[k]
        if not want_cover:
            return float(f[full]), None
        cover, U = [], full
        while U:
            cover.append(_members(int(choice[U])))
            U &= ~int(choice[U])
        return float(f[full]), cover


class _GreedyCovers:
    """Greedy weighted cover over maximal-clique blocks (an upper bound on H)."""

    def __init__(self, D: np.ndarray, eps: float, floor: float):
        self.D, self.floor, self.n = D, floor, len(D)
        adj = proximity_adjacency(D, eps)
        self.blocks = [_members(c) for c in _greedy_cliques(adj, self.n)]

    def _eff(self, idx) -> float:
        d = float(self.D[np.ix_(idx, idx)].max()) if len(idx) > 1 else 0.0
        return max(d, self.floor)

    def measure(self, s: float, want_cover: bool = False):
        left = set(range(self.n))
        total, cover = 0.0, []
        while left:
            best = None
            for blk in self.blocks:
                part = sorted(left.intersection(blk))
                if not part:
                    continue
                cost = self._eff(part) ** s / len(part)
                if best is None or cost < best[0] - 1e-15:
                    best = (cost, part)
            part = best[1]
            total += self._eff(part) ** s
            cover.append(part)
            left.difference_update(part)
        return total, (cover if want_cover else None)


def _solver(D, eps, floor, mode, limit, balls=False):
    n = len(D)
    if mode == "exact" or balls:
        if n > limit:
            raise ResourceError(f"{n} points exceed the exact Hausdorff limit {limit}; use greedy")
        return (_BallCovers if balls else _ExactCovers)(D, eps, floor)
    return _GreedyCovers(D, eps, floor)


def hausdorff_measure_at_scale(points, dist, q: HausdorffQuery, window=None) -> float:
    D = resolve_distances(points, dist, window)
    return _solver(D, q.epsilon, q.floor, q.mode, q.exact_limit).measure(q.s)[0]


def _bisect(solver, phi: float, mode: str) -> DimAtScale:
    h0, cover0 = solver.measure(0.0, want_cover=True)
    if h0 < phi:
        return DimAtScale(0.0, 0.0, cover0, below_phi=True, mode=mode)
    hmax, cover = solver.measure(S_MAX, want_cover=True)
    if hmax >= phi:
        warnings.warn(f"H^s stays >= phi up to s = {S_MAX}; value is capped", RuntimeWarning,
                      stacklevel=3)
        return DimAtScale(S_MAX, 0.0, cover, capped=True, mode=mode)
    lo, hi = 0.0, S_MAX
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if solver.measure(mid)[0] >= phi:
            lo = mid
        else:
            hi = mid
    _, witness = solver.measure(lo, want_cover=True)
    return DimAtScale(0.5 * (lo + hi), hi - lo, witness, mode=mode)


def dim_at_scale(points, dist, eps: float, phi: float = 1.0, floor: float = 0.0,
                 mode: str = "exact", window=None, exact_limit: int = EXACT_LIMIT) -> DimAtScale:
    """sup{s >= 0 : H^s_eps >= phi} by bisection on [0, 64]."""
    HausdorffQuery(0.0, eps, phi, floor, mode, exact_limit)
    D = resolve_distances(points, dist, window)
    return _bisect(_solver(D, eps, floor, mode, exact_limit), phi, mode)


def ball_dim_at_scale(points, dist, eps: float, phi: float = 1.0, floor: float = 0.0,
                      window=None, exact_limit: int = EXACT_LIMIT) -> DimAtScale:
    """Same bisection with covers restricted to metric balls centred at the points."""
    HausdorffQuery(0.0, eps, phi, floor, "exact", exact_limit)
    D = resolve_distances(points, dist, window)
    return _bisect(_solver(D, eps, floor, "exact", exact_limit, balls=True), phi, "ball")


def closed_form_separated(m: int, floor: float) -> float:
    """dim at scale of m points pairwise >= eps apart with floor f: log m / |log f|."""
    return math.log(m) / -math.log(floor)
