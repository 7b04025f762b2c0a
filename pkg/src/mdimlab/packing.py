"""Counting kernels: separated, spanning and cover numbers, the count chain, Katok numbers.

All solvers work on a precomputed Bowen distance matrix.  Comparisons use
the strictness of the definitions with an absolute tolerance ``TIE_TOL`` so
that decimal inputs such as 0.9 - 0.6 compare as the written value:

    separated   d > eps        (d > eps + TIE_TOL)
    spanning    d <= eps       (d <= eps + TIE_TOL)
    cover mesh  diam < eps     (diam < eps - TIE_TOL)
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError, ConsistencyError, ResourceError
from .systems import WeightedPointSet

TIE_TOL = 1e-12
JITTER = 1e-9
DEFAULT_NODE_BUDGET = 10_000_000
DEFAULT_CLIQUE_BUDGET = 200_000

MODES = ("exact", "greedy", "sampled")


@dataclass(frozen=True)
class CountQuery:
    epsilon: float
    window: tuple | None = None
    mode: str = "exact"
    N: int | None = None
    seed: int | None = None
    node_budget: int = DEFAULT_NODE_BUDGET
    on_budget: str = "degrade"  # or "raise"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive", key="epsilon")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}", key="mode")
        if self.mode == "sampled" and (self.N is None or self.N < 2):
            raise ConfigError("sampled mode needs N >= 2", key="sample.N")
        if self.on_budget not in ("degrade", "raise"):
            raise ConfigError("on_budget must be 'degrade' or 'raise'", key="on_budget")


@dataclass
class CountReport:
    value: int
    bound_direction: str  # exact | lower | upper | estimate
    witness: list | None = None
    nodes: int = 0
    seconds: float = 0.0
    certified_bound: int | None = None  # the other side of the bracket, when known
    note: str = ""


# ---------------------------------------------------------------------------
# distance resolution


def resolve_distances(points, dist, window=None) -> np.ndarray:
    """Turn ``dist`` into a square Bowen distance matrix over ``points``.

    ``dist`` may be a matrix, an object with ``pairwise_bowen`` (a system),
    or a callable ``dist(x, y)`` already including the window.
    """
    if isinstance(dist, np.ndarray):
        D = np.asarray(dist, dtype=float)
    elif hasattr(dist, "pairwise_bowen"):
        D = dist.pairwise_bowen(points, window)
    elif callable(dist):
        pts = list(points)
        D = np.array([[float(dist(p, q)) for q in pts] for p in pts])
    else:
        raise ConfigError("dist must be a matrix, a system or a callable")
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
        raise ConfigError("need a nonempty square distance matrix")
    return D


def _bits(mask_row: np.ndarray) -> int:
    """Boolean vector -> python int bitset (bit i set iff row[i])."""
    packed = np.packbits(np.asarray(mask_row, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _members(b: int) -> list:
    return [i for i, c in enumerate(reversed(bin(b)[2:])) if c == "1"]


def _popcount(b: int) -> int:
    return bin(b).count("1")


class _Budget(Exception):
    pass


# ---------------------------------------------------------------------------
# maximum clique (separated sets)


def greedy_separated(D: np.ndarray, eps: float) -> list:
    """Lowest-index-first maximal separated set (a lower bound for s)."""
    chosen: list = []
    for i in range(len(D)):
        if all(D[i, j] > eps + TIE_TOL for j in chosen):
            chosen.append(i)
    return chosen


def _colour_sort(P: int, adj: list) -> tuple:
    """Greedy colouring of P in index order; returns (order, colours) ascending."""
    order, colours = [], []
    uncoloured = P
    c = 0
    while uncoloured:
        c += 1
        Q = uncoloured
        while Q:
            v = (Q & -Q).bit_length() - 1
            Q &= ~(1 << v)
            Q &= ~adj[v]
            uncoloured &= ~(1 << v)
            order.append(v)
            colours.append(c)
    return order, colours


def max_clique(adj: list, n: int, lower: list, budget: int):
    """Branch and bound maximum clique with colouring bounds.

    Returns (best, nodes, complete, root_bound).
    """
    best = list(lower)
    nodes = 0
    root = (1 << n) - 1
    _, root_col = _colour_sort(root, adj)
    root_bound = max(root_col) if root_col else 0

    def expand(R: list, P: int):
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        order, colours = _colour_sort(P, adj)
        for k in range(len(order) - 1, -1, -1):
            if len(R) + colours[k] <= len(best):
                return
            v = order[k]
            R.append(v)
            NP = P & adj[v]
            if NP:
                expand(R, NP)
            elif len(R) > len(best):
                best = list(R)
            R.pop()
            P &= ~(1 << v)

    try:
        if len(best) < root_bound:
            expand([], root)
        return best, nodes, True, root_bound
    except _Budget:
        return best, nodes, False, root_bound


def max_separated(points, dist, q: CountQuery) -> CountReport:
    """Largest (F, eps)-separated subset: pairwise d_F > eps."""
    D = resolve_distances(points, dist, q.window)
    t0 = time.perf_counter()
    D, sub = _maybe_subsample(D, q)
    eps = q.epsilon
    lower = greedy_separated(D, eps)
    if q.mode != "exact":
        direction = "lower"
        return CountReport(len(lower), direction, _lift(lower, sub), 0, time.perf_counter() - t0)
    n = len(D)
    sep = D > eps + TIE_TOL
    np.fill_diagonal(sep, False)
    adj = [_bits(sep[i]) for i in range(n)]
    best, nodes, done, ub = max_clique(adj, n, lower, q.node_budget)
    if done:
        return CountReport(len(best), "exact", sorted(best), nodes, time.perf_counter() - t0,
                           certified_bound=len(best))
    _budget_overflow(q, "max_separated", nodes)
    return CountReport(len(best), "lower", sorted(best), nodes, time.perf_counter() - t0,
                       certified_bound=ub, note="node budget exceeded")


# ---------------------------------------------------------------------------
# unweighted set cover


def greedy_set_cover(universe: int, sets: list) -> list:
    """Max-coverage greedy; ties go to the lowest set index."""
    chosen, U = [], universe
    while U:
        gains = [_popcount(s & U) for s in sets]
        k = int(np.argmax(gains))
        if gains[k] == 0:
            raise ConsistencyError("sets do not cover the universe")
        chosen.append(k)
        U &= ~sets[k]
    return chosen


def set_cover(universe: int, sets: list, budget: int, upper: list | None = None):
    """Exact minimum set cover by branch and bound.

    Branches on the uncovered element with the fewest covering sets.  The
    lower bound is the larger of ceil(|U| / max set size) and the number of
    pairwise set-disjoint uncovered elements.  Returns (best, nodes, complete).
    """
    if upper is None:
        upper = greedy_set_cover(universe, sets)
    best = list(upper)
    n = universe.bit_length()
    containing = [[k for k, s in enumerate(sets) if s >> e & 1] for e in range(n)]
    share = [0] * n
    for e in range(n):
        m = 0
        for k in containing[e]:
            m |= sets[k]
        share[e] = m
    by_rarity = sorted(range(n), key=lambda e: (len(containing[e]), e))
    nodes = 0

    def lower_bound(U: int) -> int:
        if not U:
            return 0
        big = max(_popcount(s & U) for s in sets)
        lb1 = -(-_popcount(U) // big)
        blocked, lb2 = 0, 0
        for e in by_rarity:
            if U >> e & 1 and not blocked >> e & 1:
                lb2 += 1
                blocked |= share[e]
        return max(lb1, lb2)

    def search(U: int, chosen: list):
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        if not U:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        if len(chosen) + lower_bound(U) >= len(best):
            return
        e = next(e for e in by_rarity if U >> e & 1)
        opts = sorted(containing[e], key=lambda k: (-_popcount(sets[k] & U), k))
        for k in opts:
            chosen.append(k)
            search(U & ~sets[k], chosen)
            chosen.pop()
            if len(chosen) + 1 >= len(best):
                return

    try:
        search(universe, [])
        return best, nodes, True
    except _Budget:
        return best, nodes, False


def _cover_report(universe, sets, q, name, t0, labels=None):
    greedy = greedy_set_cover(universe, sets)
    lab = (lambda ks: [labels[k] for k in ks]) if labels is not None else (lambda ks: ks)
    if q.mode != "exact":
        return CountReport(len(greedy), "upper", lab(greedy), 0, time.perf_counter() - t0)
    best, nodes, done = set_cover(universe, sets, q.node_budget, greedy)
    if done:
        return CountReport(len(best), "exact", lab(best), nodes, time.perf_counter() - t0,
                           certified_bound=len(best))
    _budget_overflow(q, name, nodes)
    return CountReport(len(best), "upper", lab(best), nodes, time.perf_counter() - t0,
                       note="node budget exceeded")


def min_spanning(points, dist, q: CountQuery) -> CountReport:
    """Smallest (F, eps)-spanning subset of the points: every point within d_F <= eps."""
    D = resolve_distances(points, dist, q.window)
    t0 = time.perf_counter()
    D, sub = _maybe_subsample(D, q)
    near = D <= q.epsilon + TIE_TOL
    sets = [_bits(near[:, y]) for y in range(len(D))]
    rep = _cover_report((1 << len(D)) - 1, sets, q, "min_spanning", t0)
    if q.mode == "sampled":
        rep.bound_direction = "estimate"
    rep.witness = _lift(sorted(rep.witness), sub)
    return rep


def maximal_cliques(adj: list, n: int, budget: int = DEFAULT_CLIQUE_BUDGET) -> list:
    """Bron-Kerbosch with pivoting; cliques as bitsets in discovery order."""
    out: list = []

    def bk(R: int, P: int, X: int):
        if not P and not X:
            out.append(R)
            if len(out) > budget:
                raise ResourceError(f"more than {budget} maximal cliques; use greedy mode")
            return
        PX = P | X
        u = max(_members(PX), key=lambda v: _popcount(P & adj[v]))
        for v in _members(P & ~adj[u]):
            bk(R | (1 << v), P & adj[v], X & adj[v])
            P &= ~(1 << v)
            X |= 1 << v

    bk(0, (1 << n) - 1, 0)
    return sorted(out, key=lambda b: (_members(b)))


def proximity_adjacency(D: np.ndarray, eps: float) -> list:
    close = D < eps - TIE_TOL
    np.fill_diagonal(close, False)
    return [_bits(close[i]) for i in range(len(D))]


def min_cover(points, dist, q: CountQuery) -> CountReport:
    """Fewest subsets of d_F-diameter < eps covering the points.

    Any such subset lies in a maximal clique of the proximity graph, so
    set cover over maximal cliques is exact.
    """
    D = resolve_distances(points, dist, q.window)
    t0 = time.perf_counter()
    D, sub = _maybe_subsample(D, q)
    n = len(D)
    adj = proximity_adjacency(D, q.epsilon)
    if q.mode == "exact":
        sets = maximal_cliques(adj, n)
    else:
        sets = _greedy_cliques(adj, n)
    rep = _cover_report((1 << n) - 1, sets, q, "min_cover", t0)
    if q.mode == "sampled":
        rep.bound_direction = "estimate"
    rep.witness = [_lift(_members(sets[k]) if isinstance(k, int) else k, sub) for k in rep.witness]
    return rep


def _greedy_cliques(adj: list, n: int) -> list:
    """One maximal clique grown greedily from each vertex (cheap candidate family)."""
    out = set()
    for v in range(n):
        C, P = 1 << v, adj[v]
        while P:
            u = (P & -P).bit_length() - 1
            C |= 1 << u
            P &= adj[u]
        out.add(C)
    return sorted(out, key=_members)


# ---------------------------------------------------------------------------
# chain


@dataclass(frozen=True)
class ChainReport:
    cov_2eps: int
    r: int
    s: int
    cov: int
    epsilon: float
    jittered: bool

    def as_tuple(self) -> tuple:
        return (self.cov_2eps, self.r, self.s, self.cov)

    @property
    def holds(self) -> bool:
        return self.cov_2eps <= self.r <= self.s <= self.cov


def untie_epsilon(D: np.ndarray, eps: float, multiples=(1.0, 2.0)) -> tuple:
    """Lower eps by JITTER steps until no distance ties c * eps for c in multiples."""
    vals = np.unique(D)
    e, moved = eps, False
    for _ in range(64):
        if not any(np.any(np.abs(vals - c * e) <= 4 * TIE_TOL) for c in multiples):
            return e, moved
        e -= JITTER
        moved = True
    raise ConsistencyError("could not move epsilon off distance ties")


def count_chain(points, dist, eps: float, window=None, node_budget: int = DEFAULT_NODE_BUDGET) -> ChainReport:
    """cov(2 eps) <= r(eps) <= s(eps) <= cov(eps), all exact."""
    D = resolve_distances(points, dist, window)
    e, moved = untie_epsilon(D, eps)
    mk = lambda x: CountQuery(x, mode="exact", node_budget=node_budget, on_budget="raise")
    c2 = min_cover(None, D, mk(2 * e)).value
    r = min_spanning(None, D, mk(e)).value
    s = max_separated(None, D, mk(e)).value
    c1 = min_cover(None, D, mk(e)).value
    rep = ChainReport(c2, r, s, c1, e, moved)
    if not rep.holds:
        raise ConsistencyError(f"count chain violated: {rep.as_tuple()} at eps={e}")
    return rep


# ---------------------------------------------------------------------------
# Katok numbers


def katok_spanning(points, dist, mu: WeightedPointSet, eps: float, delta: float, window=None,
                   mode: str = "exact", node_budget: int = DEFAULT_NODE_BUDGET,
                   on_budget: str = "degrade") -> CountReport:
    """Fewest centers whose closed d_F-balls of radius eps carry mass > 1 - delta."""
    if not 0 < delta < 1:
        raise ConfigError("delta must lie in (0, 1)", key="delta")
    D = resolve_distances(points, dist, window)
    n = len(D)
    if len(mu) != n:
        raise ConfigError("measure and point set differ in size", key="measure")
    t0 = time.perf_counter()
    m = mu.array
    target = 1.0 - delta + TIE_TOL
    balls = D <= eps + TIE_TOL
    B = [np.flatnonzero(balls[:, y]) for y in range(n)]

    # greedy upper bound
    covered = np.zeros(n, dtype=bool)
    greedy: list = []
    while m[covered].sum() <= target:
        gains = [m[b[~covered[b]]].sum() for b in B]
        k = int(np.argmax(gains))
        greedy.append(k)
        covered[B[k]] = True
    if mode != "exact":
        return CountReport(len(greedy), "upper", greedy, 0, time.perf_counter() - t0)

    best = list(greedy)
    nodes = 0

    def search(start: int, chosen: list, cov: np.ndarray, mass: float):
        nonlocal best, nodes
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        if mass > target:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        slots = len(best) - 1 - len(chosen)
        if slots <= 0:
            return
        gains = np.array([m[B[y][~cov[B[y]]]].sum() for y in range(start, n)])
        if gains.size == 0:
            return
        top = np.sort(gains)[::-1][:slots]
        if mass + top.sum() <= target:
            return
        for off in np.argsort(-gains, kind="stable"):
            y = start + int(off)
            if gains[off] <= 0:
                break
            new = cov.copy()
            new[B[y]] = True
            chosen.append(y)
            search(y + 1, chosen, new, float(m[new].sum()))
            chosen.pop()
            if len(chosen) + 1 >= len(best):
                return

    try:
        search(0, [], np.zeros(n, dtype=bool), 0.0)
        return CountReport(len(best), "exact", sorted(best), nodes, time.perf_counter() - t0,
                           certified_bound=len(best))
    except _Budget:
        q = CountQuery(eps, on_budget=on_budget)
        _budget_overflow(q, "katok_spanning", nodes)
        return CountReport(len(best), "upper", sorted(best), nodes, time.perf_counter() - t0,
                           note="node budget exceeded")


# ---------------------------------------------------------------------------
# helpers


def _budget_overflow(q: CountQuery, name: str, nodes: int) -> None:
    msg = f"{name}: node budget {q.node_budget} exceeded after {nodes} nodes"
    if q.on_budget == "raise":
        raise ResourceError(msg + "; use greedy mode")
    warnings.warn(msg + "; falling back to the best bound found", RuntimeWarning, stacklevel=3)


def _maybe_subsample(D: np.ndarray, q: CountQuery):
    if q.mode != "sampled" or q.N >= len(D):
        return D, None
    rng = np.random.default_rng(q.seed)
    sub = np.sort(rng.choice(len(D), size=q.N, replace=False))
    return D[np.ix_(sub, sub)], sub


def _lift(idx, sub):
    if sub is None:
        return list(idx)
    return [int(sub[i]) for i in idx]


def counts_table(D: np.ndarray, eps: float, mode: str = "exact",
                 node_budget: int = DEFAULT_NODE_BUDGET) -> dict:
    """s, r and cov at one scale on a precomputed matrix, with bound directions."""
    q = CountQuery(eps, mode=mode, node_budget=node_budget)
    return {
        "s": max_separated(None, D, q),
        "r": min_spanning(None, D, q),
        "cov": min_cover(None, D, q),
    }
