"""Scale-regression estimators for mean dimensions.

Every estimator evaluates a grid of (eps, n) tasks, normalizes by |F_n|,
replaces limsup/liminf over n by max/min over the tail of the index range,
and replaces the eps -> 0 limit by a least-squares slope against |log eps|
(natural logarithms throughout).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, EstimationError, ResourceError
from .group import FolnerSequence, box, folner_window
from .hausdorff import dim_at_scale
from .packing import (
    TIE_TOL, CountQuery, katok_spanning, max_separated, min_cover, min_spanning,
    resolve_distances, untie_epsilon,
)
from .systems import DEFAULT_BUDGET, ShiftSystem, WeightedPointSet

FLAVORS = ("s", "r", "cov")


@dataclass(frozen=True)
class ScaleGrid:
    epsilons: tuple
    ns: tuple
    tail_fraction: float = 0.5

    def __post_init__(self):
        e = np.asarray(self.epsilons, dtype=float)
        if len(e) < 4 or len(self.ns) < 4:
            raise ConfigError("scale grid needs at least 4 epsilons and 4 window indices", key="grid")
        if np.any(np.diff(e) >= 0) or e[-1] <= 0 or e[0] >= 1:
            raise ConfigError("epsilons must be strictly decreasing inside (0, 1)", key="grid.epsilons")
        if list(self.ns) != sorted(set(self.ns)) or self.ns[0] < 1:
            raise ConfigError("window indices must be increasing positive integers", key="grid.ns")
        if not 0 < self.tail_fraction <= 1:
            raise ConfigError("tail_fraction must lie in (0, 1]", key="grid.tail_fraction")
        object.__setattr__(self, "epsilons", tuple(float(v) for v in e))
        object.__setattr__(self, "ns", tuple(int(v) for v in self.ns))

    @classmethod
    def geometric(cls, eps_max: float, eps_min: float, k: int, ns, tail_fraction: float = 0.5):
        return cls(tuple(np.geomspace(eps_max, eps_min, k).tolist()), tuple(ns), tail_fraction)

    def tail(self, fraction: float | None = None) -> list:
        """Indices (into ns) of the largest ceil(fraction * len(ns)) windows."""
        f = self.tail_fraction if fraction is None else fraction
        k = max(1, math.ceil(f * len(self.ns)))
        return list(range(len(self.ns) - k, len(self.ns)))

    def mapped(self, t) -> "ScaleGrid":
        """Same grid with every eps replaced by t(eps)."""
        return ScaleGrid(tuple(float(t(e)) for e in self.epsilons), self.ns, self.tail_fraction)

    def check_resolution(self, floor: float) -> None:
        if self.epsilons[-1] < floor * (1 - 1e-12):
            raise ConfigError(
                f"smallest epsilon {self.epsilons[-1]} is below the resolution floor {floor}",
                key="grid.epsilons",
            )


def ols_slope(x, y) -> tuple:
    """(slope, intercept, rms residual) of y against x."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    A = np.vstack([x, np.ones_like(x)]).T
    (m, c), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (m * x + c)
    return float(m), float(c), float(np.sqrt(np.mean(res ** 2)))


@dataclass
class DimensionReport:
    """Per-(eps, n) normalized values and their tail/slope summaries.

    ``values[f][i, k]`` is log count_f(eps_i, n_k) / |F_{n_k}| for flavor f;
    ``directions[f][i][k]`` is the bound direction of that count.
    """

    kind: str
    mode: str
    epsilons: tuple
    ns: tuple
    window_sizes: tuple
    values: dict
    directions: dict
    tail_fraction: float
    primary: str
    raw: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def _usable(self, f: str) -> np.ndarray:
        return np.all(np.isfinite(self.values[f]), axis=1)

    def tail_stats(self, f: str | None = None, fraction: float | None = None):
        f = f or self.primary
        k = max(1, math.ceil((fraction or self.tail_fraction) * len(self.ns)))
        V = self.values[f][:, len(self.ns) - k:]
        return V.max(axis=1), V.min(axis=1)

    def slopes(self, f: str | None = None, fraction: float | None = None) -> dict:
        f = f or self.primary
        ok = self._usable(f)
        if ok.sum() < 2:
            raise EstimationError(f"fewer than 2 usable epsilons for flavor {f}")
        tmax, tmin = self.tail_stats(f, fraction)
        L = np.abs(np.log(np.asarray(self.epsilons)))[ok]
        if self.kind == "hausdorff":
            # dim_at_scale already carries the 1/|log eps| normalization
            return {"upper": float(tmax[ok][-1]), "lower": float(tmin[ok][-1]),
                    "upper_resid": 0.0, "lower_resid": 0.0,
                    "trend": float(tmax[ok][-1] - tmax[ok][-2])}
        up, _, ru = ols_slope(L, tmax[ok])
        lo, _, rl = ols_slope(L, tmin[ok])
        return {"upper": up, "lower": lo, "upper_resid": ru, "lower_resid": rl}

    @property
    def upper(self) -> float:
        return self.slopes()["upper"]

    @property
    def lower(self) -> float:
        return self.slopes()["lower"]

    def smallest_eps_ratio(self, f: str | None = None) -> float:
        """tail_max at the smallest usable eps divided by |log eps|."""
        f = f or self.primary
        ok = np.flatnonzero(self._usable(f))
        tmax, _ = self.tail_stats(f)
        i = ok[-1]
        if self.kind == "hausdorff":
            return float(tmax[i])
        return float(tmax[i] / abs(math.log(self.epsilons[i])))

    def tail_sensitivity(self) -> dict:
        full = self.slopes()
        half = self.slopes(fraction=self.tail_fraction / 2)
        return {"upper": half["upper"] - full["upper"], "lower": half["lower"] - full["lower"]}

    def flavor_spread(self) -> float:
        ups = [self.slopes(f)["upper"] for f in self.values if self._usable(f).sum() >= 2]
        return float(max(ups) - min(ups)) if ups else 0.0

    @property
    def ordering_ok(self) -> bool:
        s = self.slopes()
        return s["lower"] <= s["upper"] + 1e-9

    @property
    def uncertain(self) -> bool:
        return any(d != "exact" for f in self.directions for row in self.directions[f] for d in row)

    def direction_flag(self) -> str:
        """Combined direction of the primary flavor ('exact' only if every count is exact)."""
        ds = {d for row in self.directions[self.primary] for d in row}
        return ds.pop() if len(ds) == 1 else "mixed"

    def summary(self) -> dict:
        s = self.slopes()
        out = {
            "kind": self.kind,
            "mode": self.mode,
            "primary": self.primary,
            "direction": self.direction_flag(),
            "upper": s["upper"],
            "lower": s["lower"],
            "upper_fit_residual": s["upper_resid"],
            "lower_fit_residual": s["lower_resid"],
            "smallest_eps_ratio": self.smallest_eps_ratio(),
            "tail_fraction": self.tail_fraction,
            "tail_sensitivity": self.tail_sensitivity(),
            "flavor_spread": self.flavor_spread(),
            "ordering_ok": self.ordering_ok,
            "flavors": {f: self.slopes(f) for f in self.values if self._usable(f).sum() >= 2},
        }
        if "trend" in s:
            out["trend"] = s["trend"]
        out.update(self.meta)
        return out


# ---------------------------------------------------------------------------
# task plumbing


def _task_seeds(seed: int, n_tasks: int) -> list:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n_tasks)]


def run_tasks(fn: Callable, tasks: list, workers: int = 1) -> list:
    """Evaluate fn over tasks, in order; a process pool when workers > 1."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


def system_for(sys, n: int, folner: FolnerSequence | None, matched: bool):
    """(system, window) for index n; matched shift systems get W_n = F_n."""
    if folner is None:
        folner = FolnerSequence.boxes(rank=sys.rank, n_max=max(n, 1))
    F = folner_window(folner, n)
    if matched and hasattr(sys, "with_side"):
        if not folner.is_box_family:
            raise ConfigError("window matching needs the box Følner family", key="folner")
        return sys.with_side(n), F
    return sys, F


def resolution_floor(sys) -> float:
    """Smallest admissible epsilon: the image of 2 * alphabet step under the metric."""
    if not isinstance(sys, ShiftSystem) or sys.alphabet.kind == "explicit":
        return 0.0
    v = 2 * sys.alphabet.resolution * sys.scale
    return float(sys.transform(v)) if sys.transform is not None else v


# ---------------------------------------------------------------------------
# metric mean dimension


def _volumetric_log_mass(sys: ShiftSystem, F, centers: np.ndarray, eps: float, N: int,
                         rng: np.random.Generator, p_allowed: float) -> tuple:
    """log of the uniform-measure mass of closed d_F-balls of radius eps around centers.

    Samples N configurations uniformly from the coordinate box that contains
    the ball and tests membership with the true Bowen distance.
    """
    base_eps = eps if sys.transform is None else float(sys.transform.inverse(eps))
    base_eps /= sys.scale
    Wm = sys.weight_matrix(F)
    wmax = Wm.max(axis=0)
    rho = sys.alphabet.dist
    K, m = sys.alphabet.size, sys.n_coords
    logs, empty = [], 0
    for x in centers:
        cols, log_box = [], 0.0
        for j in range(m):
            r = base_eps / wmax[j] if wmax[j] > 0 else np.inf
            S = np.flatnonzero(rho[x[j]] <= r + TIE_TOL)
            cols.append(S[rng.integers(0, len(S), size=N)])
            log_box += math.log(len(S))
        Y = np.stack(cols, axis=1)
        inside = sys.pairwise_bowen(x[None], F, Y)[0] <= eps + TIE_TOL
        if sys.forbidden:
            inside &= sys.allowed(Y)
        hits = int(inside.sum())
        if hits == 0:
            empty += 1
            hits = 0.5
        logs.append(math.log(hits / N) + log_box - m * math.log(K) - math.log(p_allowed))
    return float(np.mean(logs)), empty


def _metric_task(args):
    kind = args["kind"]
    sys_n, F, eps, seed = args["sys"], args["F"], args["eps"], args["seed"]
    rng = np.random.default_rng(seed)
    size = len(F)
    if kind == "sampled":
        p_allowed = 1.0
        if sys_n.forbidden:
            probe = rng.integers(0, sys_n.alphabet.size, size=(args["N"], sys_n.n_coords))
            p_allowed = max(sys_n.allowed(probe).mean(), 0.5 / args["N"])
        centers = sys_n.sample(args["centers"], rng)
        out, dirs, raw = {}, {}, {}
        empties = 0
        for f, radius in (("r", eps), ("s", eps / 2)):
            lm, e = _volumetric_log_mass(sys_n, F, centers, radius, args["N"], rng, p_allowed)
            empties += e
            out[f] = -lm / size
            raw[f] = math.exp(-lm)
            dirs[f] = "estimate"
        if args.get("sample_s"):
            pts = sys_n.sample(args["N"], rng)
            rep = max_separated(pts, sys_n, CountQuery(eps, window=tuple(F), mode="greedy"))
            raw["sample_s"] = rep.value
            raw["sample_s_saturated"] = rep.value > args["N"] // 2
        raw["empty_balls"] = empties
        return out, dirs, raw
    # exact / greedy on an explicit point set
    pts = args["points"]
    D = resolve_distances(pts, sys_n, tuple(F))
    e_used, _ = untie_epsilon(D, eps)
    q = CountQuery(e_used, mode=kind, node_budget=args["node_budget"])
    reps = {"s": max_separated(None, D, q), "r": min_spanning(None, D, q)}
    try:
        reps["cov"] = min_cover(None, D, q)
    except ResourceError:
        reps["cov"] = None
    out, dirs, raw = {}, {}, {}
    for f, rep in reps.items():
        if rep is None:
            out[f], dirs[f], raw[f] = float("nan"), "failed", None
            continue
        d = rep.bound_direction
        if args["subsampled"] and d == "exact":
            d = "lower" if f == "s" else "estimate"
        elif args["subsampled"] and f != "s":
            d = "estimate"
        out[f] = math.log(rep.value) / size
        raw[f] = rep.value
        dirs[f] = d
    raw["eps_used"] = e_used
    return out, dirs, raw


def _points_for(sys_n, mode: str, N: int, budget: int, seed) -> tuple:
    try:
        return sys_n.enumerate(budget if mode == "exact" else N), False
    except ResourceError:
        if mode == "exact":
            raise
        X = sys_n.sample(N, seed)
        return np.unique(X, axis=0), True


def mdim_metric_estimate(sys, grid: ScaleGrid, mode: str = "exact", *, N: int = 2000,
                         centers: int = 16, seed: int = 0, folner: FolnerSequence | None = None,
                         matched: bool = True, node_budget: int = 10_000_000,
                         point_budget: int = DEFAULT_BUDGET, primary: str | None = None,
                         workers: int = 1, sample_s: bool = False) -> DimensionReport:
    """Upper/lower metric mean dimension by slope regression.

    ``mode='sampled'`` uses the volumetric estimator: log r(eps) is replaced by
    -log mu(B(x, eps)) for the uniform measure, averaged over ``centers``
    random centers, and log s(eps) by the same at radius eps/2.  Both carry
    bound direction ``estimate``.
    """
    if mode not in ("exact", "greedy", "sampled"):
        raise ConfigError(f"unknown mode {mode!r}", key="mode")
    grid.check_resolution(resolution_floor(sys))
    if mode == "sampled" and not isinstance(sys, ShiftSystem):
        raise ConfigError("sampled mode needs a shift system", key="mode")
    flavors = ("r", "s") if mode == "sampled" else FLAVORS
    primary = primary or {"exact": "cov", "greedy": "r", "sampled": "r"}[mode]
    if primary not in flavors:
        raise ConfigError(f"flavor {primary!r} is not available in {mode} mode", key="primary")
    E, K = len(grid.epsilons), len(grid.ns)
    seeds = _task_seeds(seed, E * K)
    tasks, sizes = [], []
    for k, n in enumerate(grid.ns):
        sys_n, F = system_for(sys, n, folner, matched)
        sizes.append(len(F))
        pts, sub = (None, False) if mode == "sampled" else _points_for(
            sys_n, mode, N, point_budget, _task_seeds(seed + 1, K)[k])
        for i, eps in enumerate(grid.epsilons):
            tasks.append({
                "kind": mode, "sys": sys_n, "F": tuple(F), "eps": eps, "seed": seeds[i * K + k],
                "N": N, "centers": centers, "points": pts, "subsampled": sub,
                "node_budget": node_budget, "sample_s": sample_s,
            })
    results = run_tasks(_metric_task, tasks, workers)
    values = {f: np.full((E, K), np.nan) for f in flavors}
    dirs = {f: [["" for _ in range(K)] for _ in range(E)] for f in flavors}
    raw = {}
    for k in range(K):
        for i in range(E):
            out, dd, rr = results[k * E + i]
            for f in flavors:
                values[f][i, k] = out[f]
                dirs[f][i][k] = dd[f]
            raw[(i, k)] = rr
    rep = DimensionReport("metric", mode, grid.epsilons, grid.ns, tuple(sizes), values, dirs,
                          grid.tail_fraction, primary, raw,
                          {(i, k): seeds[i * K + k] for i in range(E) for k in range(K)})
    if sum(rep._usable(primary)) < 2:
        raise EstimationError("fewer than 2 usable epsilons")
    return rep


# ---------------------------------------------------------------------------
# mean Hausdorff dimension


def _hausdorff_task(args):
    D = args["D"]
    r = dim_at_scale(None, D, args["eps"], args["phi"], args["floor"], args["hmode"],
                     exact_limit=args["limit"])
    return r.value, r.width, r.capped


def mdim_hausdorff_estimate(sys, grid: ScaleGrid, floor: float, *, phi: float = 1.0,
                            mode: str = "exact", points=None, max_points: int = 10, seed: int = 0,
                            folner: FolnerSequence | None = None, matched: bool = False,
                            exact_limit: int = 14, workers: int = 1) -> DimensionReport:
    """dim_at_scale(E, d_{F_n}, eps) / |F_n| over the grid.

    The point set E is ``points`` if given, else the enumerated system when
    it has at most ``max_points`` points, else ``max_points`` distinct
    seeded samples.  Alongside, the cover-count ratio
    (log cov(eps) - log phi) / (|F_n| |log eps|) is computed on the same E,
    which bounds the Hausdorff value from above whenever floor <= eps.
    """
    if grid.epsilons[0] >= 1:
        raise ConfigError("Hausdorff estimates need eps < 1", key="grid.epsilons")
    E, K = len(grid.epsilons), len(grid.ns)
    tasks, sizes, covs = [], [], np.full((E, K), np.nan)
    for k, n in enumerate(grid.ns):
        sys_n, F = system_for(sys, n, folner, matched)
        sizes.append(len(F))
        pts = points
        if pts is None:
            try:
                pts = sys_n.enumerate(max_points)
            except ResourceError:
                X = np.unique(sys_n.sample(20 * max_points, seed + k), axis=0)
                pts = X[np.random.default_rng(seed + k).permutation(len(X))[:max_points]]
        D = resolve_distances(pts, sys_n, tuple(F))
        for i, eps in enumerate(grid.epsilons):
            tasks.append({"D": D, "eps": eps, "phi": phi, "floor": floor, "hmode": mode,
                          "limit": exact_limit})
            c = min_cover(None, D, CountQuery(eps, mode="exact" if len(D) <= 24 else "greedy"))
            covs[i, k] = (math.log(c.value) - math.log(phi)) / (len(F) * abs(math.log(eps)))
    results = run_tasks(_hausdorff_task, tasks, workers)
    vals = np.zeros((E, K))
    capped = False
    for k in range(K):
        for i in range(E):
            v, _, cap = results[k * E + i]
            vals[i, k] = v / sizes[k]
            capped |= cap
    d = "exact" if mode == "exact" else "upper"
    rep = DimensionReport("hausdorff", mode, grid.epsilons, grid.ns, tuple(sizes),
                          {"H": vals, "cov_ratio": covs},
                          {"H": [[d] * K for _ in range(E)], "cov_ratio": [["exact"] * K for _ in range(E)]},
                          grid.tail_fraction, "H",
                          meta={"floor": floor, "phi": phi, "capped": capped})
    return rep


def hausdorff_metric_ordering(rep: DimensionReport) -> dict:
    """Compare the Hausdorff surrogate with the cover-ratio surrogate at the smallest eps."""
    h = rep.smallest_eps_ratio("H")
    tmax, _ = rep.tail_stats("cov_ratio")
    m = float(tmax[-1])
    return {"hausdorff": h, "metric": m, "margin": m - h}


# ---------------------------------------------------------------------------
# Minkowski dimension of the alphabet


@dataclass
class MinkowskiReport:
    epsilons: tuple
    counts: tuple
    slope: float
    upper: float
    lower: float
    directions: tuple

    def summary(self) -> dict:
        return {"slope": self.slope, "upper": self.upper, "lower": self.lower,
                "counts": list(self.counts), "epsilons": list(self.epsilons)}


def minkowski_dim_estimate(space, epsilons: Sequence[float], node_budget: int = 10_000_000,
                           resolution: float | None = None) -> MinkowskiReport:
    """log N(eps) against |log eps|, N = maximal eps-separated count (exact).

    ``space`` is an Alphabet or a distance matrix.  ``upper``/``lower`` are
    the max/min of log N / |log eps| over the smaller half of the grid.
    """
    if hasattr(space, "dist"):
        D = space.dist
        resolution = space.resolution if resolution is None else resolution
    else:
        D = np.asarray(space, dtype=float)
    eps = np.asarray(epsilons, dtype=float)
    if len(eps) < 2 or np.any(np.diff(eps) >= 0):
        raise ConfigError("epsilon grid must be strictly decreasing", key="grid.epsilons")
    if resolution is not None and eps[-1] < 2 * resolution * (1 - 1e-12):
        raise ConfigError("epsilon below twice the alphabet step", key="grid.epsilons")
    counts, dirs = [], []
    for e in eps:
        rep = max_separated(None, D, CountQuery(float(e), node_budget=node_budget))
        counts.append(rep.value)
        dirs.append(rep.bound_direction)
    L = np.abs(np.log(eps))
    logN = np.log(counts)
    slope, _, _ = ols_slope(L, logN)
    half = slice(len(eps) // 2, None)
    ratio = logN[half] / L[half]
    return MinkowskiReport(tuple(eps.tolist()), tuple(counts), slope, float(ratio.max()),
                           float(ratio.min()), tuple(dirs))


def grid_separated_count(step: float, eps: float) -> int:
    """Closed form of N(eps) for the step-grid on [0, 1]: spacing k*step, k = floor(eps/step)+1."""
    K = int(math.floor(1.0 / step + 1e-9))
    k = int(math.floor(eps / step + 1e-9)) + 1
    return K // k + 1


# ---------------------------------------------------------------------------
# Katok profile


@dataclass
class KatokProfile:
    epsilons: tuple
    ns: tuple
    katok: np.ndarray  # (1/|F_n|) log katok
    spanning: np.ndarray  # (1/|F_n|) log r
    counts: dict
    delta: float

    @property
    def dominated(self) -> bool:
        return bool(np.all(self.katok <= self.spanning + 1e-12))

    def tail_stats(self, tail_fraction: float = 0.5):
        k = max(1, math.ceil(tail_fraction * len(self.ns)))
        V = self.katok[:, len(self.ns) - k:]
        return V.max(axis=1), V.min(axis=1)


def katok_profile(sys, mu, grid: ScaleGrid, delta: float, *, folner=None, matched: bool = False,
                  points=None, budget: int = DEFAULT_BUDGET) -> KatokProfile:
    """(1/|F_n|) log katok_spanning over the grid, next to the r profile.

    ``mu`` is a WeightedPointSet on ``points`` (or the enumerated system), or
    a callable mapping a point array to a WeightedPointSet.
    """
    E, K = len(grid.epsilons), len(grid.ns)
    kat, span = np.zeros((E, K)), np.zeros((E, K))
    counts = {}
    for k, n in enumerate(grid.ns):
        sys_n, F = system_for(sys, n, folner, matched)
        pts = points if points is not None else sys_n.enumerate(budget)
        m = mu(pts) if callable(mu) else mu
        D = resolve_distances(pts, sys_n, tuple(F))
        for i, eps in enumerate(grid.epsilons):
            e, _ = untie_epsilon(D, eps, multiples=(1.0,))
            a = katok_spanning(None, D, m, e, delta).value
            r = min_spanning(None, D, CountQuery(e)).value
            kat[i, k] = math.log(a) / len(F)
            span[i, k] = math.log(r) / len(F)
            counts[(i, k)] = (a, r)
    return KatokProfile(grid.epsilons, grid.ns, kat, span, counts, delta)
