"""Shift systems over finite alphabets with summed weighted metrics.

Configurations live on a box window W = origin + [0, m)^rank and are stored
as int arrays of symbol indices in C order.  Under the periodic policy a
configuration on W stands for the periodic point of X^{Z^rank} it
generates, so the summed metric folds the weights modulo m:

    d(x, y) = sum_{g in supp(alpha)} alpha_g * rho(x_{g mod m}, y_{g mod m}).

The strict policy uses the same sum but refuses to evaluate coordinates
that fall outside W.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

import numpy as np

from .errors import ConfigError, DomainError, ResourceError
from .group import FiniteWindow, as_element, box
from .metric import MetricSpec, MetricTransform

DEFAULT_BUDGET = 200_000
ROW_CHUNK = 256


# ---------------------------------------------------------------------------
# alphabets


@dataclass(frozen=True)
class Alphabet:
    """Finite metric alphabet.

    kind ``interval``: the grid {0, step, 2 step, ...} inside [0, 1], |x - y|.
    kind ``circle``: the grid inside [0, 1) with the circle distance.
    kind ``explicit``: a user distance matrix, symbols are 0..K-1.
    """

    kind: str
    step: float | None = None
    matrix: tuple | None = None

    def __post_init__(self):
        if self.kind in ("interval", "circle"):
            if self.step is None or not 0 < self.step <= 1:
                raise ConfigError("alphabet step must lie in (0, 1]", key="alphabet.step")
        elif self.kind == "explicit":
            if self.matrix is None:
                raise ConfigError("explicit alphabet needs a matrix", key="alphabet.matrix")
            D = np.asarray(self.matrix, dtype=float)
            if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
                raise ConfigError("alphabet matrix must be square and nonempty", key="alphabet.matrix")
            check_metric_matrix(D, key="alphabet.matrix")
        else:
            raise ConfigError(f"unknown alphabet kind {self.kind!r}", key="alphabet.kind")

    @classmethod
    def interval(cls, step: float) -> "Alphabet":
        return cls("interval", step=float(step))

    @classmethod
    def circle(cls, step: float) -> "Alphabet":
        return cls("circle", step=float(step))

    @classmethod
    def explicit(cls, matrix) -> "Alphabet":
        return cls("explicit", matrix=tuple(tuple(float(v) for v in row) for row in matrix))

    @cached_property
    def values(self) -> np.ndarray:
        if self.kind == "interval":
            k = int(math.floor(1.0 / self.step + 1e-9))
            return np.arange(k + 1) * self.step
        if self.kind == "circle":
            k = max(1, int(math.floor(1.0 / self.step - 1e-9)) + 1)
            return np.arange(k) * self.step
        return np.arange(len(self.matrix), dtype=float)

    @property
    def size(self) -> int:
        return len(self.values)

    @cached_property
    def dist(self) -> np.ndarray:
        v = self.values
        if self.kind == "interval":
            return np.abs(v[:, None] - v[None, :])
        if self.kind == "circle":
            t = np.abs(v[:, None] - v[None, :])
            return np.minimum(t, 1.0 - t)
        return np.asarray(self.matrix, dtype=float)

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    @property
    def resolution(self) -> float:
        """Smallest positive symbol distance (the quantization step for grids)."""
        D = self.dist
        pos = D[D > 0]
        return float(pos.min()) if pos.size else 1.0

    def metric(self) -> MetricSpec:
        D = self.dist
        return MetricSpec(lambda i, j: D[int(i), int(j)], self.diameter, name=f"{self.kind}-alphabet")

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"kind": "explicit", "matrix": [list(r) for r in self.matrix]}
        return {"kind": self.kind, "step": self.step}


def check_metric_matrix(D: np.ndarray, tol: float = 1e-12, key: str | None = None) -> None:
    """Raise ConfigError unless D is a finite metric (zero diagonal, symmetric, triangle)."""
    D = np.asarray(D, dtype=float)
    if not np.all(np.isfinite(D)):
        raise ConfigError("distance matrix has non-finite entries", key=key)
    if np.any(np.abs(np.diag(D)) > tol):
        raise ConfigError("distance matrix has nonzero diagonal", key=key)
    if np.any(np.abs(D - D.T) > tol) or np.any(D < -tol):
        raise ConfigError("distance matrix is not symmetric and nonnegative", key=key)
    for k in range(D.shape[0]):
        if np.any(D > D[:, [k]] + D[[k], :] + tol):
            raise ConfigError("distance matrix violates the triangle inequality", key=key)


# ---------------------------------------------------------------------------
# weights


def _sphere_count(rank: int, k: int) -> int:
    """Number of g in Z^rank with |g|_1 = k."""
    if k == 0:
        return 1
    return sum(2 ** i * math.comb(rank, i) * math.comb(k - 1, i - 1) for i in range(1, rank + 1))


@dataclass(frozen=True)
class WeightFamily:
    """alpha_g = lam^{|g|_1} truncated at |g|_1 <= radius, or an explicit finite support.

    ``radius=None`` picks the smallest radius whose tail times ``diam``
    is below ``tail_tol``.
    """

    lam: float = 0.5
    radius: int | None = None
    rank: int = 1
    tail_tol: float = 1e-6
    diam: float = 1.0
    support: tuple | None = None  # ((g, alpha_g), ...) overrides lam

    def __post_init__(self):
        if self.support is not None:
            sup = dict((as_element(g, self.rank), float(a)) for g, a in self.support)
            if sup.get((0,) * self.rank) != 1.0:
                raise ConfigError("weights must satisfy alpha_identity = 1", key="weights")
            if any(a <= 0 for a in sup.values()):
                raise ConfigError("weights must be positive", key="weights")
            return
        if not 0 < self.lam < 1:
            raise ConfigError("lambda must lie in (0, 1)", key="weights.lambda")
        if self.radius is None:
            r = 0
            while self.tail_beyond(r) * self.diam >= self.tail_tol:
                r += 1
                if r > 10_000:
                    raise ConfigError("weight tail does not reach tolerance", key="weights.lambda")
            object.__setattr__(self, "radius", r)
        elif self.radius < 0:
            raise ConfigError("radius must be >= 0", key="weights.radius")

    @classmethod
    def explicit(cls, pairs, rank: int = 1) -> "WeightFamily":
        items = pairs.items() if isinstance(pairs, dict) else pairs
        return cls(support=tuple((as_element(g, rank), float(a)) for g, a in items), rank=rank)

    def tail_beyond(self, r: int) -> float:
        """sum of alpha_g over |g|_1 > r (zero for explicit support)."""
        if self.support is not None:
            return 0.0
        tot, k = 0.0, r + 1
        while True:
            term = _sphere_count(self.rank, k) * self.lam ** k
            tot += term
            if term < 1e-30 and k > r + 10:
                return tot
            k += 1

    @cached_property
    def items(self) -> tuple:
        """Sorted ((g, alpha_g), ...) over the (truncated) support."""
        if self.support is not None:
            return tuple(sorted((as_element(g, self.rank), float(a)) for g, a in self.support))
        R = self.radius
        out = []
        for g in product(range(-R, R + 1), repeat=self.rank):
            n1 = sum(abs(c) for c in g)
            if n1 <= R:
                out.append((g, self.lam ** n1))
        return tuple(out)

    def alpha(self, g) -> float:
        g = as_element(g, self.rank)
        return dict(self.items).get(g, 0.0)

    @property
    def total(self) -> float:
        """l = sum of the truncated weights."""
        return float(sum(a for _, a in self.items))

    @property
    def truncation_error(self) -> float:
        """Upper bound on the metric error from truncation (tail times diam)."""
        return self.tail_beyond(self.radius) * self.diam if self.support is None else 0.0

    def window(self) -> FiniteWindow:
        return FiniteWindow.of((g for g, _ in self.items), self.rank)

    def to_dict(self) -> dict:
        if self.support is not None:
            return {"support": [[list(g), a] for g, a in self.items]}
        return {"lambda": self.lam, "radius": self.radius, "tail_tol": self.tail_tol}


# ---------------------------------------------------------------------------
# forbidden patterns


@dataclass(frozen=True)
class Pattern:
    """A cylinder pattern: ((offset, symbol), ...)."""

    cells: tuple

    @classmethod
    def of(cls, cells, rank: int = 1) -> "Pattern":
        return cls(tuple((as_element(g, rank), int(s)) for g, s in cells))

    @classmethod
    def word(cls, symbols: Sequence[int]) -> "Pattern":
        """Adjacent rank-1 word, e.g. ``Pattern.word([1, 1])``."""
        return cls.of([(i, s) for i, s in enumerate(symbols)])

    def to_dict(self) -> list:
        return [[list(g), s] for g, s in self.cells]


# ---------------------------------------------------------------------------
# shift systems


@dataclass(frozen=True)
class ShiftSystem:
    """Full shift or subshift on a box window with a summed weighted metric.

    ``scale`` and ``transform`` give the metric zeta(scale * d); since zeta is
    increasing it commutes with the Bowen max.
    """

    alphabet: Alphabet
    weights: WeightFamily
    side: int
    rank: int = 1
    origin: tuple | None = None
    boundary: str = "periodic"
    forbidden: tuple = ()
    scale: float = 1.0
    transform: MetricTransform | None = None

    def __post_init__(self):
        if self.side < 1:
            raise ConfigError("window side must be >= 1", key="window.size")
        if self.boundary not in ("periodic", "strict"):
            raise ConfigError(f"unknown boundary policy {self.boundary!r}", key="boundary")
        if self.weights.rank != self.rank:
            raise ConfigError("weight rank does not match window rank", key="weights")
        if self.origin is None:
            object.__setattr__(self, "origin", (0,) * self.rank)
        for p in self.forbidden:
            for g, s in p.cells:
                if len(g) != self.rank or not 0 <= s < self.alphabet.size:
                    raise ConfigError(f"bad forbidden pattern cell {(g, s)}", key="forbidden")
        if self.scale <= 0:
            raise ConfigError("metric scale must be positive", key="scale")

    # -- geometry ----------------------------------------------------------

    @cached_property
    def domain(self) -> FiniteWindow:
        return box(self.side, self.rank, self.origin)

    @property
    def n_coords(self) -> int:
        return self.side ** self.rank

    @property
    def is_full_shift(self) -> bool:
        return not self.forbidden

    def _index(self, g) -> int | None:
        """Flat index of group element g, or None if outside W (strict only)."""
        rel = [c - o for c, o in zip(g, self.origin)]
        if self.boundary == "periodic":
            rel = [r % self.side for r in rel]
        elif any(r < 0 or r >= self.side for r in rel):
            return None
        idx = 0
        for r in rel:
            idx = idx * self.side + r
        return idx

    def _require(self, g) -> int:
        i = self._index(g)
        if i is None:
            raise DomainError(f"coordinate {g} lies outside the domain window")
        return i

    def weight_matrix(self, F) -> np.ndarray:
        """Row h: coefficients of rho(x_j, y_j) in d(sigma^h x, sigma^h y)."""
        F = [as_element(h, self.rank) for h in F]
        M = np.zeros((len(F), self.n_coords))
        for r, h in enumerate(F):
            for g, a in self.weights.items:
                j = self._require(tuple(x + y for x, y in zip(g, h)))
                M[r, j] += a
        return M

    @cached_property
    def folded_weights(self) -> np.ndarray:
        return self.weight_matrix([(0,) * self.rank])[0]

    @property
    def base_diameter(self) -> float:
        """Diameter bound of the untransformed, unscaled metric: l * diam(alphabet)."""
        return self.weights.total * self.alphabet.diameter

    @property
    def diameter(self) -> float:
        v = self.scale * self.base_diameter
        return float(self.transform(v)) if self.transform is not None else v

    # -- configurations ----------------------------------------------------

    def act(self, h, x, region=None) -> np.ndarray:
        """(sigma^h x)_g = x_{g + h}.

        With ``region`` (an iterable of elements) only those coordinates are
        returned, in order; otherwise the whole window W.
        """
        h = as_element(h, self.rank)
        x = np.asarray(x)
        cells = self.domain.elements if region is None else [as_element(g, self.rank) for g in region]
        idx = [self._require(tuple(a + b for a, b in zip(g, h))) for g in cells]
        return x[..., idx]

    def allowed(self, configs: np.ndarray) -> np.ndarray:
        """Boolean mask of configurations avoiding every forbidden pattern."""
        X = np.atleast_2d(np.asarray(configs))
        ok = np.ones(len(X), dtype=bool)
        for p in self.forbidden:
            for h in self.domain.elements:
                idx = [self._index(tuple(a + b for a, b in zip(g, h))) for g, _ in p.cells]
                if any(i is None for i in idx):
                    continue
                hit = np.ones(len(X), dtype=bool)
                for i, (_, s) in zip(idx, p.cells):
                    hit &= X[:, i] == s
                ok &= ~hit
        return ok

    def n_configurations_upper(self) -> int:
        return self.alphabet.size ** self.n_coords

    def enumerate(self, budget: int = DEFAULT_BUDGET) -> np.ndarray:
        total = self.n_configurations_upper()
        if total > budget:
            raise ResourceError(
                f"{total} configurations exceed the enumeration budget {budget}; use sample mode"
            )
        K, n = self.alphabet.size, self.n_coords
        X = np.indices((K,) * n).reshape(n, -1).T.astype(np.int64) if n else np.zeros((1, 0), int)
        return X[self.allowed(X)] if self.forbidden else X

    def sample(self, N: int, seed=None, max_tries: int = 100) -> np.ndarray:
        """N i.i.d. uniform configurations (uniform over allowed ones for subshifts)."""
        if N < 1:
            raise ConfigError("sample size must be >= 1", key="sample.N")
        rng = np.random.default_rng(seed)
        K, n = self.alphabet.size, self.n_coords
        if not self.forbidden:
            return rng.integers(0, K, size=(N, n))
        if self.n_configurations_upper() <= DEFAULT_BUDGET:
            pool = self.enumerate()
            return pool[rng.integers(0, len(pool), size=N)]
        out, got = [], 0
        for _ in range(max_tries):
            X = rng.integers(0, K, size=(4 * N, n))
            X = X[self.allowed(X)]
            out.append(X)
            got += len(X)
            if got >= N:
                return np.concatenate(out)[:N]
        raise ResourceError("rejection sampling of the subshift did not reach N points")

    # -- metrics -----------------------------------------------------------

    def _finish(self, D: np.ndarray) -> np.ndarray:
        if self.scale != 1.0:
            D = D * self.scale
        if self.transform is not None:
            D = np.asarray(self.transform(D))
        return D

    def pairwise_bowen(self, A, F=None, B=None, base: bool = False) -> np.ndarray:
        """Matrix of d_F between rows of A and rows of B (default B = A).

        ``F=None`` means the identity window.  ``base=True`` skips scale and
        transform.
        """
        A = np.atleast_2d(np.asarray(A))
        B = A if B is None else np.atleast_2d(np.asarray(B))
        F = [(0,) * self.rank] if F is None else list(F)
        Wm = self.weight_matrix(F)
        rho = self.alphabet.dist
        out = np.empty((len(A), len(B)))
        for lo in range(0, len(A), ROW_CHUNK):
            a = A[lo:lo + ROW_CHUNK]
            acc = np.zeros((len(F), len(a), len(B)))
            for j in range(self.n_coords):
                w = Wm[:, j]
                if not np.any(w):
                    continue
                R = rho[a[:, j][:, None], B[:, j][None, :]]
                acc += w[:, None, None] * R[None]
            out[lo:lo + ROW_CHUNK] = acc.max(axis=0)
        return out if base else self._finish(out)

    def distance(self, x, y, F=None) -> float:
        return float(self.pairwise_bowen(np.asarray(x)[None], F, np.asarray(y)[None])[0, 0])

    def metric(self) -> MetricSpec:
        return MetricSpec(lambda x, y: self.distance(x, y), self.diameter, name="shift")

    # -- variants ----------------------------------------------------------

    def with_transform(self, t: MetricTransform | None) -> "ShiftSystem":
        from dataclasses import replace
        if t is not None:
            t.validate(self.scale * self.base_diameter)
        return replace(self, transform=t)

    def with_scale(self, c: float) -> "ShiftSystem":
        from dataclasses import replace
        return replace(self, scale=float(c))

    def with_side(self, m: int) -> "ShiftSystem":
        from dataclasses import replace
        return replace(self, side=int(m))

    def describe(self) -> dict:
        return {
            "alphabet": self.alphabet.to_dict(),
            "weights": self.weights.to_dict(),
            "window": {"shape": "box", "size": self.side, "rank": self.rank},
            "boundary": self.boundary,
            "forbidden": [p.to_dict() for p in self.forbidden],
            "scale": self.scale,
            "transform": self.transform.to_dict() if self.transform else None,
        }


def make_full_shift(alphabet: Alphabet, weights: WeightFamily, side: int = 1, rank: int = 1,
                    boundary: str = "periodic", forbidden=(), origin=None) -> ShiftSystem:
    return ShiftSystem(alphabet, weights, side, rank, origin=origin, boundary=boundary,
                       forbidden=tuple(forbidden))


def sample_points(sys, N: int, seed=None):
    """N uniform configurations plus the number of duplicate rows drawn."""
    X = sys.sample(N, seed)
    dup = len(X) - len(np.unique(X, axis=0))
    return X, dup


# ---------------------------------------------------------------------------
# finite systems given by a permutation action


@dataclass(frozen=True)
class FiniteSystem:
    """A finite metric space with a Z-action x -> perm[x] (or the trivial action).

    Used for random desk-scale instances and for pair spaces.  Points are the
    integers 0..N-1.
    """

    dist: np.ndarray
    perm: tuple | None = None

    def __post_init__(self):
        D = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", D)
        if self.perm is not None and sorted(self.perm) != list(range(len(D))):
            raise ConfigError("action must be a permutation of the points", key="perm")

    @property
    def size(self) -> int:
        return len(self.dist)

    @property
    def rank(self) -> int:
        return 1

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def enumerate(self, budget: int = DEFAULT_BUDGET) -> np.ndarray:
        if self.size > budget:
            raise ResourceError("point set exceeds the enumeration budget")
        return np.arange(self.size)

    def sample(self, N: int, seed=None) -> np.ndarray:
        return np.random.default_rng(seed).integers(0, self.size, size=N)

    def power(self, g: int) -> np.ndarray:
        idx = np.arange(self.size)
        if self.perm is None or g == 0:
            return idx
        p = np.asarray(self.perm)
        if g < 0:
            p = np.argsort(p)
        for _ in range(abs(g)):
            idx = p[idx]
        return idx

    def act(self, h, x):
        return self.power(as_element(h, 1)[0])[np.asarray(x)]

    def pairwise_bowen(self, A=None, F=None, B=None, base: bool = False) -> np.ndarray:
        A = np.arange(self.size) if A is None else np.asarray(A).ravel()
        B = A if B is None else np.asarray(B).ravel()
        F = [(0,)] if F is None else [as_element(h, 1) for h in F]
        out = np.zeros((len(A), len(B)))
        for h in F:
            p = self.power(h[0])
            out = np.maximum(out, self.dist[np.ix_(p[A], p[B])])
        return out


# ---------------------------------------------------------------------------
# products


def _width(sys) -> int:
    return getattr(sys, "n_coords", 1)


@dataclass(frozen=True)
class ProductSystem:
    """Pairs (x, y) with the componentwise action and the max metric.

    A point is the row ``hstack(x, y)``; the first ``_width(first)`` columns
    belong to the first factor.
    """

    first: object
    second: object

    def __post_init__(self):
        if self.first.rank != self.second.rank:
            raise ConfigError("product factors act by different groups", key="product")

    @property
    def rank(self) -> int:
        return self.first.rank

    @property
    def diameter(self) -> float:
        return max(self.first.diameter, self.second.diameter)

    def _split(self, X):
        X = np.atleast_2d(np.asarray(X))
        k = _width(self.first)
        return X[:, :k], X[:, k:]

    def enumerate(self, budget: int = DEFAULT_BUDGET) -> np.ndarray:
        P = np.asarray(self.first.enumerate(budget)).reshape(-1, _width(self.first))
        Q = np.asarray(self.second.enumerate(budget)).reshape(-1, _width(self.second))
        if len(P) * len(Q) > budget:
            raise ResourceError("product point set exceeds the enumeration budget")
        return np.hstack([np.repeat(P, len(Q), axis=0), np.tile(Q, (len(P), 1))])

    def sample(self, N: int, seed=None) -> np.ndarray:
        rng = np.random.default_rng(seed)
        A = np.asarray(self.first.sample(N, rng)).reshape(N, -1)
        B = np.asarray(self.second.sample(N, rng)).reshape(N, -1)
        return np.hstack([A, B])

    def act(self, h, x):
        a, b = self._split(x)
        fix = lambda sys, X: X.ravel() if not hasattr(sys, "n_coords") else X
        out = [np.asarray(s.act(h, fix(s, X))).reshape(len(X), -1)
               for s, X in ((self.first, a), (self.second, b))]
        return np.hstack(out)

    def pairwise_bowen(self, A, F=None, B=None, base: bool = False) -> np.ndarray:
        A1, A2 = self._split(A)
        B1, B2 = self._split(A if B is None else B)
        fix = lambda sys, X: X.ravel() if _width(sys) == 1 and not hasattr(sys, "n_coords") else X
        D1 = self.first.pairwise_bowen(fix(self.first, A1), F, fix(self.first, B1), base=base)
        D2 = self.second.pairwise_bowen(fix(self.second, A2), F, fix(self.second, B2), base=base)
        return np.maximum(D1, D2)

    def with_side(self, m: int) -> "ProductSystem":
        side = lambda sys: sys.with_side(m) if hasattr(sys, "with_side") else sys
        return ProductSystem(side(self.first), side(self.second))


def product_system(sys1, sys2) -> ProductSystem:
    return ProductSystem(sys1, sys2)


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class WeightedPointSet:
    """Probability masses on the points 0..len-1 of some point list."""

    masses: tuple

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if m.ndim != 1 or m.size == 0:
            raise ConfigError("masses must be a nonempty vector", key="measure")
        if np.any(m < 0) or abs(m.sum() - 1.0) > 1e-12:
            raise ConfigError("masses must be nonnegative and sum to 1", key="measure")

    @classmethod
    def uniform(cls, n: int) -> "WeightedPointSet":
        return cls(tuple([1.0 / n] * n))

    @classmethod
    def point_mass(cls, n: int, i: int) -> "WeightedPointSet":
        m = [0.0] * n
        m[i] = 1.0
        return cls(tuple(m))

    @classmethod
    def from_weights(cls, w) -> "WeightedPointSet":
        w = np.asarray(w, dtype=float)
        m = w / w.sum()
        m[-1] = 1.0 - m[:-1].sum()
        return cls(tuple(m.tolist()))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.masses, dtype=float)

    def __len__(self):
        return len(self.masses)


def empirical_product_measure(configs: np.ndarray, symbol_weights) -> WeightedPointSet:
    """Restriction of (lambda)^{otimes W} to the listed configurations, renormalized."""
    lam = np.asarray(symbol_weights, dtype=float)
    w = np.prod(lam[np.asarray(configs)], axis=1)
    return WeightedPointSet.from_weights(w)
