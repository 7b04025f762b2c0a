"""Distances: base metrics, Bowen sup-metrics, products, and transforms zeta o d."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ConfigError, DomainError, InvalidTransformError

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class MetricSpec:
    """A pure distance function with a known diameter bound ``diameter``."""

    evaluator: Callable[[Any, Any], float]
    diameter: float
    name: str = "d"

    def __call__(self, x, y) -> float:
        return float(self.evaluator(x, y))

    def validate(self, points: Sequence, tol: float = EXACT_TOL) -> None:
        """Check the metric axioms on every pair/triple of ``points``."""
        pts = list(points)
        m = len(pts)
        D = np.array([[self(p, q) for q in pts] for p in pts])
        if np.any(np.abs(np.diag(D)) > tol):
            raise ConfigError(f"{self.name}: d(x,x) != 0")
        if np.any(np.abs(D - D.T) > tol):
            raise ConfigError(f"{self.name}: not symmetric")
        if np.any(D > self.diameter + tol) or np.any(D < -tol):
            raise ConfigError(f"{self.name}: value outside [0, diameter]")
        for k in range(m):
            if np.any(D > D[:, [k]] + D[[k], :] + tol):
                raise ConfigError(f"{self.name}: triangle inequality fails through point {k}")


def bowen_distance(act: Callable, F, d: MetricSpec, x, y) -> float:
    """d_F(x, y) = max over g in F of d(gx, gy).

    ``act(g, x)`` must raise :class:`DomainError` when g cannot act on x.
    """
    return max(d(act(g, x), act(g, y)) for g in F)


def product_metric(d1: MetricSpec, d2: MetricSpec) -> MetricSpec:
    """Max metric on pairs ``(x, y)``."""
    return MetricSpec(
        lambda p, q: max(d1(p[0], q[0]), d2(p[1], q[1])),
        max(d1.diameter, d2.diameter),
        name=f"({d1.name} x {d2.name})",
    )


# ---------------------------------------------------------------------------
# transforms


_KINDS = ("power", "hybrid", "log_power", "sampled")


@dataclass(frozen=True)
class MetricTransform:
    """An increasing subadditive map zeta with zeta(0) = 0.

    Use the constructors :func:`power`, :func:`hybrid`, :func:`log_power`
    and :func:`sampled`.  ``exponent`` is the closed-form k(zeta) when known.
    """

    kind: str
    a: float | None = None
    alpha: float | None = None
    eps: float | None = None
    table: tuple | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidTransformError(f"unknown transform kind {self.kind!r}")
        if self.kind == "power" and not (self.a is not None and 0 < self.a <= 1):
            raise InvalidTransformError("power(a) needs a in (0, 1]")
        if self.kind == "log_power" and not (self.a is not None and 0 < self.a < 1):
            raise InvalidTransformError("log_power(a) needs a in (0, 1)")
        if self.kind == "hybrid":
            if not (self.alpha is not None and 0 < self.alpha < 1):
                raise InvalidTransformError("hybrid needs alpha in (0, 1)")
            if not (self.eps is not None and 0 < self.eps < 1):
                raise InvalidTransformError("hybrid needs eps in (0, 1)")
        if self.kind == "sampled":
            xs, ys = self._table_arrays()
            if len(xs) < 2 or xs[0] != 0.0 or ys[0] != 0.0:
                raise InvalidTransformError("sampled table must start at (0, 0)")
            if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
                raise InvalidTransformError("sampled table must be strictly increasing")

    def _table_arrays(self):
        t = np.asarray(self.table, dtype=float)
        return t[:, 0], t[:, 1]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            out = np.power(t, self.a)
        elif self.kind == "log_power":
            out = np.log1p(np.power(t, self.a))
        elif self.kind == "hybrid":
            e, al = self.eps, self.alpha
            with np.errstate(invalid="ignore"):
                out = np.where(t >= e, t, e ** (1 - al) * np.power(t, al))
        else:
            xs, ys = self._table_arrays()
            slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
            out = np.where(t <= xs[-1], np.interp(t, xs, ys), ys[-1] + slope * (t - xs[-1]))
        return out if out.ndim else float(out)

    def inverse(self, v):
        v = np.asarray(v, dtype=float)
        if self.kind == "power":
            out = np.power(v, 1.0 / self.a)
        elif self.kind == "log_power":
            out = np.power(np.expm1(v), 1.0 / self.a)
        elif self.kind == "hybrid":
            e, al = self.eps, self.alpha
            out = np.where(v >= e, v, np.power(v / e ** (1 - al), 1.0 / al))
        else:
            xs, ys = self._table_arrays()
            slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
            out = np.where(v <= ys[-1], np.interp(v, ys, xs), xs[-1] + (v - ys[-1]) / slope)
        return out if out.ndim else float(out)

    @property
    def exponent(self) -> float | None:
        if self.kind in ("power", "log_power"):
            return self.a
        if self.kind == "hybrid":
            return self.alpha
        return None

    def validate(self, rho: float, n_pairs: int = 10_000, tol: float = EXACT_TOL) -> None:
        """Grid check of zeta(0)=0, strict increase, and subadditivity on [0, rho]."""
        if self(0.0) != 0.0:
            raise InvalidTransformError(f"{self.describe()}: zeta(0) != 0")
        # m grid points give about m^2/2 pairs with x + y <= rho
        m = max(16, int(math.ceil(math.sqrt(2 * n_pairs))) + 1)
        xs = np.linspace(0.0, rho, m)
        z = self(xs)
        if np.any(np.diff(z) <= 0):
            raise InvalidTransformError(f"{self.describe()}: not increasing on [0, {rho}]")
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        mask = X + Y <= rho * (1 + 1e-15)
        lhs = self(X[mask] + Y[mask])
        rhs = self(X[mask]) + self(Y[mask])
        bad = lhs > rhs + tol
        if np.any(bad):
            i = int(np.argmax(bad))
            raise InvalidTransformError(
                f"{self.describe()}: subadditivity fails at x={X[mask][i]}, y={Y[mask][i]}"
            )

    def describe(self) -> str:
        if self.kind == "hybrid":
            return f"hybrid(alpha={self.alpha}, eps={self.eps})"
        if self.kind == "sampled":
            return f"sampled({len(self.table)} knots)"
        return f"{self.kind}({self.a})"

    def to_dict(self) -> dict:
        if self.kind == "hybrid":
            return {"kind": "hybrid", "alpha": self.alpha, "eps": self.eps}
        if self.kind == "sampled":
            return {"kind": "sampled", "table": [list(r) for r in self.table]}
        return {"kind": self.kind, "a": self.a}

    @classmethod
    def from_dict(cls, spec: dict) -> "MetricTransform":
        kind = spec.get("kind")
        if kind in ("power", "log_power"):
            return cls(kind, a=float(spec["a"]))
        if kind == "hybrid":
            return cls("hybrid", alpha=float(spec["alpha"]), eps=float(spec["eps"]))
        if kind == "sampled":
            return cls("sampled", table=tuple(tuple(map(float, r)) for r in spec["table"]))
        raise InvalidTransformError(f"unknown transform kind {kind!r}")


def power(a: float) -> MetricTransform:
    return MetricTransform("power", a=a)


def hybrid(alpha: float, eps: float) -> MetricTransform:
    return MetricTransform("hybrid", alpha=alpha, eps=eps)


def log_power(a: float) -> MetricTransform:
    return MetricTransform("log_power", a=a)


def sampled(xs: Sequence[float], ys: Sequence[float]) -> MetricTransform:
    return MetricTransform("sampled", table=tuple(zip(map(float, xs), map(float, ys))))


def apply_transform(t: MetricTransform, d: MetricSpec, n_pairs: int = 10_000) -> MetricSpec:
    """The metric zeta o d.  Validates ``t`` on [0, diameter(d)] first."""
    t.validate(d.diameter, n_pairs=n_pairs)
    return MetricSpec(lambda x, y: float(t(d(x, y))), float(t(d.diameter)),
                      name=f"{t.describe()}∘{d.name}")


def bowen_commutes_with_transform(t: MetricTransform, d: MetricSpec, act, F, x, y):
    """Return ``(lhs, rhs)``: the Bowen distance under zeta o d, and zeta of d_F."""
    zd = MetricSpec(lambda p, q: float(t(d(p, q))), float(t(d.diameter)))
    lhs = bowen_distance(act, F, zd, x, y)
    rhs = float(t(bowen_distance(act, F, d, x, y)))
    return lhs, rhs


def uniform_distance(d1: MetricSpec, d2: MetricSpec, pts: Sequence) -> float:
    """max |d1 - d2| over pairs of ``pts``; a lower bound for D(d1, d2) on the whole space."""
    pts = list(pts)
    if not pts:
        raise ConfigError("uniform_distance needs a nonempty point set")
    best = 0.0
    for p, q in combinations(pts, 2):
        best = max(best, abs(d1(p, q) - d2(p, q)))
    return best


def uniform_distance_matrix(D1: np.ndarray, D2: np.ndarray) -> float:
    """Same as :func:`uniform_distance` for precomputed distance matrices."""
    return float(np.max(np.abs(np.asarray(D1) - np.asarray(D2))))


@dataclass(frozen=True)
class ExponentEstimate:
    k_m: float
    k_M: float
    grid: tuple
    slopes: tuple
    closed_form: float | None = None

    @property
    def gap(self) -> float | None:
        if self.closed_form is None:
            return None
        return max(abs(self.k_m - self.closed_form), abs(self.k_M - self.closed_form))


def exponent_range(t: MetricTransform, grid: Sequence[float]) -> ExponentEstimate:
    """Tail min/max of log zeta(eps) / log eps over a decreasing grid in (0, 1)."""
    eps = np.asarray(grid, dtype=float)
    if eps.size < 8:
        raise ConfigError("exponent grid needs at least 8 values")
    if np.any(np.diff(eps) >= 0) or eps[0] >= 1 or eps[-1] <= 0:
        raise ConfigError("exponent grid must be strictly decreasing inside (0, 1)")
    slopes = np.log(t(eps)) / np.log(eps)
    tail = slopes[len(slopes) // 2:]
    k_m, k_M = float(tail.min()), float(tail.max())
    if k_M > 1 + 1e-9:
        raise ConfigError(f"{t.describe()}: k_M = {k_M} > 1, transform is not subadditive near 0")
    return ExponentEstimate(k_m, k_M, tuple(eps.tolist()), tuple(slopes.tolist()), t.exponent)


def diameter_normalizer(rho: float) -> float:
    """Scale factor that brings a diameter below 1 (identity when rho < 1)."""
    return 1.0 if rho < 1 else 1.0 / (rho + 1e-9)
