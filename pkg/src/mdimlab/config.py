"""Experiment configuration: one JSON file, validated with dotted key paths.

Schema (all sections optional unless the subcommand needs them)::

    {
      "seed": 0, "mode": "sampled", "workers": 1,
      "system": {
        "alphabet": {"kind": "interval", "step": 0.0009765625},
        "weights": {"lambda": 0.5, "radius": null, "tail_tol": 1e-6},
        "window": {"shape": "box", "size": 1, "rank": 1},
        "boundary": "periodic",
        "forbidden": [[[[0], 1], [[1], 1]]],
        "matched": true
      },
      "transform": {"kind": "power", "a": 0.5},
      "grid": {"eps_max": 0.0625, "eps_min": 0.015625, "count": 5,
               "ns": [1, 2, 3, 4, 5], "tail_fraction": 0.5, "map_by_transform": true},
      "sampling": {"N": 2000, "centers": 16},
      "budgets": {"nodes": 10000000, "points": 200000},
      "hausdorff": {"floor": 0.01, "phi": 1.0, "max_points": 10},
      "verify": {"sandwich": 20, "products": 10, ...},
      "scan": {"transforms": [...], "hybrids": [{"alpha": 0.5, "eps": 0.1}], "points": 32},
      "product": {"second": {<system>}},
      "minkowski": {"epsilons": [...]}
    }

``grid.epsilons`` may replace eps_max/eps_min/count.  ``forbidden`` lists
patterns as [[offset, symbol], ...].
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import ConfigError
from .estimate import ScaleGrid
from .metric import MetricTransform
from .systems import Alphabet, Pattern, ShiftSystem, WeightFamily

TOP_KEYS = {"seed", "mode", "workers", "system", "transform", "grid", "sampling", "budgets",
            "hausdorff", "verify", "scan", "product", "minkowski", "description"}
SYSTEM_KEYS = {"alphabet", "weights", "window", "boundary", "forbidden", "matched"}
GRID_KEYS = {"epsilons", "eps_max", "eps_min", "count", "ns", "tail_fraction", "map_by_transform"}


def _check_keys(d: dict, allowed: set, path: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError("expected an object", key=path)
    for k in d:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r}", key=f"{path}.{k}" if path else k)


def _num(d: dict, k: str, path: str, default=None, kind=float, lo=None, hi=None):
    if k not in d or d[k] is None:
        if default is None:
            raise ConfigError("missing required value", key=f"{path}.{k}")
        return default
    v = d[k]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", key=f"{path}.{k}")
    if kind is int and int(v) != v:
        raise ConfigError(f"expected an integer, got {v!r}", key=f"{path}.{k}")
    v = kind(v)
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ConfigError(f"value {v} outside [{lo}, {hi}]", key=f"{path}.{k}")
    return v


def parse_system(d: dict, path: str = "system") -> tuple:
    """Returns (ShiftSystem, matched flag)."""
    try:
        return _parse_system(d, path)
    except ConfigError as exc:
        if exc.key and not exc.key.startswith(path):
            raise ConfigError(str(exc).split(": ", 1)[-1], key=f"{path}.{exc.key}") from None
        raise


def _parse_system(d: dict, path: str) -> tuple:
    _check_keys(d, SYSTEM_KEYS, path)
    a = d.get("alphabet")
    if a is None:
        raise ConfigError("missing alphabet", key=f"{path}.alphabet")
    _check_keys(a, {"kind", "step", "matrix"}, f"{path}.alphabet")
    kind = a.get("kind")
    if kind in ("interval", "circle"):
        alpha = Alphabet(kind, step=_num(a, "step", f"{path}.alphabet", lo=1e-9, hi=1.0))
    elif kind == "explicit":
        alpha = Alphabet.explicit(a.get("matrix") or [])
    else:
        raise ConfigError(f"unknown alphabet kind {kind!r}", key=f"{path}.alphabet.kind")
    win = d.get("window", {"shape": "box", "size": 1, "rank": 1})
    _check_keys(win, {"shape", "size", "rank"}, f"{path}.window")
    if win.get("shape", "box") != "box":
        raise ConfigError("only box windows are supported", key=f"{path}.window.shape")
    rank = _num(win, "rank", f"{path}.window", 1, int, 1, 3)
    size = _num(win, "size", f"{path}.window", 1, int, 1, 64)
    w = d.get("weights", {})
    _check_keys(w, {"lambda", "radius", "tail_tol", "support"}, f"{path}.weights")
    if "support" in w:
        weights = WeightFamily.explicit([(g, a) for g, a in w["support"]], rank=rank)
    else:
        radius = w.get("radius")
        if radius is not None:
            radius = _num(w, "radius", f"{path}.weights", kind=int, lo=0, hi=200)
        weights = WeightFamily(lam=_num(w, "lambda", f"{path}.weights", 0.5, float, 1e-9, 1 - 1e-9),
                               radius=radius, rank=rank,
                               tail_tol=_num(w, "tail_tol", f"{path}.weights", 1e-6, float, 1e-15, 1),
                               diam=alpha.diameter)
    boundary = d.get("boundary", "periodic")
    if boundary not in ("periodic", "strict"):
        raise ConfigError(f"unknown boundary policy {boundary!r}", key=f"{path}.boundary")
    pats = []
    for i, p in enumerate(d.get("forbidden", [])):
        try:
            pats.append(Pattern.of([(g, s) for g, s in p], rank))
        except (TypeError, ValueError):
            raise ConfigError("pattern must be a list of [offset, symbol]", key=f"{path}.forbidden[{i}]")
    matched = d.get("matched", True)
    if not isinstance(matched, bool):
        raise ConfigError("expected true or false", key=f"{path}.matched")
    sys = ShiftSystem(alpha, weights, size, rank, boundary=boundary, forbidden=tuple(pats))
    return sys, matched


def parse_transform(d, path: str = "transform") -> MetricTransform | None:
    if d is None:
        return None
    _check_keys(d, {"kind", "a", "alpha", "eps", "table"}, path)
    try:
        return MetricTransform.from_dict(d)
    except KeyError as exc:
        raise ConfigError("missing transform parameter", key=f"{path}.{exc.args[0]}") from None
    except ConfigError as exc:
        raise ConfigError(str(exc), key=path) from None


def parse_grid(d: dict, path: str = "grid") -> tuple:
    """Returns (ScaleGrid, map_by_transform)."""
    _check_keys(d, GRID_KEYS, path)
    if "ns" not in d:
        raise ConfigError("missing window indices", key=f"{path}.ns")
    ns = d["ns"]
    if not isinstance(ns, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in ns):
        raise ConfigError("expected a list of integers", key=f"{path}.ns")
    tf = _num(d, "tail_fraction", path, 0.5, float, 1e-9, 1.0)
    if "epsilons" in d:
        eps = d["epsilons"]
        if not isinstance(eps, list) or not all(isinstance(v, (int, float)) for v in eps):
            raise ConfigError("expected a list of numbers", key=f"{path}.epsilons")
        grid = ScaleGrid(tuple(eps), tuple(ns), tf)
    else:
        grid = ScaleGrid.geometric(_num(d, "eps_max", path, lo=1e-12, hi=1.0),
                                   _num(d, "eps_min", path, lo=1e-12, hi=1.0),
                                   _num(d, "count", path, 5, int, 2, 1000), ns, tf)
    return grid, bool(d.get("map_by_transform", True))


@dataclass
class ExperimentConfig:
    raw: dict
    seed: int = 0
    mode: str = "sampled"
    workers: int = 1
    system: ShiftSystem | None = None
    matched: bool = True
    transform: MetricTransform | None = None
    grid: ScaleGrid | None = None
    map_by_transform: bool = True
    N: int = 2000
    centers: int = 16
    node_budget: int = 10_000_000
    point_budget: int = 200_000
    hausdorff: dict | None = None
    verify: dict = field(default_factory=dict)
    scan: dict | None = None
    product: dict | None = None
    minkowski: dict | None = None

    def need(self, attr: str) -> Any:
        v = getattr(self, attr)
        if v is None:
            raise ConfigError("section required by this subcommand", key=attr)
        return v

    def echo(self) -> dict:
        return self.raw


def config_from_dict(d: dict) -> ExperimentConfig:
    _check_keys(d, TOP_KEYS, "")
    cfg = ExperimentConfig(raw=d)
    cfg.seed = _num(d, "seed", "", 0, int, 0)
    cfg.mode = d.get("mode", "sampled")
    if cfg.mode not in ("exact", "greedy", "sampled"):
        raise ConfigError(f"unknown mode {cfg.mode!r}", key="mode")
    cfg.workers = _num(d, "workers", "", 1, int, 1, 256)
    if "system" in d:
        cfg.system, cfg.matched = parse_system(d["system"])
    cfg.transform = parse_transform(d.get("transform"))
    if "grid" in d:
        cfg.grid, cfg.map_by_transform = parse_grid(d["grid"])
    s = d.get("sampling", {})
    _check_keys(s, {"N", "centers"}, "sampling")
    cfg.N = _num(s, "N", "sampling", 2000, int, 2)
    cfg.centers = _num(s, "centers", "sampling", 16, int, 1)
    b = d.get("budgets", {})
    _check_keys(b, {"nodes", "points"}, "budgets")
    cfg.node_budget = _num(b, "nodes", "budgets", 10_000_000, int, 1)
    cfg.point_budget = _num(b, "points", "budgets", 200_000, int, 1)
    if "hausdorff" in d:
        h = d["hausdorff"]
        _check_keys(h, {"floor", "phi", "max_points"}, "hausdorff")
        cfg.hausdorff = {"floor": _num(h, "floor", "hausdorff", 0.0, float, 0.0, 0.999),
                         "phi": _num(h, "phi", "hausdorff", 1.0, float, 1e-12),
                         "max_points": _num(h, "max_points", "hausdorff", 10, int, 1, 14)}
    if "verify" in d:
        _check_keys(d["verify"], {"sandwich", "products", "transforms", "hybrids", "katok",
                                  "hausdorff_products", "fullshift", "soft_estimates"}, "verify")
        cfg.verify = dict(d["verify"])
    if "scan" in d:
        sc = d["scan"]
        _check_keys(sc, {"transforms", "hybrids", "points"}, "scan")
        ts = [parse_transform(t, f"scan.transforms[{i}]") for i, t in enumerate(sc.get("transforms", []))]
        hy = []
        for i, h in enumerate(sc.get("hybrids", [])):
            _check_keys(h, {"alpha", "eps"}, f"scan.hybrids[{i}]")
            hy.append(parse_transform({"kind": "hybrid", **h}, f"scan.hybrids[{i}]"))
        cfg.scan = {"members": ts + hy, "points": _num(sc, "points", "scan", 32, int, 2)}
    if "product" in d:
        p = d["product"]
        _check_keys(p, {"second"}, "product")
        second, _ = parse_system(p.get("second", d.get("system")), "product.second")
        cfg.product = {"second": second}
    if "minkowski" in d:
        m = d["minkowski"]
        _check_keys(m, {"epsilons"}, "minkowski")
        eps = m.get("epsilons")
        if not isinstance(eps, list) or len(eps) < 2:
            raise ConfigError("expected a list of at least two numbers", key="minkowski.epsilons")
        cfg.minkowski = {"epsilons": [float(v) for v in eps]}
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno} column {exc.colno}", key="<file>") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", key="<file>") from None
    return config_from_dict(d)
