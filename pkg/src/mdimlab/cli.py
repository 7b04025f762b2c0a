"""Command line front door.

    mdimlab estimate      --config c.json --out dir
    mdimlab verify        --config c.json --out dir
    mdimlab scan-metrics  --config c.json --out dir
    mdimlab product       --config c.json --out dir
    mdimlab minkowski     --config c.json --out dir

Exit codes: 0 success, 1 a hard check failed, 2 configuration error,
3 resource or estimation failure.
"""
from __future__ import annotations

import argparse
import os
import sys as _sys

import numpy as np

from . import __version__
from .config import ExperimentConfig, load_config
from .errors import ConfigError, ConsistencyError, DomainError, EstimationError, ResourceError
from .estimate import ScaleGrid, mdim_hausdorff_estimate, mdim_metric_estimate, minkowski_dim_estimate
from .metric import uniform_distance_matrix
from .report import (CHECK_COLUMNS, MINKOWSKI_COLUMNS, PRODUCT_COLUMNS, SCAN_COLUMNS, export_report,
                     write_csv, write_summary)
from .systems import product_system, sample_points
from .verify import SuiteConfig, run_desk_suite, write_counterexamples

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


def _grid_for(cfg: ExperimentConfig, t) -> ScaleGrid:
    grid = cfg.need("grid")
    return grid.mapped(t) if (t is not None and cfg.map_by_transform) else grid


def _estimate(cfg: ExperimentConfig, sys, grid: ScaleGrid, mode: str | None = None):
    return mdim_metric_estimate(sys, grid, mode or cfg.mode, N=cfg.N, centers=cfg.centers,
                                seed=cfg.seed, matched=cfg.matched, node_budget=cfg.node_budget,
                                point_budget=cfg.point_budget, workers=cfg.workers)


def cmd_estimate(cfg: ExperimentConfig, out: str) -> int:
    base = cfg.need("system")
    t = cfg.transform
    sys = base.with_transform(t) if t is not None else base
    rep = _estimate(cfg, sys, _grid_for(cfg, t))
    export_report(rep, out, cfg.seed, cfg.echo(), stem="counts")
    results = {"counts": rep.summary()}
    if cfg.hausdorff is not None:
        h = cfg.hausdorff
        hmode = "exact" if cfg.mode == "exact" else "greedy"
        hrep = mdim_hausdorff_estimate(sys, _grid_for(cfg, t), h["floor"], phi=h["phi"], mode=hmode,
                                       max_points=h["max_points"], seed=cfg.seed,
                                       matched=cfg.matched, workers=cfg.workers)
        export_report(hrep, out, cfg.seed, cfg.echo(), stem="hausdorff")
        results["hausdorff"] = hrep.summary()
    write_summary(os.path.join(out, "summary.json"), cfg.echo(), results)
    s = rep.summary()
    print(f"upper={s['upper']:.6g} lower={s['lower']:.6g} direction={s['direction']} mode={rep.mode}")
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: str) -> int:
    v = dict(cfg.verify)
    try:
        suite = SuiteConfig(seed=cfg.seed, **v)
    except TypeError as exc:
        raise ConfigError(str(exc), key="verify") from None
    outcomes = run_desk_suite(suite)
    rows = [{"name": o.name, "status": o.status, "margin": o.margin, "anchor": o.anchor} for o in outcomes]
    write_csv(os.path.join(out, "checks.csv"), CHECK_COLUMNS, rows)
    paths = write_counterexamples(outcomes, os.path.join(out, "counterexamples"))
    counts = {}
    for o in outcomes:
        counts[o.status] = counts.get(o.status, 0) + 1
    write_summary(os.path.join(out, "summary.json"), cfg.echo(),
                  {"checks": len(outcomes), "statuses": counts,
                   "counterexamples": [os.path.basename(p) for p in paths]})
    width = max(len(o.name) for o in outcomes) if outcomes else 4
    for o in outcomes:
        m = "" if o.margin is None else f"{o.margin:.6g}"
        print(f"{o.name:<{width}}  {o.status:<14}  {m:>12}  {o.anchor}")
    failed = [o for o in outcomes if o.failed]
    print(f"{len(outcomes)} checks, {len(failed)} hard failures")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_scan(cfg: ExperimentConfig, out: str) -> int:
    base = cfg.need("system")
    scan = cfg.need("scan")
    X, _ = sample_points(base, scan["points"], cfg.seed)
    D0 = base.pairwise_bowen(X, (0,))
    rows, results = [], {}
    ref = _estimate(cfg, base, cfg.need("grid"))
    rows.append({"member": "identity", "upper": ref.upper, "lower": ref.lower,
                 "direction": ref.direction_flag(), "exponent": 1.0, "D_lower_bound": 0.0})
    results["identity"] = ref.summary()
    for t in scan["members"]:
        sys = base.with_transform(t)
        rep = _estimate(cfg, sys, _grid_for(cfg, t))
        Dt = sys.pairwise_bowen(X, (0,))
        name = t.describe()
        rows.append({"member": name, "upper": rep.upper, "lower": rep.lower,
                     "direction": rep.direction_flag(), "exponent": t.exponent,
                     "D_lower_bound": uniform_distance_matrix(D0, Dt)})
        results[name] = rep.summary()
    write_csv(os.path.join(out, "scan.csv"), SCAN_COLUMNS, rows)
    write_summary(os.path.join(out, "summary.json"), cfg.echo(), {"scan": results})
    for r in rows:
        print(f"{r['member']}: upper={r['upper']:.6g} lower={r['lower']:.6g} D>={r['D_lower_bound']:.3g}")
    return EXIT_OK


def cmd_product(cfg: ExperimentConfig, out: str) -> int:
    first = cfg.need("system")
    second = cfg.need("product")["second"]
    mode = "greedy" if cfg.mode == "sampled" else cfg.mode
    grid = cfg.need("grid")
    reps = {"first": _estimate(cfg, first, grid, mode),
            "second": _estimate(cfg, second, grid, mode),
            "product": _estimate(cfg, product_system(first, second), grid, mode)}
    rows = [{"system": k, "upper": r.upper, "lower": r.lower, "direction": r.direction_flag()}
            for k, r in reps.items()]
    write_csv(os.path.join(out, "product.csv"), PRODUCT_COLUMNS, rows)
    u = reps["first"].upper + reps["second"].upper
    lo = reps["first"].lower + reps["second"].lower
    chain = {"product_upper_minus_sum_upper": reps["product"].upper - u,
             "product_lower_minus_sum_lower": reps["product"].lower - lo,
             "soft_status": "soft-pass" if reps["product"].upper <= u + 0.05 else "soft-deviation"}
    write_summary(os.path.join(out, "summary.json"), cfg.echo(),
                  {"mode": mode, "chain": chain, **{k: r.summary() for k, r in reps.items()}})
    for r in rows:
        print(f"{r['system']}: upper={r['upper']:.6g} lower={r['lower']:.6g}")
    print(f"chain: {chain['soft_status']}")
    return EXIT_OK


def cmd_minkowski(cfg: ExperimentConfig, out: str) -> int:
    sys = cfg.need("system")
    eps = cfg.need("minkowski")["epsilons"]
    rep = minkowski_dim_estimate(sys.alphabet, eps, node_budget=cfg.node_budget)
    rows = [{"epsilon": e, "N": n, "bound_direction": d}
            for e, n, d in zip(rep.epsilons, rep.counts, rep.directions)]
    write_csv(os.path.join(out, "minkowski.csv"), MINKOWSKI_COLUMNS, rows)
    write_summary(os.path.join(out, "summary.json"), cfg.echo(), {"minkowski": rep.summary()})
    print(f"slope={rep.slope:.6g} upper={rep.upper:.6g} lower={rep.lower:.6g}")
    return EXIT_OK


COMMANDS = {"estimate": cmd_estimate, "verify": cmd_verify, "scan-metrics": cmd_scan,
            "product": cmd_product, "minkowski": cmd_minkowski}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdimlab", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"mdimlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON experiment file")
        s.add_argument("--out", default="out", help="output directory")
        s.add_argument("--workers", type=int, default=None)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--mode", choices=("exact", "greedy", "sampled"), default=None)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        # flags override the file; the echo records the effective values
        for k in ("workers", "seed", "mode"):
            v = getattr(args, k)
            if v is not None:
                setattr(cfg, k, v)
                cfg.raw = {**cfg.raw, k: v}
        if cfg.workers < 1:
            raise ConfigError("must be at least 1", key="workers")
        os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: system.boundary: {exc}", file=_sys.stderr)
        return EXIT_CONFIG
    except (ResourceError, EstimationError) as exc:
        print(f"resource error: {exc}", file=_sys.stderr)
        return EXIT_RESOURCE
    except ConsistencyError as exc:
        print(f"check failed: {exc}", file=_sys.stderr)
        return EXIT_FAIL


def main() -> None:
    np.seterr(all="ignore")
    _sys.exit(run())


if __name__ == "__main__":
    main()
