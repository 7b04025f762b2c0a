"""CSV and JSON export.

Column orders are fixed here and documented in the README.  Numbers are
written with 17 significant digits so a re-parse reproduces every float.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os

import numpy as np

from . import __version__

COUNT_COLUMNS = ("epsilon", "n", "window_size", "s", "r", "cov", "katok", "bound_direction", "mode", "seed")
HAUSDORFF_COLUMNS = ("epsilon", "n", "s_at_phi", "phi", "floor", "mode", "bisection_width")
CHECK_COLUMNS = ("name", "status", "margin", "anchor")
SCAN_COLUMNS = ("member", "upper", "lower", "direction", "exponent", "D_lower_bound")
PRODUCT_COLUMNS = ("system", "upper", "lower", "direction")
MINKOWSKI_COLUMNS = ("epsilon", "N", "bound_direction")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def write_csv(path: str, columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    return path


def read_csv(path: str) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def write_summary(path: str, config_echo: dict, results: dict) -> str:
    doc = {"tool": "mdimlab", "version": __version__, "config": _plain(config_echo),
           "results": _plain(results)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


def count_rows(rep, seed: int) -> list:
    """One row per (eps, n) of a metric DimensionReport.

    Exact/greedy rows carry integer counts.  Sampled rows carry the
    volumetric effective counts exp(|F_n| a(eps, n)).
    """
    rows = []
    for i, eps in enumerate(rep.epsilons):
        for k, n in enumerate(rep.ns):
            row = {"epsilon": eps, "n": n, "window_size": rep.window_sizes[k], "mode": rep.mode,
                   "seed": rep.seeds.get((i, k), seed) if rep.seeds else seed}
            raw = rep.raw.get((i, k), {})
            dirs = []
            for f in ("s", "r", "cov"):
                if f in rep.values:
                    row[f] = raw.get(f)
                    dirs.append(f"{f}={rep.directions[f][i][k]}")
            row["bound_direction"] = "|".join(dirs)
            rows.append(row)
    return rows


def hausdorff_rows(rep, bisection_width: float = 1e-6) -> list:
    rows = []
    for i, eps in enumerate(rep.epsilons):
        for k, n in enumerate(rep.ns):
            rows.append({"epsilon": eps, "n": n,
                         "s_at_phi": rep.values["H"][i, k] * rep.window_sizes[k],
                         "phi": rep.meta.get("phi"), "floor": rep.meta.get("floor"),
                         "mode": rep.mode, "bisection_width": bisection_width})
    return rows


def export_report(rep, out_dir: str, seed: int = 0, config_echo: dict | None = None,
                  stem: str = "counts") -> dict:
    """CSV of per-(eps, n) rows plus summary.json; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    if rep.kind == "hausdorff":
        csv_path = write_csv(os.path.join(out_dir, f"{stem}.csv"), HAUSDORFF_COLUMNS, hausdorff_rows(rep))
    else:
        csv_path = write_csv(os.path.join(out_dir, f"{stem}.csv"), COUNT_COLUMNS, count_rows(rep, seed))
    js = write_summary(os.path.join(out_dir, "summary.json"), config_echo or {}, {stem: rep.summary()})
    return {"csv": csv_path, "summary": js}
