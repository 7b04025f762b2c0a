"""Run every bundled config through the CLI into one output tree.

    python scripts/run_bundled_suite.py --out runs/bundled [--seed 0]

Each config writes into <out>/<config name>/.  Two runs with the same seed
produce byte-identical files.
"""
import argparse
import os
import sys

from mdimlab.cli import run

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(os.path.dirname(HERE), "configs")

BUNDLE = [
    ("fullshift_estimate", "estimate"),
    ("snowflake", "estimate"),
    ("subshift_hausdorff", "estimate"),
    ("minkowski", "minkowski"),
    ("scan_metrics", "scan-metrics"),
    ("product", "product"),
    ("desk_verify", "verify"),
]


def run_suite(out: str, seed=None, workers=None) -> dict:
    codes = {}
    for name, sub in BUNDLE:
        argv = [sub, "--config", os.path.join(CONFIGS, f"{name}.json"), "--out", os.path.join(out, name)]
        if seed is not None:
            argv += ["--seed", str(seed)]
        if workers is not None:
            argv += ["--workers", str(workers)]
        codes[name] = run(argv)
    return codes


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--out", default="runs/bundled")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    a = p.parse_args()
    codes = run_suite(a.out, a.seed, a.workers)
    for k, v in codes.items():
        print(f"{k:<20} exit {v}")
    sys.exit(max(codes.values()))


if __name__ == "__main__":
    main()
