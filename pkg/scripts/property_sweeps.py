"""Large seeded sweeps of the exact count relations, written to CSV.

    python scripts/property_sweeps.py --instances 1000 --out runs/sweeps.csv

Covers the count chain, product inequalities, transform relations, hybrid
transfers and Katok <= r on random finite instances.
"""
import argparse
import time

import numpy as np

from mdimlab.group import box
from mdimlab.instances import random_finite_system
from mdimlab.metric import MetricTransform, power
from mdimlab.report import CHECK_COLUMNS, write_csv
from mdimlab.systems import WeightedPointSet
from mdimlab.verify import (check_hybrid_metric, check_katok_le_r, check_product_counts, check_sandwich,
                            check_transform_relations)


def sweep(instances: int, seed: int) -> list:
    out = []
    streams = np.random.SeedSequence(seed).spawn(instances)
    for i, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        kind = i % 5
        F = tuple(box(int(rng.integers(1, 4))))
        eps = float(rng.uniform(0.05, 0.6))
        if kind == 0:
            sys = random_finite_system(int(rng.integers(1, 13)), rng, quantum=0.1)
            out.append(check_sandwich(sys.pairwise_bowen(None, F), eps))
        elif kind == 1:
            s1 = random_finite_system(int(rng.integers(1, 9)), rng)
            s2 = random_finite_system(int(rng.integers(1, 9)), rng)
            out.append(check_product_counts(s1, s2, eps, len(F)))
        elif kind == 2:
            t = [power(0.3), power(0.5), power(0.9), MetricTransform("log_power", a=0.4)][i // 5 % 4]
            out.append(check_transform_relations(random_finite_system(int(rng.integers(2, 10)), rng),
                                                 None, F, t, eps))
        elif kind == 3:
            a, e = [0.3, 0.5, 0.8][i // 5 % 3], [0.05, 0.1, 0.2][i // 15 % 3]
            out.append(check_hybrid_metric(random_finite_system(int(rng.integers(2, 10)), rng), None, F,
                                           a, e, [e / 2, e / 4]))
        else:
            D = random_finite_system(int(rng.integers(2, 11)), rng).pairwise_bowen(None, F)
            mu = WeightedPointSet.from_weights(rng.random(len(D)) + 0.01)
            out.append(check_katok_le_r(D, mu, eps, float(rng.uniform(0.05, 0.9))))
    return out


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="sweeps.csv")
    a = p.parse_args()
    t0 = time.perf_counter()
    res = sweep(a.instances, a.seed)
    write_csv(a.out, CHECK_COLUMNS, [{"name": o.name, "status": o.status, "margin": o.margin,
                                      "anchor": o.anchor} for o in res])
    fails = [o for o in res if o.failed]
    print(f"{len(res)} checks, {len(fails)} failures, {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
