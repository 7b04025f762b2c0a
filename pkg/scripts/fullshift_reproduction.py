"""Quantized [0,1] full shift: slope estimates, snowflake rescaling, box dimension.

    python scripts/fullshift_reproduction.py [--step 0.0009765625] [--N 2000] [--seed 0]

Prints the per-(eps, n) normalized values, the tail slopes, the ratio of
snowflake to plain slopes and the alphabet box-dimension slope next to the
closed-form grid counts.
"""
import argparse

import numpy as np

from mdimlab.estimate import ScaleGrid, grid_separated_count, mdim_metric_estimate, minkowski_dim_estimate
from mdimlab.metric import power
from mdimlab.systems import Alphabet, WeightFamily, make_full_shift


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--step", type=float, default=1 / 1024)
    p.add_argument("--N", type=int, default=2000)
    p.add_argument("--centers", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--a", type=float, default=0.5)
    a = p.parse_args()

    alpha = Alphabet.interval(a.step)
    sys = make_full_shift(alpha, WeightFamily(0.5, diam=alpha.diameter))
    grid = ScaleGrid.geometric(1 / 16, 1 / 64, 5, (1, 2, 3, 4, 5))
    rep = mdim_metric_estimate(sys, grid, "sampled", N=a.N, centers=a.centers, seed=a.seed)
    print("eps        " + " ".join(f"n={n:<7d}" for n in grid.ns))
    for i, e in enumerate(grid.epsilons):
        print(f"{e:<10.6f} " + " ".join(f"{v:<9.4f}" for v in rep.values["r"][i]))
    s = rep.slopes()
    print(f"slopes: upper={s['upper']:.4f} lower={s['lower']:.4f}")

    t = power(a.a)
    snow = mdim_metric_estimate(sys.with_transform(t), grid.mapped(t), "sampled", N=a.N,
                                centers=a.centers, seed=a.seed)
    print(f"snowflake a={a.a}: upper ratio={snow.upper / rep.upper:.4f} "
          f"lower ratio={snow.lower / rep.lower:.4f} (target {1 / a.a:.4f})")

    mk = minkowski_dim_estimate(alpha, grid.epsilons)
    closed = [grid_separated_count(a.step, e) for e in grid.epsilons]
    print(f"box dimension slope={mk.slope:.4f} counts={list(mk.counts)} closed form={closed}")
    assert list(mk.counts) == closed
    L = np.abs(np.log(grid.epsilons))
    print("log N / |log eps|: " + " ".join(f"{v:.4f}" for v in np.log(mk.counts) / L))


if __name__ == "__main__":
    main()
