"""Brute-force reference values.

Everything here is deliberately naive: exhaustive subset search, explicit
loops over coordinates, closed forms.  None of it shares code with the
solvers under test beyond numpy.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

TOL = 1e-12


def subsets(n: int, min_size: int = 1):
    for k in range(min_size, n + 1):
        yield from itertools.combinations(range(n), k)


def separated(D, eps) -> int:
    """Largest subset with every pair at distance > eps."""
    n = len(D)
    best = 1 if n else 0
    for S in subsets(n, 2):
        if len(S) <= best:
            continue
        if all(D[i][j] > eps + TOL for i, j in itertools.combinations(S, 2)):
            best = len(S)
    return best


def spanning(D, eps) -> int:
    """Fewest centers (from the set) with every point within eps of one."""
    n = len(D)
    for S in subsets(n):
        if all(any(D[i][c] <= eps + TOL for c in S) for i in range(n)):
            return len(S)
    return n


def diam(D, S) -> float:
    return max((D[i][j] for i, j in itertools.combinations(S, 2)), default=0.0)


def cover(D, eps) -> int:
    """Fewest subsets of diameter < eps covering the set (k-subset search)."""
    n = len(D)
    small = [frozenset(S) for S in subsets(n) if diam(D, S) < eps - TOL]
    full = frozenset(range(n))
    for k in range(1, n + 1):
        for combo in itertools.combinations(small, k):
            if frozenset().union(*combo) == full:
                return k
    return n


def katok(D, mu, eps, delta) -> int:
    """Fewest closed eps-balls whose union has mass > 1 - delta."""
    n = len(D)
    mu = np.asarray(mu, dtype=float)
    for S in subsets(n):
        covered = [i for i in range(n) if any(D[i][c] <= eps + TOL for c in S)]
        if mu[covered].sum() > 1 - delta + TOL:
            return len(S)
    return n


def hausdorff_content(D, s, eps, floor=0.0) -> float:
    """min over covers by sets of diameter < eps of sum max(diam, floor)^s.

    Covers may overlap; the recursion removes any admissible set meeting the
    uncovered part.
    """
    n = len(D)
    adm = []
    for S in subsets(n):
        d = diam(D, S)
        if d < eps - TOL:
            e = max(d, floor)
            adm.append((frozenset(S), 1.0 if s == 0 else e ** s))
    memo = {frozenset(): 0.0}

    def f(U):
        if U in memo:
            return memo[U]
        best = math.inf
        for S, w in adm:
            if S & U:
                best = min(best, w + f(U - S))
        memo[U] = best
        return best

    return f(frozenset(range(n)))


def dim_at_scale(D, eps, floor, phi=1.0, hi=64.0, width=1e-9) -> float:
    lo, up = 0.0, hi
    if hausdorff_content(D, 0.0, eps, floor) < phi:
        return 0.0
    while up - lo > width:
        mid = (lo + up) / 2
        if hausdorff_content(D, mid, eps, floor) >= phi:
            lo = mid
        else:
            up = mid
    return (lo + up) / 2


def grid_count(K: int, eps: float) -> int:
    """Maximal eps-separated subset of {0, 1/K, ..., 1}: spacing k/K with k/K > eps."""
    k = math.floor(eps * K + 1e-9) + 1
    return K // k + 1


def shift_distance(x, y, rho, weights, m):
    """Sum_g alpha_g rho(x_{g mod m}, y_{g mod m}) on a cyclic window of side m (rank 1)."""
    return sum(a * rho[x[g % m]][y[g % m]] for g, a in weights)


def bowen_shift(x, y, rho, weights, m, F):
    out = 0.0
    for h in F:
        xs = [x[(h + j) % m] for j in range(m)]
        ys = [y[(h + j) % m] for j in range(m)]
        out = max(out, shift_distance(xs, ys, rho, weights, m))
    return out


def lambda_items(lam, radius):
    return [(g, lam ** abs(g)) for g in range(-radius, radius + 1)]


def golden_mean_count(m: int, cyclic: bool) -> int:
    n = 0
    for w in itertools.product((0, 1), repeat=m):
        pairs = range(m) if cyclic else range(m - 1)
        if all(not (w[i] == 1 and w[(i + 1) % m] == 1) for i in pairs):
            n += 1
    return n
