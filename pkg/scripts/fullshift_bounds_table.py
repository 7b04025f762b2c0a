"""Margins of the full-shift counting bounds on every small exhaustive instance.

    python scripts/fullshift_bounds_table.py [--out fullshift_bounds.csv]

Alphabets of 2 to 5 symbols, windows of 1 to 4 cells, lambda = 1/2.
"""
import argparse

from mdimlab.report import write_csv
from mdimlab.systems import Alphabet, WeightFamily
from mdimlab.verify import check_fullshift_bounds

ALPHABETS = {
    "two": Alphabet.explicit([[0, .5], [.5, 0]]),
    "three_discrete": Alphabet.explicit([[0, .5, .5], [.5, 0, .5], [.5, .5, 0]]),
    "grid_1/2": Alphabet.interval(0.5),
    "grid_1/3": Alphabet.interval(1 / 3),
    "grid_1/4": Alphabet.interval(0.25),
}
COLUMNS = ("alphabet", "size", "n", "eps", "delta", "status", "s_3le", "s_direction", "upper_bound",
           "katok", "katok_bound", "cylinder_claim")


def table(eps_list=(0.1, 0.2), delta=0.5) -> list:
    rows = []
    w = WeightFamily(0.5, radius=2)
    for name, A in ALPHABETS.items():
        for n in range(1, 5):
            for e in eps_list:
                o = check_fullshift_bounds(A, w, n, e, delta=delta, budget=1000)
                rows.append({"alphabet": name, "size": A.size, "n": n, "eps": e, "delta": delta,
                             "status": o.status, **{k: o.margins.get(k) for k in COLUMNS[6:]}})
    return rows


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--out", default="fullshift_bounds.csv")
    a = p.parse_args()
    rows = table()
    write_csv(a.out, COLUMNS, rows)
    for r in rows:
        print(f"{r['alphabet']:<15} n={r['n']} eps={r['eps']:<4} {r['status']:<5} "
              f"s={r['s_3le']} <= {r['upper_bound']}  katok={r['katok']} >= {r['katok_bound']}")


if __name__ == "__main__":
    main()
