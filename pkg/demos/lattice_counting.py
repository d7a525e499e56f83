"""Exact lattice point counts against the ellipsoid volume asymptotic.

Counts the points of a Mordell-Weil height lattice (or a random integer
form) inside growing balls and compares each exact count with the leading
term c * T^(m/2), where c = pi^(m/2) / (Gamma(m/2+1) sqrt(Reg_L)).

    python3 demos/lattice_counting.py --label 5077a1
    python3 demos/lattice_counting.py --random-rank 3 --seed 7
"""

import argparse
import random

from ellreg import (
    asymptotic_constant,
    bundled_dataset_path,
    count_below,
    curve,
    gram_from_matrix,
    gram_matrix,
    ingest,
    point,
    regulator_L,
    successive_minima,
)


def curve_lattice(label):
    rec = next(r for r in ingest(bundled_dataset_path()) if r.label == label)
    c = curve(rec.ainvs)
    return gram_matrix(c, [point(x, y) for x, y in rec.gens])


def random_lattice(m, seed):
    rng = random.Random(seed)
    while True:
        b = [[rng.randint(-4, 4) for _ in range(m)] for _ in range(m)]
        g = [[sum(b[k][i] * b[k][j] for k in range(m)) for j in range(m)] for i in range(m)]
        try:
            return gram_from_matrix(g)
        except Exception:
            continue


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--label", default="5077a1", help="bundled curve label")
    ap.add_argument("--random-rank", type=int, default=0, help="use a random form instead")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--doublings", type=int, default=10, help="how far to grow T")
    args = ap.parse_args()

    if args.random_rank:
        gram = random_lattice(args.random_rank, args.seed)
        name = f"random rank-{args.random_rank} form (seed {args.seed})"
    else:
        gram = curve_lattice(args.label)
        name = f"height lattice of {args.label}"
    m = gram.m
    reg = regulator_L(gram)
    lam = successive_minima(gram)
    c = asymptotic_constant(m, 1, reg.value)
    print(f"{name}: rank {m}, Reg_L = {reg.value:.10f}, lambda_1^2 = {lam.values[0]:.6f}")
    print()
    print(f"{'T':>12}  {'N(T)':>8}  {'c*T^(m/2)':>12}  {'ratio':>7}")
    bound = lam.values[0]
    for _ in range(args.doublings + 1):
        n = count_below(gram, bound, include_zero=True).C
        lead = c * bound ** (m / 2.0)
        print(f"{bound:>12.4f}  {n:>8d}  {lead:>12.1f}  {n / lead:>7.4f}")
        bound *= 2.0


if __name__ == "__main__":
    main()
