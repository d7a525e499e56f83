"""Watch the doubling limit converge to the canonical height.

For a chosen curve and point this prints, per doubling step n, the scaled
naive height 0.5 * 4^(-n) * h(x(2^n P)), its gap to the certified canonical
height, and the step-to-step shrink factor of that gap (about 4 per step).

    python3 demos/height_convergence.py --label 37a1 --steps 8
"""

import argparse

from ellreg import bundled_dataset_path, canonical_height, curve, ingest, point


def duplication_x_heights(c, pt, steps):
    """log max(|num|, den) of x(2^n P) via the exact duplication polynomials."""
    import math

    from ellreg import integral_model
    from ellreg.points import map_point
    from ellreg.primes import factorize

    ci, tr = integral_model(c)
    pt = map_point(tr, pt)
    b2, b4, b6, b8 = int(ci.b2), int(ci.b4), int(ci.b6), int(ci.b8)
    bad = sorted(factorize(int(ci.disc)))
    a, d = pt.x.numerator, pt.x.denominator
    out = [math.log(max(abs(a), d))]
    for _ in range(steps):
        num = a**4 - b4 * a * a * d * d - 2 * b6 * a * d**3 - b8 * d**4
        den = d * (4 * a**3 + b2 * a * a * d + 2 * b4 * a * d * d + b6 * d**3)
        for p in bad:
            while num % p == 0 and den % p == 0:
                num //= p
                den //= p
        if den < 0:
            num, den = -num, -den
        a, d = num, den
        out.append(math.log(max(abs(a), d)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--label", default="37a1", help="bundled curve label")
    ap.add_argument("--gen", type=int, default=0, help="generator index")
    ap.add_argument("--steps", type=int, default=8, help="number of doublings")
    args = ap.parse_args()

    rec = next(r for r in ingest(bundled_dataset_path()) if r.label == args.label)
    c = curve(rec.ainvs)
    p = point(*rec.gens[args.gen])
    hv = canonical_height(c, p)
    print(f"curve {args.label}, P = ({p.x}, {p.y})")
    print(f"canonical height  {hv.value:.15f}  (+/- {hv.err:.1e})")
    print()
    print(f"{'n':>2}  {'0.5*4^-n*h(x(2^n P))':>22}  {'gap to limit':>13}  {'shrink':>7}")
    seq = duplication_x_heights(c, p, args.steps)
    prev_gap = None
    for n, h in enumerate(seq):
        approx = 0.5 * h / 4.0**n
        gap = abs(hv.value - approx)
        shrink = f"{prev_gap / gap:7.3f}" if prev_gap and gap else "       "
        print(f"{n:>2}  {approx:>22.15f}  {gap:>13.3e}  {shrink}")
        prev_gap = gap


if __name__ == "__main__":
    main()
