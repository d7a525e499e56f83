"""Walk through every certificate produced for one curve.

Prints the curve invariants, the height Gram matrix with its error bounds,
the successive minima, and then each inequality certificate with its margin
and error budget, so you can see exactly what was checked and how close the
call was.

    python3 demos/certificate_walkthrough.py --label 389a1
"""

import argparse

from ellreg import analyze, bundled_dataset_path, ingest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--label", default="389a1", help="bundled curve label")
    args = ap.parse_args()

    rec = next(r for r in ingest(bundled_dataset_path()) if r.label == args.label)
    rep = analyze(rec)

    print(f"curve {rep.label}: y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6")
    print(f"  a-invariants      {tuple(str(a) for a in rep.ainvs)}")
    print(f"  minimal disc      {rep.disc_min}")
    print(f"  conductor         {rep.conductor}")
    print(f"  j-invariant       {rep.j}")
    print(f"  szpiro quotient   {rep.sigma:.6f}")
    print(f"  curve heights     h_E = {rep.h_e:.6f}, h = {rep.h:.6f}")
    print(f"  torsion           order {rep.torsion_order}, invariants {rep.torsion_invariants}")
    print(f"  rank (given gens) {rep.rank}")
    if rep.rank:
        print("\nheight pairing Gram matrix (value +/- err):")
        for i, row in enumerate(rep.gram.values):
            cells = "  ".join(
                f"{v:.12f}(±{e:.0e})" for v, e in zip(row, rep.gram.errs[i])
            )
            print(f"  [{cells}]")
        print(f"\nReg_L = {rep.reg_L.value:.12f} (+/- {rep.reg_L.err:.1e})")
        print(f"Reg   = {rep.reg.value:.12f} (Poincare convention, 2^m scaling)")
        mins = ", ".join(f"{v:.6f}" for v in rep.minima.values)
        print(f"successive minima (squared): {mins}")
        print("\npoint counts N(T) vs the volume term:")
        for row in rep.counting:
            print(f"  T = {row.T:10.4f}   N = {row.count:5d}   c*T^(m/2) = {row.expected:9.2f}")

    print("\ncertificates:")
    for cert in rep.certificates:
        line = (
            f"  {cert.name:22s} {cert.status:13s}"
            f" lhs={cert.lhs:.6e} rhs={cert.rhs:.6e} margin={cert.margin:+.3e}"
        )
        if cert.note:
            line += f"  [{cert.note}]"
        print(line)

    if rep.ratios:
        print("\nempirical constants for the shape bounds (no PASS/FAIL defined):")
        for convention, rr in rep.ratios:
            print(
                f"  {convention:8s} reg/tors^2 / shape = {rr.ratio:.6f},"
                f"  c_E / shape = {rr.ce_ratio:.6f}"
            )


if __name__ == "__main__":
    main()
