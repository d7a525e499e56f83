"""Run the whole bundled dataset and summarize the outcome.

Equivalent to `ellreg certify <bundled data>` plus a small digest: per-curve
certificate tallies, the regulator under both conventions, and the overall
exit status the CLI would return.

    python3 demos/batch_report.py
    python3 demos/batch_report.py --data my_curves.jsonl
"""

import argparse
import collections

from ellreg.harness import bundled_dataset_path, run_batch


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default=None, help="JSON-lines dataset (default: bundled)")
    args = ap.parse_args()

    path = args.data or bundled_dataset_path()
    entries, status = run_batch(path)

    print(f"{'label':>8} {'N':>6} {'rank':>4} {'tors':>4} {'Reg_L':>14} {'Reg':>14}  certificates")
    totals = collections.Counter()
    for entry in entries:
        if "error" in entry:
            print(f"{entry.get('label', '?'):>8}  ERROR: {entry['error']['message']}")
            continue
        tally = collections.Counter(c["status"] for c in entry["certificates"])
        totals.update(tally)
        marks = " ".join(f"{k}:{v}" for k, v in sorted(tally.items()))
        print(
            f"{entry['label']:>8} {entry['conductor']:>6} {entry['rank']:>4}"
            f" {entry['torsion_order']:>4} {entry['reg_L']['value']:>14.10f}"
            f" {entry['reg']['value']:>14.10f}  {marks}"
        )

    print()
    print(f"total certificates: {dict(sorted(totals.items()))}")
    print(f"exit status: {status} (0 = all clear, 2 = some FAIL, 1 = errors)")


if __name__ == "__main__":
    main()
