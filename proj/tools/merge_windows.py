#!/usr/bin/env python3
"""Merge eigenvalue CSVs from overlapping lambda windows into one list.

Rows closer than 1e-6 (relative, absolute below 1) are the same eigenvalue;
the row with the smaller sigma_min is kept. Conflicting multiplicities are
reported on stderr and make the exit status nonzero.
"""
import argparse
import csv
import sys


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("inputs", nargs="+", help="eigenvalues.csv files")
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args()

    rows, header = [], None
    for path in args.inputs:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if header is None:
                header = reader.fieldnames
            elif reader.fieldnames != header:
                sys.exit(f"{path}: header differs")
            rows.extend(reader)
    rows.sort(key=lambda r: float(r["lambda"]))

    merged, conflicts = [], 0
    for r in rows:
        lam = float(r["lambda"])
        if merged and abs(lam - float(merged[-1]["lambda"])) <= 1e-6 * max(1.0, lam):
            prev = merged[-1]
            if prev["multiplicity"] != r["multiplicity"]:
                print(f"multiplicity conflict at {prev['lambda']}: {prev['multiplicity']} vs {r['multiplicity']}",
                      file=sys.stderr)
                conflicts += 1
            if float(r["sigma_min"]) < float(prev["sigma_min"]):
                merged[-1] = r
            continue
        merged.append(r)

    with open(args.output, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=header, lineterminator="\n")
        w.writeheader()
        w.writerows(merged)
    total = sum(int(r["multiplicity"]) for r in merged)
    print(f"{len(merged)} distinct eigenvalues, {total} with multiplicity", file=sys.stderr)
    return 1 if conflicts else 0


if __name__ == "__main__":
    sys.exit(main())
