#!/usr/bin/env python3
"""Compare produced report tables against the expected full-scale values.

Usage:
    compare.py <produced_sweep.csv> <expected_sweep.csv> \
               <produced_diffs.csv> <expected_means.csv>

Every window-sweep cell and every original-column mean must land within
+/-0.05 of the expected value; the remaining variant columns are reported at
the same tolerance but do not gate the exit status.
"""

import csv
import sys

TOLERANCE = 0.05


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def compare_sweep(produced_path, expected_path):
    produced = {
        (row["metric"], row["dataset"], row["w"]): float(row["mean_score"])
        for row in read_rows(produced_path)
    }
    failures = 0
    for row in read_rows(expected_path):
        key = (row["metric"], row["dataset"], row["w"])
        expected = float(row["mean_score"])
        got = produced.get(key)
        if got is None:
            print(f"MISSING sweep cell {key}")
            failures += 1
            continue
        ok = abs(got - expected) <= TOLERANCE
        print(f"{'PASS' if ok else 'FAIL'} sweep {key}: got {got:.4f}, expected {expected:.2f}")
        failures += 0 if ok else 1
    return failures


def compare_means(produced_path, expected_path):
    produced = {(row["dataset"], row["metric"]): row for row in read_rows(produced_path)}
    failures = 0
    for row in read_rows(expected_path):
        key = (row["dataset"], row["metric"])
        got_row = produced.get(key)
        if got_row is None:
            print(f"MISSING means row {key}")
            failures += 1
            continue
        for column, expected_text in row.items():
            if column in ("dataset", "metric"):
                continue
            gating = column == "original"
            got_text = got_row.get(column, "")
            if not got_text:
                print(f"MISSING means cell {key} {column}")
                failures += 1 if gating else 0
                continue
            got = float(got_text)
            expected = float(expected_text)
            ok = abs(got - expected) <= TOLERANCE
            tag = "PASS" if ok else ("FAIL" if gating else "WARN")
            print(f"{tag} means {key} {column}: got {got:.4f}, expected {expected:.2f}")
            if gating and not ok:
                failures += 1
    return failures


def main(argv):
    if len(argv) != 5:
        print(__doc__)
        return 2
    failures = compare_sweep(argv[1], argv[2])
    failures += compare_means(argv[3], argv[4])
    print(f"{failures} gating violation(s) at tolerance +/-{TOLERANCE}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
