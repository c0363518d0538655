#!/usr/bin/env python3
"""Print the observed characteristic table of the toggle circuit.

Each row executes the tail-iterative fixture until a run continues past the
first loop pass, then reports the first pass's next-state values.
"""

import argparse

from ctrlcirc.fixtures import run_flipflop_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=64, help="seeds scanned per row (default 64)")
    args = ap.parse_args()

    rows = run_flipflop_table(range(args.seeds))
    print(" S  R  Q | Q' R' S'")
    print("---------+---------")
    mismatches = 0
    for row in rows:
        want = row.s | ((1 - row.r) & row.q)
        ok = (row.q_next, row.r_next, row.s_next) == (want, want, 1 - want)
        mismatches += 0 if ok else 1
        flag = "" if ok else "  <- MISMATCH"
        print(f" {row.s}  {row.r}  {row.q} |  {row.q_next}  {row.r_next}  {row.s_next}{flag}")
    print(f"\n{8 - mismatches}/8 rows match q' = s or (not r and q), r' = q', s' = not q'")
    raise SystemExit(1 if mismatches else 0)


if __name__ == "__main__":
    main()
