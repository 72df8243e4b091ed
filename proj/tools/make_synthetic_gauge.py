#!/usr/bin/env python3
"""Writes data/synthetic_gauge.csv: a daily discharge-like series whose
log(1 + value) is a Gaussian AR(1) with phi = 0.87, innovation sd 0.2 and
mean 2, with blank values and skipped dates. Deterministic for a given seed."""

import argparse
import csv
import datetime as dt
import math
import random
from pathlib import Path

PHI = 0.87
SD = 0.2
MEAN = 2.0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "synthetic_gauge.csv")
    ap.add_argument("--days", type=int, default=1300)
    ap.add_argument("--blanks", type=int, default=25)
    ap.add_argument("--skipped", type=int, default=25)
    ap.add_argument("--seed", type=int, default=87)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    y = MEAN + rng.gauss(0.0, SD / math.sqrt(1.0 - PHI * PHI))
    values = []
    for _ in range(args.days):
        y = MEAN + PHI * (y - MEAN) + rng.gauss(0.0, SD)
        values.append(math.expm1(y))

    # Gaps stay away from the ends so the period matches the nominal span.
    interior = list(range(1, args.days - 1))
    gaps = rng.sample(interior, args.blanks + args.skipped)
    blanks = set(gaps[: args.blanks])
    skipped = set(gaps[args.blanks :])

    start = dt.date(2021, 1, 1)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "value"])
        for i, v in enumerate(values):
            if i in skipped:
                continue
            day = (start + dt.timedelta(days=i)).isoformat()
            w.writerow([day, "" if i in blanks else f"{v:.6f}"])


if __name__ == "__main__":
    main()
