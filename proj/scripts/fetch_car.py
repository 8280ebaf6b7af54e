#!/usr/bin/env python3
"""Fetch the UCI Car Evaluation dataset and write an 864/864 LIBSVM split.

The six categorical attributes are encoded ordinally (1..n in each
attribute's natural order) and the four classes become labels 1..4:

    unacc=1  acc=2  good=3  vgood=4

Usage:
    python3 scripts/fetch_car.py --out-dir data/car
    GMMKIT_CAR_DIR=data/car ctest --test-dir build -R acceptance_7

The accuracy check additionally needs the stock LIBSVM command-line tools
(svm-train, svm-predict) on PATH.
"""

import argparse
import pathlib
import random
import sys
import urllib.request

URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/car/car.data"

ATTRIBUTES = [
    ("buying", ["low", "med", "high", "vhigh"]),
    ("maint", ["low", "med", "high", "vhigh"]),
    ("doors", ["2", "3", "4", "5more"]),
    ("persons", ["2", "4", "more"]),
    ("lug_boot", ["small", "med", "big"]),
    ("safety", ["low", "med", "high"]),
]

CLASSES = {"unacc": 1, "acc": 2, "good": 3, "vgood": 4}


def encode(line):
    fields = line.strip().split(",")
    if len(fields) != 7:
        raise ValueError(f"expected 7 fields, got {line!r}")
    values = []
    for (name, order), raw in zip(ATTRIBUTES, fields):
        try:
            values.append(order.index(raw) + 1)
        except ValueError:
            raise ValueError(f"unknown {name} value {raw!r}") from None
    label = CLASSES[fields[6]]
    features = " ".join(f"{i + 1}:{v}" for i, v in enumerate(values))
    return f"{label} {features}"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default=".", help="where to write the split")
    parser.add_argument("--url", default=URL, help="override the download URL")
    parser.add_argument("--seed", type=int, default=42, help="shuffle seed")
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    print(f"downloading {args.url}", file=sys.stderr)
    with urllib.request.urlopen(args.url) as response:
        raw = response.read().decode("ascii")

    rows = [encode(line) for line in raw.splitlines() if line.strip()]
    if len(rows) != 1728:
        raise SystemExit(f"expected 1728 instances, got {len(rows)}")

    random.Random(args.seed).shuffle(rows)
    half = len(rows) // 2
    for name, part in [("car_train.libsvm", rows[:half]), ("car_test.libsvm", rows[half:])]:
        path = out_dir / name
        path.write_text("\n".join(part) + "\n")
        print(f"wrote {path} ({len(part)} rows)", file=sys.stderr)


if __name__ == "__main__":
    main()
