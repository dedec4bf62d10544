#!/usr/bin/env python3
"""Convert the UCI datasets bundled in the keel-ds wheel into plain CSV.

    pip download --no-deps keel-ds -d /tmp/keel
    python3 tools/prepare_uci.py /tmp/keel/keel_ds-*.whl data/uci

Produces diabetes.csv (Pima), liver.csv (BUPA), glass.csv and vowel.csv with
a header row and the class in the last column. Glass ships only as one-vs-rest
splits; the six classes are rebuilt from the glass0/1/4/5/6 splits (rows with
no positive split are class 3). Vowel keeps the ten formant features and drops
the train/test flag, speaker and sex columns.
"""

import csv
import pathlib
import sys
import zipfile

RAW = "keel_ds/data/{kind}/raw/{name}.dat"


def rows(wheel, kind, name):
    text = wheel.read(RAW.format(kind=kind, name=name)).decode()
    return [[cell.strip() for cell in line.split(",")] for line in text.splitlines() if line.strip()]


def write(path, header, data):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(data)
    print(f"{path}: {len(data)} rows")


def main():
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    wheel = zipfile.ZipFile(sys.argv[1])
    out = pathlib.Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)

    pima = rows(wheel, "balanced", "pima")
    write(out / "diabetes.csv",
          ["preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age", "class"],
          [r[:-1] + [r[-1]] for r in pima])

    bupa = rows(wheel, "balanced", "bupa")
    write(out / "liver.csv",
          ["mcv", "alkphos", "sgpt", "sgot", "gammagt", "drinks", "class"], bupa)

    splits = {"glass0": "1", "glass1": "2", "glass4": "5", "glass5": "6", "glass6": "7"}
    base = None
    labels = None
    for name, cls in splits.items():
        r = rows(wheel, "imbalanced", name)
        features = [x[:-1] for x in r]
        if base is None:
            base = features
            labels = ["3"] * len(r)
        elif features != base:
            sys.exit(f"{name}: rows do not line up with glass0")
        for i, x in enumerate(r):
            if x[-1] == "positive":
                if labels[i] != "3":
                    sys.exit(f"{name}: row {i} positive in two splits")
                labels[i] = cls
    write(out / "glass.csv",
          ["ri", "na", "mg", "al", "si", "k", "ca", "ba", "fe", "class"],
          [f + [l] for f, l in zip(base, labels)])

    vowel = rows(wheel, "balanced", "vowel")
    write(out / "vowel.csv", [f"f{i}" for i in range(10)] + ["class"],
          [r[3:13] + [r[13]] for r in vowel])


if __name__ == "__main__":
    main()
