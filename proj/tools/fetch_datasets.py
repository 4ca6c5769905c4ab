#!/usr/bin/env python3
"""Materialize the benchmark CSVs under data/.

wdbc    -- scikit-learn's bundled copy of the UCI Wisconsin Diagnostic data.
breastc -- the UCI Wisconsin (original) breast cancer data with incomplete
           rows removed (683 rows), read from the keel-ds package.
banknote -- not bundled by any Python package; pass the UCI
           data_banknote_authentication.txt file with --banknote.

Every file gets a header row and a 0/1 target column named "target".
"""

import argparse
import csv
import importlib.resources
import pathlib
import sys

BREASTC_COLUMNS = [
    "clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
    "marginal_adhesion", "epithelial_cell_size", "bare_nuclei",
    "bland_chromatin", "normal_nucleoli", "mitoses",
]
BANKNOTE_COLUMNS = ["variance", "skewness", "curtosis", "entropy"]


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def fetch_wdbc(out):
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    names = [n.replace(" ", "_") for n in bunch.feature_names]
    rows = [[repr(float(v)) for v in x] + [int(t)] for x, t in zip(bunch.data, bunch.target)]
    # sklearn codes benign as 1, which is the positive class here.
    write_csv(out / "wdbc.csv", names + ["target"], rows)


def fetch_breastc(out):
    raw = importlib.resources.files("keel_ds") / "data/balanced/raw/wisconsin.dat"
    rows = []
    for line in raw.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        fields = [f.strip() for f in line.split(",")]
        # class 2 = benign (positive), 4 = malignant
        rows.append(fields[:-1] + [1 if fields[-1] == "2" else 0])
    write_csv(out / "breastc.csv", BREASTC_COLUMNS + ["target"], rows)


def convert_banknote(src, out):
    rows = []
    for line in pathlib.Path(src).read_text().splitlines():
        if line.strip():
            rows.append([f.strip() for f in line.split(",")])
    write_csv(out / "banknote.csv", BANKNOTE_COLUMNS + ["target"], rows)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--banknote", help="path to UCI data_banknote_authentication.txt")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fetch_wdbc(out)
    fetch_breastc(out)
    if args.banknote:
        convert_banknote(args.banknote, out)
    elif not (out / "banknote.csv").exists():
        print("banknote.csv not created: pass --banknote <data_banknote_authentication.txt>",
              file=sys.stderr)


if __name__ == "__main__":
    main()
