#!/usr/bin/env python3
"""Download the public UCI regression datasets and reshape them into CSV.

Output files (one per dataset) have a header row, comma separators and the
target as the last column:

    housing.csv   506 x 13 predictors, target medv
    auto-mpg.csv  392 x 7 predictors,  target mpg (rows with missing values dropped)
    servo.csv     167 x 4 predictors,  target class
    cpu.csv       209 x 6 predictors,  target prp

A `<name>.schema` sidecar is written next to each CSV when some numeric-looking
column should be treated as categorical.

The destination directory is taken from --out, then $RULEREG_DATA_DIR, then
./data.  When the UCI archive is unreachable, `--source rdatasets` extracts the
same tables from the `rdatasets` pip package (servo is not part of it).
"""

import argparse
import csv
import io
import os
import pickle
import sys
import urllib.request

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

HOUSING_COLS = [
    "crim", "zn", "indus", "chas", "nox", "rm", "age", "dis", "rad", "tax",
    "ptratio", "b", "lstat", "medv",
]
MPG_COLS = [
    "cylinders", "displacement", "horsepower", "weight", "acceleration",
    "model_year", "origin", "mpg",
]
SERVO_COLS = ["motor", "screw", "pgain", "vgain", "class"]
CPU_COLS = ["myct", "mmin", "mmax", "cach", "chmin", "chmax", "prp"]

SCHEMAS = {
    "auto-mpg": [("origin", "categorical")],
    "servo": [("motor", "categorical"), ("screw", "categorical")],
}


def fetch(url):
    with urllib.request.urlopen(url, timeout=30) as resp:
        return resp.read().decode("latin-1")


def uci_housing():
    rows = [line.split() for line in fetch(f"{UCI}/housing/housing.data").splitlines() if line.strip()]
    return HOUSING_COLS, rows


def uci_mpg():
    rows = []
    for line in fetch(f"{UCI}/auto-mpg/auto-mpg.data").splitlines():
        if not line.strip():
            continue
        fields = line.split('"')[0].split()
        if "?" in fields:
            continue
        mpg, rest = fields[0], fields[1:8]
        rows.append(rest + [mpg])
    return MPG_COLS, rows


def uci_servo():
    rows = [line.strip().split(",") for line in fetch(f"{UCI}/servo/servo.data").splitlines() if line.strip()]
    return SERVO_COLS, rows


def uci_cpu():
    rows = []
    for line in fetch(f"{UCI}/cpu-performance/machine.data").splitlines():
        if not line.strip():
            continue
        fields = line.strip().split(",")
        # vendor, model, MYCT..CHMAX, PRP, ERP
        rows.append(fields[2:9])
    return CPU_COLS, rows


def rdataset(name):
    import gzip
    import importlib.util

    spec = importlib.util.find_spec("rdatasets")
    if spec is None:
        raise RuntimeError("rdatasets package not installed (pip install rdatasets)")
    base = os.path.dirname(spec.origin)
    path = os.path.join(base, "_data", f"{name}.pkl.compress")
    with open(path, "rb") as fh:
        raw = fh.read()
    for decode in (gzip.decompress, _bz2, _lzma, _zlib):
        try:
            raw = decode(raw)
            break
        except Exception:
            continue
    return pickle.loads(raw)


def _bz2(b):
    import bz2
    return bz2.decompress(b)


def _lzma(b):
    import lzma
    return lzma.decompress(b)


def _zlib(b):
    import zlib
    return zlib.decompress(b)


def fmt(v):
    if hasattr(v, "item"):
        v = v.item()
    s = repr(v) if isinstance(v, float) else str(v)
    if s.endswith(".0"):
        s = s[:-2]
    return s


def rd_housing():
    df = rdataset("MASS/Boston")
    src = ["crim", "zn", "indus", "chas", "nox", "rm", "age", "dis", "rad", "tax",
           "ptratio", "black", "lstat", "medv"]
    return HOUSING_COLS, [[fmt(v) for v in row] for row in df[src].itertuples(index=False)]


def rd_mpg():
    df = rdataset("ISLR/Auto")
    src = ["cylinders", "displacement", "horsepower", "weight", "acceleration",
           "year", "origin", "mpg"]
    return MPG_COLS, [[fmt(v) for v in row] for row in df[src].itertuples(index=False)]


def rd_cpu():
    df = rdataset("MASS/cpus")
    src = ["syct", "mmin", "mmax", "cach", "chmin", "chmax", "perf"]
    return CPU_COLS, [[fmt(v) for v in row] for row in df[src].itertuples(index=False)]


SOURCES = {
    "uci": {"housing": uci_housing, "auto-mpg": uci_mpg, "servo": uci_servo, "cpu": uci_cpu},
    "rdatasets": {"housing": rd_housing, "auto-mpg": rd_mpg, "cpu": rd_cpu},
}


def write(out_dir, name, cols, rows):
    path = os.path.join(out_dir, f"{name}.csv")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    w.writerows(rows)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    if name in SCHEMAS:
        with open(os.path.join(out_dir, f"{name}.schema"), "w", encoding="utf-8") as fh:
            for col, kind in SCHEMAS[name]:
                fh.write(f"{col},{kind}\n")
    print(f"{path}: {len(rows)} rows x {len(cols) - 1} predictors")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=os.environ.get("RULEREG_DATA_DIR", "data"))
    ap.add_argument("--source", choices=sorted(SOURCES), default="uci")
    ap.add_argument("datasets", nargs="*", default=["housing", "auto-mpg", "servo", "cpu"])
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    failed = False
    for name in args.datasets:
        loader = SOURCES[args.source].get(name)
        if loader is None:
            print(f"{name}: not available from source '{args.source}'", file=sys.stderr)
            failed = True
            continue
        try:
            cols, rows = loader()
        except Exception as exc:  # network or package errors
            print(f"{name}: {exc}", file=sys.stderr)
            failed = True
            continue
        write(args.out, name, cols, rows)
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
