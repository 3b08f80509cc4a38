#!/usr/bin/env python3
"""Materialize the benchmark datasets as headered CSV files under data/.

Wine ships with scikit-learn and matches the benchmark suite exactly
(178 x 13). Breast Cancer is written from the bundled WDBC snapshot
(569 x 30); the original 699 x 9 Wisconsin file can be dropped in as
data/breast.csv when available. Dermatology and Mfeat need network access
(fetched from OpenML when reachable); when they are absent the acceptance
suite reports those rows as skipped.
"""

import os
import sys

import numpy as np

OUT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def write_csv(path, X, y, feature_prefix="f"):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    header = ",".join(f"{feature_prefix}{j}" for j in range(X.shape[1])) + ",label"
    with open(path, "w") as out:
        out.write(header + "\n")
        for row, label in zip(X, y):
            out.write(",".join(repr(float(v)) for v in row) + f",{label}\n")
    print(f"wrote {path}: {X.shape[0]} x {X.shape[1]}")


def main():
    os.makedirs(OUT, exist_ok=True)
    try:
        from sklearn.datasets import load_breast_cancer, load_wine
    except ImportError:
        print("scikit-learn is required to materialize the bundled datasets", file=sys.stderr)
        return 1

    wine = load_wine()
    write_csv(os.path.join(OUT, "wine.csv"), wine.data, wine.target)

    wdbc = load_breast_cancer()
    write_csv(os.path.join(OUT, "breast_cancer_wdbc.csv"), wdbc.data, wdbc.target)

    # OpenML fetches need network access; skip quietly when offline
    try:
        from sklearn.datasets import fetch_openml

        for name, openml_name, out_name in [
            ("Dermatology", "dermatology", "dermatology.csv"),
            ("Mfeat", "mfeat-factors", "mfeat.csv"),
        ]:
            target = os.path.join(OUT, out_name)
            if os.path.exists(target):
                print(f"{target} already present")
                continue
            ds = fetch_openml(openml_name, version=1, as_frame=False)
            X = np.nan_to_num(np.asarray(ds.data, dtype=np.float64))
            codes, y = np.unique(ds.target, return_inverse=True)
            write_csv(target, X, y)
    except Exception as exc:  # noqa: BLE001
        print(f"OpenML datasets unavailable ({type(exc).__name__}); "
              "dermatology.csv / mfeat.csv not written")

    return 0


if __name__ == "__main__":
    sys.exit(main())
