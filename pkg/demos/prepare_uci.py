"""Convert raw UCI files into the CSV layout the acceptance suite expects.

Usage::

    python demos/prepare_uci.py RAW_DIR OUT_DIR

``RAW_DIR`` must contain the original downloads ``monks-1.test``,
``monks-2.test``, ``monks-3.test`` (each lists all 432 instances, one per
line as ``class a1 ... a6 id``) and ``pima-indians-diabetes.data``
(8 comma-separated features, class last). ``OUT_DIR`` receives
``monks1.csv``, ``monks2.csv``, ``monks3.csv`` and ``pima.csv`` with a header
row and a ``label`` column. Then run::

    ASKLS_UCI_DIR=OUT_DIR pytest tests/test_acceptance.py -k criterion_7 -v
"""
import sys
from pathlib import Path

import numpy as np

from askls.data import LabeledDataset, write_csv


def monks(path):
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    labels = np.array([int(r[0]) for r in rows])
    X = np.array([[float(v) for v in r[1:7]] for r in rows])
    return LabeledDataset(X, labels, feature_names=tuple(f"a{i}" for i in range(1, 7)))


def pima(path):
    data = np.loadtxt(path, delimiter=",")
    names = ("pregnancies", "glucose", "pressure", "skin", "insulin", "bmi", "pedigree", "age")
    return LabeledDataset(data[:, :8], data[:, 8].astype(int), feature_names=names)


def main(raw, out):
    raw, out = Path(raw), Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for k in (1, 2, 3):
        write_csv(out / f"monks{k}.csv", monks(raw / f"monks-{k}.test"))
    write_csv(out / "pima.csv", pima(raw / "pima-indians-diabetes.data"))
    print(f"wrote monks1-3 and pima to {out}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(*sys.argv[1:])
