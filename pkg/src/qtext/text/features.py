"""Sentence features and the labeled feature CSV.

CSV layout: header ``label,split,x0,...,x{d-1}``; one row per document with
the class index (0/1) first, then ``train``/``test``, then coordinates.
"""

import csv

import numpy as np

from ..errors import ParseError
from .embeddings import sentence_vector


def featurize(docs, table):
    """``(vectors, labels)`` with one unit vector and class index per document."""
    docs = getattr(docs, "documents", docs)
    X = np.array([sentence_vector(d, table) for d in docs])
    y = np.array([d.label for d in docs], dtype=int)
    return X, y


def write_features_csv(path, X, labels, splits):
    X = np.asarray(X, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "split"] + [f"x{k}" for k in range(X.shape[1])])
        for row, lab, split in zip(X, labels, splits):
            w.writerow([int(lab), split] + [f"{v:.16e}" for v in row])


def read_features_csv(path):
    """Return ``(X, labels, splits)``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["label", "split"]:
            raise ParseError("feature CSV must start with 'label,split'", path, 1)
        d = len(header) - 2
        X, labels, splits = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != d + 2:
                raise ParseError(f"expected {d + 2} fields, got {len(row)}", path, lineno)
            try:
                lab = int(row[0])
                vec = [float(v) for v in row[2:]]
            except ValueError:
                raise ParseError("non-numeric field", path, lineno) from None
            if lab not in (0, 1):
                raise ParseError(f"label must be 0 or 1, got {lab}", path, lineno)
            labels.append(lab)
            splits.append(row[1])
            X.append(vec)
    if not X:
        raise ParseError("no feature rows", path)
    return np.array(X), np.array(labels, dtype=int), splits
