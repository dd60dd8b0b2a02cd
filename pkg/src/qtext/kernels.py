"""Fidelity kernels, Gram matrices and PSD repair.

The kernel between ``x`` and ``y`` is the probability of reading all zeros
after running ``U(x)`` followed by ``U(y)^dagger`` on ``|0...0>``.  Exact
mode reads that probability off the statevector; shot mode samples the
composite circuit and reports the observed all-zeros fraction.
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import circuit as qc
from .errors import ArgumentError, ParseError, ShapeError

PSD_EPS = 1e-8


@dataclass(frozen=True)
class ShotConfig:
    """``shots == 0`` means exact kernels."""

    shots: int = 0
    master_seed: int = 0

    def __post_init__(self):
        if self.shots < 0:
            raise ArgumentError(f"shots must be >= 0, got {self.shots}")
        if self.master_seed < 0:
            raise ArgumentError(f"master_seed must be >= 0, got {self.master_seed}")

    @property
    def exact(self):
        return self.shots == 0


def kernel_circuit(fmap, x, y):
    """``U(x)`` followed by ``U(y)^dagger``."""
    return fmap.circuit(x) + qc.adjoint(fmap.circuit(y))


def exact_kernel(fmap, x, y):
    state = qc.run_circuit(qc.zero_state(fmap.n_qubits), kernel_circuit(fmap, x, y))
    return qc.zero_probability(state)


def pair_seed(master_seed, i, j):
    """Per-entry sampling seed; symmetric in ``(i, j)`` so mirrored entries agree."""
    a, b = (i, j) if i <= j else (j, i)
    return qc.derive_seed(master_seed, a, b)


def estimated_kernel(fmap, x, y, cfg, pair_index):
    if cfg.exact:
        raise ArgumentError("estimated_kernel needs shots >= 1")
    state = qc.run_circuit(qc.zero_state(fmap.n_qubits), kernel_circuit(fmap, x, y))
    counts = qc.sample_counts(state, cfg.shots, pair_seed(cfg.master_seed, *pair_index))
    return counts.get("0" * fmap.n_qubits) / cfg.shots


def _states(fmap, vectors):
    return np.array([fmap.state(v).amplitudes for v in vectors])


def gram_matrix(fmap, rows, cols=None, cfg=ShotConfig()):
    """Kernel values between ``rows`` and ``cols``.

    ``cols=None`` (or ``"same"``) gives the square training Gram: every
    unordered pair is evaluated once and mirrored, and the shot-mode
    diagonal is fixed at 1.  Otherwise the result is the
    ``len(rows) x len(cols)`` block, with entry ``(i, j)`` seeded by the
    pair ``(len(cols) + i, j)`` so test rows never reuse training seeds.

    Exact mode prepares each feature state once and takes squared overlaps,
    which equals the composite-circuit value up to rounding.
    """
    same = cols is None or (isinstance(cols, str) and cols == "same")
    if len(rows) == 0 or (not same and len(cols) == 0):
        raise ArgumentError("gram_matrix needs at least one vector on each side")
    if same:
        cols = rows
    n, m = len(rows), len(cols)

    if cfg.exact:
        A = _states(fmap, rows)
        B = A if same else _states(fmap, cols)
        K = np.clip(np.abs(A @ B.conj().T) ** 2, 0.0, 1.0)
        if same:
            K = np.triu(K) + np.triu(K, 1).T
        return K

    K = np.empty((n, m))
    offset = 0 if same else m
    for i in range(n):
        if same:
            K[i, i] = 1.0
            start = i + 1
        else:
            start = 0
        for j in range(start, m):
            K[i, j] = estimated_kernel(fmap, rows[i], cols[j], cfg, (offset + i, j))
            if same:
                K[j, i] = K[i, j]
    return K


def repair_psd(K):
    """Shift the diagonal so the smallest eigenvalue is nonnegative.

    Returns ``(repaired, shift)``; ``shift`` is 0 when ``K`` is already PSD.
    """
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ShapeError(f"repair_psd needs a square matrix, got shape {K.shape}")
    if not np.allclose(K, K.T, rtol=0.0, atol=1e-12):
        raise ArgumentError("repair_psd needs a symmetric matrix")
    lam_min = float(np.linalg.eigvalsh(K)[0])
    if lam_min >= 0.0:
        return K.copy(), 0.0
    shift = -lam_min + PSD_EPS
    return K + shift * np.eye(K.shape[0]), shift


def frobenius_distance(A, B):
    return float(np.linalg.norm(np.asarray(A) - np.asarray(B), "fro"))


def write_gram_csv(path, K, shots=0, seed=0):
    """Header ``n=<rows>,shots=<R>,seed=<s>`` (plus ``m=<cols>`` for blocks).

    Values are written with 17 significant digits, enough to round-trip.
    """
    K = np.asarray(K, dtype=float)
    header = [f"n={K.shape[0]}"]
    if K.shape[0] != K.shape[1]:
        header.append(f"m={K.shape[1]}")
    header += [f"shots={shots}", f"seed={seed}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in K:
            w.writerow([f"{v:.16e}" for v in row])


def read_gram_csv(path):
    """Return ``(K, meta)`` where ``meta`` holds the integer header fields."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty Gram file", path) from None
        meta = {}
        for item in header:
            key, sep, value = item.partition("=")
            if not sep:
                raise ParseError(f"bad header field {item!r}", path, 1)
            try:
                meta[key.strip()] = int(value)
            except ValueError:
                raise ParseError(f"non-integer header value {item!r}", path, 1) from None
        if "n" not in meta:
            raise ParseError("header lacks n=<count>", path, 1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ParseError("non-numeric kernel value", path, lineno) from None
    n, m = meta["n"], meta.get("m", meta["n"])
    if len(rows) != n or any(len(r) != m for r in rows):
        raise ParseError(f"expected a {n}x{m} matrix", path)
    return np.array(rows, dtype=float).reshape(n, m), meta
