"""Compile real feature vectors into state-preparation circuits.

Two maps are provided:

* amplitude encoding, where a unit vector of length ``2**n`` becomes the
  amplitudes of an ``n``-qubit state through a binary tree of multiplexed
  RY rotations;
* the second-order Pauli-Z ("ZZ") evolution map, one qubit per feature.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import circuit as qc
from .errors import ArgumentError, DegenerateInputError, ShapeError

AMPLITUDE = "amplitude"
ZZ = "zz"


def pad_and_normalize(raw, n_qubits):
    """Zero-pad ``raw`` to ``2**n_qubits`` entries and scale to unit L2 norm."""
    v = np.asarray(raw, dtype=float).reshape(-1)
    size = 1 << n_qubits
    if v.shape[0] > size:
        raise ShapeError(f"{v.shape[0]} features do not fit in {n_qubits} qubits ({size} amplitudes)")
    if not np.all(np.isfinite(v)):
        raise ArgumentError("feature vector contains NaN or Inf")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise DegenerateInputError("cannot normalize the zero vector")
    out = np.zeros(size)
    out[: v.shape[0]] = v / norm
    return out


@dataclass(frozen=True)
class AngleTree:
    """RY angles per tree level; level ``k`` holds ``2**k`` angles."""

    n_qubits: int
    levels: tuple

    def __post_init__(self):
        if len(self.levels) != self.n_qubits:
            raise ShapeError(f"expected {self.n_qubits} levels, got {len(self.levels)}")
        for k, lvl in enumerate(self.levels):
            if len(lvl) != 1 << k:
                raise ShapeError(f"level {k} must hold {1 << k} angles, got {len(lvl)}")

    @property
    def n_angles(self):
        return sum(len(lvl) for lvl in self.levels)


def build_angle_tree(v):
    """Angles that prepare the real unit vector ``v`` from ``|0...0>``.

    Node ``j`` of level ``k`` covers the contiguous block
    ``v[j*m:(j+1)*m]`` with ``m = len(v) >> k``.  Internal nodes rotate by
    ``2*atan2(|right half|, |left half|)``; the last level sees adjacent
    pairs ``(a, b)`` and rotates by ``2*atan2(b, a)``, which carries signs.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    size = v.shape[0]
    if size < 2 or size & (size - 1):
        raise ShapeError(f"vector length must be a power of two >= 2, got {size}")
    n = size.bit_length() - 1
    levels = []
    for k in range(n):
        blocks = v.reshape(1 << k, size >> k)
        half = blocks.shape[1] // 2
        left, right = blocks[:, :half], blocks[:, half:]
        if k == n - 1:
            angles = 2.0 * np.arctan2(right[:, 0], left[:, 0])
        else:
            angles = 2.0 * np.arctan2(np.linalg.norm(right, axis=1), np.linalg.norm(left, axis=1))
        levels.append(tuple(float(a) for a in angles))
    return AngleTree(n, tuple(levels))


def amplitude_circuit(tree):
    """Multiplexed-RY circuit realizing ``tree``.

    Level ``k`` splits on qubit ``n-1-k`` (block halves differ in that bit),
    controlled on the ``k`` more significant qubits.  Each of the ``2**k``
    control patterns becomes a multi-controlled RY with X gates around the
    controls that must read 0.
    """
    n = tree.n_qubits
    gates = []
    for k, angles in enumerate(tree.levels):
        target = n - 1 - k
        if k == 0:
            gates.append(qc.ry(target, angles[0]))
            continue
        controls = tuple(range(n - 1, n - 1 - k, -1))  # MSB of pattern first
        for pattern, theta in enumerate(angles):
            flips = [c for bit, c in enumerate(controls) if not (pattern >> (k - 1 - bit)) & 1]
            gates.extend(qc.x(c) for c in flips)
            gates.append(qc.cry(controls, target, theta))
            gates.extend(qc.x(c) for c in flips)
    return qc.Circuit(n, tuple(gates))


def zz_circuit(x, reps=2):
    """Second-order Pauli-Z evolution map, one qubit per feature.

    Per repetition: H on every qubit, RZ(2 x_i) on qubit i, then for each
    pair i < j the block CNOT(i, j) RZ(2 (pi - x_i)(pi - x_j)) CNOT(i, j).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if reps < 1:
        raise ArgumentError(f"reps must be >= 1, got {reps}")
    n = x.shape[0]
    gates = []
    for _ in range(reps):
        gates.extend(qc.h(i) for i in range(n))
        gates.extend(qc.rz(i, 2.0 * x[i]) for i in range(n))
        for i in range(n):
            for j in range(i + 1, n):
                phi = 2.0 * (math.pi - x[i]) * (math.pi - x[j])
                gates += [qc.cnot(i, j), qc.rz(j, phi), qc.cnot(i, j)]
    return qc.Circuit(n, tuple(gates))


@dataclass(frozen=True)
class FeatureMapSpec:
    kind: str
    n_qubits: int
    reps: int = 2

    def __post_init__(self):
        if self.kind not in (AMPLITUDE, ZZ):
            raise ArgumentError(f"unknown feature map {self.kind!r}")
        qc._check_capacity(self.n_qubits)
        if self.kind == ZZ and self.reps < 1:
            raise ArgumentError(f"reps must be >= 1, got {self.reps}")

    def prepare(self, x):
        """Vector in the form the circuit builder expects (padded for amplitude)."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if self.kind == AMPLITUDE:
            return pad_and_normalize(x, self.n_qubits)
        if x.shape[0] != self.n_qubits:
            raise ShapeError(f"ZZ map on {self.n_qubits} qubits needs {self.n_qubits} features, got {x.shape[0]}")
        return x

    def circuit(self, x):
        x = self.prepare(x)
        if self.kind == AMPLITUDE:
            return amplitude_circuit(build_angle_tree(x))
        return zz_circuit(x, self.reps)

    def state(self, x):
        return qc.run_circuit(qc.zero_state(self.n_qubits), self.circuit(x))


class AngleScaler:
    """Affine per-dimension map of training features onto ``[0, pi]``.

    Test vectors go through the same map and are clamped to the range.
    Constant dimensions map to ``pi / 2``.
    """

    def __init__(self, low=0.0, high=math.pi):
        self.low = low
        self.high = high
        self.min_ = None
        self.max_ = None

    def fit(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self.min_ = X.min(axis=0)
        self.max_ = X.max(axis=0)
        return self

    def transform(self, X):
        if self.min_ is None:
            raise ArgumentError("AngleScaler used before fit")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        span = self.max_ - self.min_
        safe = np.where(span > 0, span, 1.0)
        unit = np.where(span > 0, (X - self.min_) / safe, 0.5)
        return self.low + (self.high - self.low) * np.clip(unit, 0.0, 1.0)

    def fit_transform(self, X):
        return self.fit(X).transform(X)
