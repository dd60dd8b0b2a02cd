"""Binary soft-margin SVM trained by SMO on a precomputed kernel.

The dual is solved in minimization form

    min_a  1/2 a^T Q a - sum(a),   Q_ij = y_i y_j K_ij,
    s.t.   0 <= a_i <= C,  sum(y_i a_i) = 0.

Each iteration picks the maximal violating index ``i`` (first choice,
lowest index on ties) and the partner ``j`` that maximizes the second-order
decrease of the objective (second choice), then solves the two-variable
subproblem in closed form.  Training stops once the KKT gap
``max_{I_up} -y G - min_{I_low} -y G`` drops below ``tol``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ConvergenceError, DegenerateLabelError, ShapeError

TAU = 1e-12
ALPHA_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    tol: float = 1e-3
    # Budget is max_passes * n pair updates.
    max_passes: int = 1000

    def __post_init__(self):
        if not self.C > 0:
            raise ArgumentError(f"C must be positive, got {self.C}")
        if not self.tol > 0:
            raise ArgumentError(f"tol must be positive, got {self.tol}")
        if self.max_passes < 1:
            raise ArgumentError(f"max_passes must be >= 1, got {self.max_passes}")


@dataclass(frozen=True)
class SvmModel:
    alphas: np.ndarray
    bias: float
    labels: np.ndarray
    C: float
    tol: float = 1e-3

    @property
    def support_indices(self):
        return np.flatnonzero(self.alphas > ALPHA_EPS)

    @property
    def n_train(self):
        return len(self.alphas)

    def dual_objective(self, K):
        """Dual objective ``sum(a) - 1/2 a^T Q a`` (maximization form)."""
        ay = self.alphas * self.labels
        return float(self.alphas.sum() - 0.5 * ay @ np.asarray(K) @ ay)

    def to_dict(self):
        return {
            "alphas": [float(a) for a in self.alphas],
            "bias": float(self.bias),
            "labels": [int(v) for v in self.labels],
            "C": float(self.C),
            "tol": float(self.tol),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            alphas=np.asarray(d["alphas"], dtype=float),
            bias=float(d["bias"]),
            labels=np.asarray(d["labels"], dtype=int),
            C=float(d["C"]),
            tol=float(d.get("tol", 1e-3)),
        )


def save_model(model, path):
    # json writes floats with repr(), which round-trips all 17 digits.
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        return SvmModel.from_dict(json.load(fh))


def _check_labels(labels, n):
    y = np.asarray(labels)
    if y.ndim != 1 or y.shape[0] != n:
        raise ShapeError(f"expected {n} labels, got shape {y.shape}")
    if not np.all(np.isin(y, (-1, 1))):
        raise ArgumentError("labels must be +1 or -1")
    if np.all(y == y[0]):
        raise DegenerateLabelError("training labels contain a single class")
    return y.astype(int)


def _bias(alphas, y, G, C):
    yg = -y * G
    free = (alphas > ALPHA_EPS) & (alphas < C - ALPHA_EPS)
    if np.any(free):
        return float(yg[free].mean())
    up, low = _up_low(alphas, y, C)
    return float(0.5 * (yg[up].max() + yg[low].min()))


def _up_low(alphas, y, C):
    below_c = alphas < C - ALPHA_EPS
    above_0 = alphas > ALPHA_EPS
    up = ((y == 1) & below_c) | ((y == -1) & above_0)
    low = ((y == 1) & above_0) | ((y == -1) & below_c)
    return up, low


def train(K, labels, cfg=TrainConfig()):
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ShapeError(f"kernel must be square, got shape {K.shape}")
    n = K.shape[0]
    y = _check_labels(labels, n)
    C = float(cfg.C)
    diag = np.diag(K).copy()

    alphas = np.zeros(n)
    G = -np.ones(n)  # gradient Q a - 1 at a = 0

    for _ in range(cfg.max_passes * n):
        up, low = _up_low(alphas, y, C)
        yg = -y * G
        if not up.any() or not low.any():
            break
        up_idx = np.flatnonzero(up)
        i = up_idx[np.argmax(yg[up_idx])]
        m_up = yg[i]
        low_idx = np.flatnonzero(low)
        M_low = yg[low_idx].min()
        if m_up - M_low < cfg.tol:
            break

        cand = low_idx[yg[low_idx] < m_up]
        b = m_up - yg[cand]
        a = diag[i] + diag[cand] - 2.0 * K[i, cand]
        a = np.where(a > 0, a, TAU)
        j = cand[np.argmin(-(b * b) / a)]

        # Move a_i by +y_i * d and a_j by -y_j * d; keeps sum(y a) fixed.
        curv = diag[i] + diag[j] - 2.0 * K[i, j]
        d = (yg[i] - yg[j]) / (curv if curv > 0 else TAU)
        d = min(d, C - alphas[i] if y[i] == 1 else alphas[i])
        d = min(d, alphas[j] if y[j] == 1 else C - alphas[j])
        if d <= 0:
            break
        alphas[i] += y[i] * d
        alphas[j] -= y[j] * d
        for t in (i, j):
            if alphas[t] < ALPHA_EPS:
                alphas[t] = 0.0
            elif alphas[t] > C - ALPHA_EPS:
                alphas[t] = C
        # dG = Q[:, i] y_i d - Q[:, j] y_j d = y * (K[:, i] - K[:, j]) d
        G += y * (K[:, i] - K[:, j]) * d
    else:
        best = SvmModel(alphas.copy(), _bias(alphas, y, G, C), y, C, cfg.tol)
        raise ConvergenceError(
            f"SMO did not reach KKT gap {cfg.tol} within {cfg.max_passes * n} updates", best
        )

    return SvmModel(alphas, _bias(alphas, y, G, C), y, C, cfg.tol)


def decision_value(model, k_row):
    k_row = np.asarray(k_row, dtype=float)
    if k_row.shape != (model.n_train,):
        raise ShapeError(f"kernel row must have {model.n_train} entries, got shape {k_row.shape}")
    return float((model.alphas * model.labels) @ k_row + model.bias)


def decision_function(model, K_test):
    """Decision values for every row of a test-vs-train kernel block."""
    return np.asarray(K_test, dtype=float) @ (model.alphas * model.labels) + model.bias


def predict(model, K_test):
    """Sign of the decision value per row; a value of exactly 0 maps to +1."""
    K_test = np.asarray(K_test, dtype=float)
    if K_test.size == 0:
        return []
    if K_test.ndim != 2 or K_test.shape[1] != model.n_train:
        raise ShapeError(f"test block must have {model.n_train} columns, got shape {K_test.shape}")
    f = decision_function(model, K_test)
    return [1 if v >= 0 else -1 for v in f]


def accuracy(predicted, gold):
    predicted, gold = list(predicted), list(gold)
    if len(predicted) != len(gold):
        raise ArgumentError(f"length mismatch: {len(predicted)} predictions, {len(gold)} labels")
    if not gold:
        raise ArgumentError("accuracy of an empty list is undefined")
    return sum(int(p == g) for p, g in zip(predicted, gold)) / len(gold)
