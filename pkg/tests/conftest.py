import math
import os
from pathlib import Path

import numpy as np
import pytest

from qtext import circuit as qc

ACCEPTANCE_LINES = []


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return qc.QuantumState(n, v / np.linalg.norm(v))


def random_gate(rng, n):
    kinds = [qc.H, qc.X, qc.RY, qc.RZ]
    if n >= 2:
        kinds += [qc.CNOT, qc.CRY]
    kind = kinds[rng.integers(len(kinds))]
    theta = float(rng.uniform(-2 * math.pi, 2 * math.pi))
    if kind in (qc.H, qc.X):
        return qc.Gate(kind, (int(rng.integers(n)),))
    if kind in (qc.RY, qc.RZ):
        return qc.Gate(kind, (int(rng.integers(n)),), (), theta)
    qubits = [int(q) for q in rng.permutation(n)]
    if kind == qc.CNOT:
        return qc.cnot(qubits[0], qubits[1])
    n_controls = int(rng.integers(1, n))
    return qc.cry(qubits[1 : 1 + n_controls], qubits[0], theta)


def random_circuit(rng, n, n_gates):
    return qc.Circuit(n, tuple(random_gate(rng, n) for _ in range(n_gates)))


def random_unit(rng, dim):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20221208)


@pytest.fixture(scope="session")
def imdb_root(tmp_path_factory):
    """The IMDB reviews exported from the movie-reviews package (cached per session)."""
    pytest.importorskip("movie_reviews", reason="movie-reviews package not installed")
    from qtext.text.sources import export_imdb

    root = Path(os.environ.get("QTEXT_IMDB_CACHE", tmp_path_factory.mktemp("imdb")))
    export_imdb(root)
    return root


def record_acceptance(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def qp_oracle(K, y, C):
    """Dense QP solve of the SVM dual with cvxopt; returns ``(alphas, bias)``."""
    pytest.importorskip("cvxopt")
    from cvxopt import matrix, solvers

    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    P = matrix(np.outer(y, y) * K)
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.r_[np.zeros(n), np.full(n, C)])
    A = matrix(y.reshape(1, -1))
    b = matrix(0.0)
    opts = {"show_progress": False, "abstol": 1e-12, "reltol": 1e-12, "feastol": 1e-12, "maxiters": 200}
    sol = solvers.qp(P, q, G, h, A, b, options=opts)
    a = np.clip(np.array(sol["x"]).ravel(), 0.0, C)
    # Interior-point iterates never land exactly on a bound; snap them so
    # the bound sets that define the bias interval are not polluted.
    a[a < 1e-6 * C] = 0.0
    a[a > C * (1 - 1e-6)] = C
    yg = y - K @ (a * y)
    free = (a > 0) & (a < C)
    if free.any():
        bias = float(yg[free].mean())
    else:
        up = ((y > 0) & (a < C)) | ((y < 0) & (a > 0))
        low = ((y > 0) & (a > 0)) | ((y < 0) & (a < C))
        bias = float(0.5 * (yg[up].max() + yg[low].min()))
    return a, bias


def dual_objective(alphas, K, y):
    ay = np.asarray(alphas) * np.asarray(y)
    return float(np.sum(alphas) - 0.5 * ay @ np.asarray(K) @ ay)


def svm_instance(rng, n, kind):
    """Random labeled points with a linear or RBF Gram; about half separable."""
    X = rng.normal(size=(n, 2))
    w = rng.normal(size=2)
    y = np.where(X @ w + 0.1 * rng.normal(size=n) >= 0, 1, -1)
    if np.all(y == y[0]):
        y[0] = -y[0]
    Xt = rng.normal(size=(10, 2))
    if kind == "linear":
        return X @ X.T, y, Xt @ X.T
    sq = lambda A, B: ((A[:, None, :] - B[None, :, :]) ** 2).sum(-1)
    return np.exp(-0.5 * sq(X, X)), y, np.exp(-0.5 * sq(Xt, X))
