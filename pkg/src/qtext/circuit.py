"""Dense statevector simulation for small circuits.

Conventions
-----------
* Qubit 0 is the least-significant bit of a basis-state index, so the
  amplitude of ``|q_{n-1} ... q_1 q_0>`` lives at ``sum(q_k << k)``.
* Outcome strings are written most-significant qubit first, i.e. they read
  like the binary form of the basis index (``format(i, "0{n}b")``).
* ``RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`` and
  ``RZ(t) = diag(exp(-i t/2), exp(i t/2))``.
* Sampling uses numpy's PCG64 bit generator seeded with the given integer.
  Callers that need many independent streams derive seeds with
  :func:`derive_seed`, which spawns children of a ``SeedSequence``.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, CapacityError, QubitIndexError, ShapeError

MAX_QUBITS = 12
NORM_ATOL = 1e-9

H = "H"
X = "X"
RY = "RY"
RZ = "RZ"
CNOT = "CNOT"
CRY = "ControlledRY"

ROTATIONS = frozenset({RY, RZ, CRY})
GATE_KINDS = frozenset({H, X, RY, RZ, CNOT, CRY})

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_H_MAT = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)
_X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)


def ry_matrix(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz_matrix(theta):
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector over ``2**n_qubits`` basis states."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_capacity(self.n_qubits)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise ShapeError(
                f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ArgumentError(f"state is not normalized (squared norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple
    controls: tuple = ()
    angle: float = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ArgumentError(f"unsupported gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if len(self.targets) != 1:
            raise ArgumentError(f"{self.kind} acts on exactly one target")
        if self.kind in (CNOT,) and len(self.controls) != 1:
            raise ArgumentError("CNOT takes exactly one control")
        if self.kind == CRY and not self.controls:
            raise ArgumentError("ControlledRY needs at least one control")
        if self.kind in (H, X, RY, RZ) and self.controls:
            raise ArgumentError(f"{self.kind} takes no controls")
        if self.kind in ROTATIONS:
            if self.angle is None:
                raise ArgumentError(f"{self.kind} needs an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ArgumentError(f"{self.kind} takes no angle")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise QubitIndexError(f"{self.kind}: target and controls must be distinct, got {qubits}")
        if min(qubits) < 0:
            raise QubitIndexError(f"{self.kind}: negative qubit index in {qubits}")

    @property
    def qubits(self):
        return self.targets + self.controls

    def matrix(self):
        """2x2 matrix applied to the target when all controls are set."""
        if self.kind == H:
            return _H_MAT
        if self.kind in (X, CNOT):
            return _X_MAT
        if self.kind == RZ:
            return rz_matrix(self.angle)
        return ry_matrix(self.angle)

    def inverse(self):
        if self.kind in ROTATIONS:
            return Gate(self.kind, self.targets, self.controls, -self.angle)
        return self


def h(q):
    return Gate(H, (q,))


def x(q):
    return Gate(X, (q,))


def ry(q, theta):
    return Gate(RY, (q,), (), theta)


def rz(q, theta):
    return Gate(RZ, (q,), (), theta)


def cnot(control, target):
    return Gate(CNOT, (target,), (control,))


def cry(controls, target, theta):
    return Gate(CRY, (target,), tuple(controls), theta)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = ()

    def __post_init__(self):
        _check_capacity(self.n_qubits)
        gates = tuple(self.gates)
        for g in gates:
            _check_indices(g, self.n_qubits)
        object.__setattr__(self, "gates", gates)

    def __len__(self):
        return len(self.gates)

    def __add__(self, other):
        if other.n_qubits != self.n_qubits:
            raise ShapeError(f"cannot join {self.n_qubits}- and {other.n_qubits}-qubit circuits")
        return Circuit(self.n_qubits, self.gates + other.gates)


def _check_capacity(n_qubits):
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"qubit count must be in 1..{MAX_QUBITS}, got {n_qubits!r}")


def _check_indices(gate, n_qubits):
    bad = [q for q in gate.qubits if q >= n_qubits]
    if bad:
        raise QubitIndexError(f"{gate.kind} uses qubit(s) {bad} on a {n_qubits}-qubit register")


def zero_state(n_qubits):
    _check_capacity(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0
    return QuantumState(n_qubits, amps)


@lru_cache(maxsize=4096)
def _pair_indices(n_qubits, target, controls):
    # Index pairs (i0, i1) differing only in the target bit, restricted to
    # basis states where every control bit is 1.
    idx = np.arange(1 << n_qubits)
    mask = (idx >> target) & 1 == 0
    for c in controls:
        mask &= (idx >> c) & 1 == 1
    i0 = idx[mask]
    i1 = i0 | (1 << target)
    i0.setflags(write=False)
    i1.setflags(write=False)
    return i0, i1


def _apply_inplace(amps, n_qubits, gate):
    i0, i1 = _pair_indices(n_qubits, gate.targets[0], gate.controls)
    m = gate.matrix()
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = m[0, 0] * a0 + m[0, 1] * a1
    amps[i1] = m[1, 0] * a0 + m[1, 1] * a1


def _state_from_trusted(n_qubits, amps):
    # Skips the normalization check for amplitudes produced by unitary updates.
    state = object.__new__(QuantumState)
    amps.setflags(write=False)
    object.__setattr__(state, "n_qubits", n_qubits)
    object.__setattr__(state, "amplitudes", amps)
    return state


def apply_gate(state, gate):
    """Return ``gate`` applied to ``state`` as a new state."""
    _check_indices(gate, state.n_qubits)
    amps = state.amplitudes.copy()
    _apply_inplace(amps, state.n_qubits, gate)
    return _state_from_trusted(state.n_qubits, amps)


def run_circuit(state, circuit):
    """Apply the gates of ``circuit`` to ``state`` in list order."""
    if circuit.n_qubits != state.n_qubits:
        raise ShapeError(
            f"circuit has {circuit.n_qubits} qubits but state has {state.n_qubits}"
        )
    amps = state.amplitudes.copy()
    for g in circuit.gates:
        _apply_inplace(amps, state.n_qubits, g)
    return _state_from_trusted(state.n_qubits, amps)


def adjoint(circuit):
    """Inverse circuit: reversed gate order with every rotation angle negated."""
    return Circuit(circuit.n_qubits, tuple(g.inverse() for g in reversed(circuit.gates)))


def unitary(circuit):
    """Dense ``2**n x 2**n`` matrix of ``circuit`` (column k = image of basis state k)."""
    dim = 1 << circuit.n_qubits
    cols = np.eye(dim, dtype=complex)
    for k in range(dim):
        for g in circuit.gates:
            _apply_inplace(cols[:, k], circuit.n_qubits, g)
    return cols


@dataclass(frozen=True)
class MeasurementCounts:
    shots: int
    counts: dict

    def get(self, outcome, default=0):
        return self.counts.get(outcome, default)


def sample_counts(state, shots, seed):
    """Measure every qubit ``shots`` times; outcomes drawn i.i.d. from ``|a_i|^2``."""
    if int(shots) < 1:
        raise ArgumentError(f"shots must be >= 1, got {shots}")
    shots = int(shots)
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    hist = rng.multinomial(shots, probs)
    width = state.n_qubits
    counts = {format(i, f"0{width}b"): int(c) for i, c in enumerate(hist) if c}
    return MeasurementCounts(shots, counts)


def zero_probability(state):
    a0 = state.amplitudes[0]
    return min(1.0, float(a0.real * a0.real + a0.imag * a0.imag))


def derive_seed(master_seed, *key):
    """64-bit seed for the stream identified by ``key`` under ``master_seed``.

    Uses ``SeedSequence(master_seed, spawn_key=key)`` so streams for distinct
    keys are independent and the result does not depend on evaluation order.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)
