"""Dense statevector simulator.

States are complex amplitude vectors of length 2**q stored big-endian:
qubit 0 corresponds to the most significant bit of the amplitude index, so
the first factor of a tensor product occupies the high-order bits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, UsageError

DEFAULT_MAX_QUBITS = 12

_NORM_ATOL = 1e-10

_AXES = ("x", "y", "z")


def max_qubits() -> int:
    """Return the qubit ceiling, honoring the DQGNN_MAX_QUBITS override."""
    raw = os.environ.get("DQGNN_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"DQGNN_MAX_QUBITS must be an integer, got {raw!r}")
    if value < 1:
        raise UsageError(f"DQGNN_MAX_QUBITS must be positive, got {value}")
    return value


def _check_capacity(qubits: int, limit: int | None = None) -> None:
    ceiling = max_qubits() if limit is None else limit
    if qubits > ceiling:
        raise CapacityError(
            f"state of {qubits} qubits exceeds the limit of {ceiling} qubits"
        )


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Immutable normalized statevector over ``qubit_count`` qubits."""

    amplitudes: np.ndarray
    qubit_count: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.qubit_count < 1:
            raise UsageError(f"qubit_count must be >= 1, got {self.qubit_count}")
        if amps.ndim != 1 or amps.shape[0] != 2**self.qubit_count:
            raise UsageError(
                f"expected {2**self.qubit_count} amplitudes for "
                f"{self.qubit_count} qubits, got shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_ATOL:
            raise UsageError(f"state is not normalized: |amplitudes| = {norm!r}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "QuantumState":
        amps = np.asarray(amplitudes, dtype=np.complex128)
        size = amps.shape[0] if amps.ndim == 1 else 0
        count = int(size).bit_length() - 1
        if size < 2 or 2**count != size:
            raise UsageError(
                f"amplitude vector length must be a power of two >= 2, got {size}"
            )
        return cls(amps, count)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class RotationGate:
    """Single-qubit rotation about the x, y or z axis."""

    axis: str
    angle: float
    target_qubit: int

    def __post_init__(self):
        if self.axis not in _AXES:
            raise UsageError(f"axis must be one of {_AXES}, got {self.axis!r}")
        if self.target_qubit < 0:
            raise UsageError(f"target_qubit must be >= 0, got {self.target_qubit}")


@dataclass(frozen=True)
class CnotGate:
    """Controlled-NOT between two distinct qubits."""

    control_qubit: int
    target_qubit: int

    def __post_init__(self):
        if self.control_qubit < 0 or self.target_qubit < 0:
            raise UsageError("qubit indices must be >= 0")
        if self.control_qubit == self.target_qubit:
            raise UsageError(
                f"control and target must differ, both are {self.control_qubit}"
            )


def rotation_matrix(axis: str, angle: float) -> np.ndarray:
    """Return the 2x2 unitary for a rotation of ``angle`` about ``axis``."""
    half = angle / 2.0
    c, s = np.cos(half), np.sin(half)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if axis == "z":
        return np.array(
            [[np.exp(-1j * half), 0.0], [0.0, np.exp(1j * half)]],
            dtype=np.complex128,
        )
    raise UsageError(f"axis must be one of {_AXES}, got {axis!r}")


def zero_state(qubits: int, limit: int | None = None) -> QuantumState:
    """Return |0...0> on ``qubits`` qubits, enforcing the qubit ceiling."""
    if qubits < 1:
        raise UsageError(f"qubits must be >= 1, got {qubits}")
    _check_capacity(qubits, limit)
    amps = np.zeros(2**qubits, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(amps, qubits)


def apply_rotation(state: QuantumState, gate: RotationGate) -> QuantumState:
    """Apply a single-qubit rotation to ``state``."""
    q = state.qubit_count
    if gate.target_qubit >= q:
        raise UsageError(
            f"target qubit {gate.target_qubit} out of range for {q} qubits"
        )
    matrix = rotation_matrix(gate.axis, gate.angle)
    tensor = state.amplitudes.reshape((2,) * q)
    # Contract the gate with the target axis, then restore axis order.
    moved = np.tensordot(matrix, tensor, axes=(1, gate.target_qubit))
    result = np.moveaxis(moved, 0, gate.target_qubit)
    return QuantumState(result.reshape(-1), q)


@lru_cache(maxsize=256)
def _cnot_permutation(qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(2**qubits)
    control_bit = 1 << (qubits - 1 - control)
    target_bit = 1 << (qubits - 1 - target)
    return np.where(idx & control_bit, idx ^ target_bit, idx)


def apply_cnot(state: QuantumState, gate: CnotGate) -> QuantumState:
    """Apply a CNOT to ``state``: flips target where control is 1."""
    q = state.qubit_count
    if gate.control_qubit >= q or gate.target_qubit >= q:
        raise UsageError(
            f"cnot({gate.control_qubit}, {gate.target_qubit}) out of range "
            f"for {q} qubits"
        )
    perm = _cnot_permutation(q, gate.control_qubit, gate.target_qubit)
    return QuantumState(state.amplitudes[perm], q)


def tensor_product(a: QuantumState, b: QuantumState,
                   limit: int | None = None) -> QuantumState:
    """Return the joint state with ``a`` in the high-order qubit positions."""
    combined = a.qubit_count + b.qubit_count
    _check_capacity(combined, limit)
    return QuantumState(np.kron(a.amplitudes, b.amplitudes), combined)


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """Return <a|b>; requires matching qubit counts."""
    if a.qubit_count != b.qubit_count:
        raise UsageError(
            f"qubit counts differ: {a.qubit_count} vs {b.qubit_count}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def measurement_entropy(state: QuantumState) -> float:
    """Shannon entropy in bits of the computational-basis distribution.

    Terms with zero probability contribute nothing; the result lies in
    [0, qubit_count] up to floating-point round-off.
    """
    probs = state.probabilities()
    probs = probs[probs > 0.0]
    entropy = float(-np.sum(probs * np.log2(probs)))
    return max(entropy, 0.0)


def random_state(qubits: int, rng: np.random.Generator) -> QuantumState:
    """Return a Haar-ish random state; test helper."""
    raw = rng.standard_normal(2**qubits) + 1j * rng.standard_normal(2**qubits)
    return QuantumState(raw / np.linalg.norm(raw), qubits)
