"""Dense statevector simulation for few-qubit circuits.

Qubit ordering is little-endian: qubit 0 is the least-significant bit of the
basis-state index, so on two qubits ``|q1 q0>`` maps to index ``2*q1 + q0``.

Single states are handled through :class:`StateVector`; the hot paths
(feature maps over whole datasets, kernel rows, VQC batches) go through
:func:`run_batch`, which applies one gate program to many states at once with
optionally per-row angles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ._backend import kernels

MAX_QUBITS = 20
GATE_KINDS = ("H", "RY", "RZ", "PHASE", "CX")
_ROTATIONS = ("RY", "RZ", "PHASE")


class SimulationError(ValueError):
    """Base class for simulator input errors."""


class QubitCountError(SimulationError):
    pass


class QubitIndexError(SimulationError, IndexError):
    pass


class ArityError(SimulationError):
    pass


class UnboundParameterError(SimulationError):
    pass


class DimensionError(SimulationError):
    pass


@dataclass(frozen=True)
class Parameter:
    """Symbolic angle slot ``index`` of a parameterized circuit."""

    index: int


Angle = Union[float, Parameter]


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    control: int | None = None
    angle: Angle | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CX":
            if self.control is None:
                raise ValueError("CX needs a control qubit")
            if self.control == self.target:
                raise QubitIndexError("CX control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")
        if self.kind in _ROTATIONS and self.angle is None:
            raise ValueError(f"{self.kind} needs an angle")

    @property
    def is_bound(self) -> bool:
        return not isinstance(self.angle, Parameter)

    def qubits(self) -> tuple[int, ...]:
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)

    def matrix(self) -> np.ndarray:
        """Unitary of the gate on its own qubits (control is the low bit for CX)."""
        if not self.is_bound:
            raise UnboundParameterError("gate has a free parameter")
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
        if self.kind == "RY":
            c, s = np.cos(self.angle / 2), np.sin(self.angle / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.kind == "RZ":
            return np.diag([np.exp(-0.5j * self.angle), np.exp(0.5j * self.angle)])
        if self.kind == "PHASE":
            return np.diag([1.0, np.exp(1j * self.angle)]).astype(complex)
        # basis |t c>: flips t when c = 1
        return np.array(
            [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
        )


def H(target: int) -> Gate:
    return Gate("H", target)


def RY(target: int, angle: Angle) -> Gate:
    return Gate("RY", target, angle=angle)


def RZ(target: int, angle: Angle) -> Gate:
    return Gate("RZ", target, angle=angle)


def PHASE(target: int, angle: Angle) -> Gate:
    return Gate("PHASE", target, angle=angle)


def CX(control: int, target: int) -> Gate:
    return Gate("CX", target, control=control)


@dataclass(frozen=True)
class StateVector:
    """Immutable normalized amplitude vector over ``2**num_qubits`` basis states."""

    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise QubitCountError(f"num_qubits must be in [1, {MAX_QUBITS}]")
        if amps.size != 1 << self.num_qubits:
            raise DimensionError(
                f"expected {1 << self.num_qubits} amplitudes, got {amps.size}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-10:
            raise SimulationError(f"state is not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or 1 << n != amps.size:
            raise DimensionError("amplitude count must be a power of two >= 2")
        return cls(n, amps)

    def __len__(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class ParameterizedCircuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    num_parameters: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        slots = set()
        for g in self.gates:
            for q in g.qubits():
                if not 0 <= q < self.num_qubits:
                    raise QubitIndexError(
                        f"qubit {q} out of range for {self.num_qubits} qubits"
                    )
            if isinstance(g.angle, Parameter):
                slots.add(g.angle.index)
        if slots and slots != set(range(self.num_parameters)):
            raise ValueError("parameter slots must be dense 0..num_parameters-1")
        if not slots and self.num_parameters:
            raise ValueError("num_parameters set but the circuit has no slots")

    @property
    def is_bound(self) -> bool:
        return all(g.is_bound for g in self.gates)

    def bind(self, params: Sequence[float]) -> "ParameterizedCircuit":
        params = np.asarray(params, dtype=float).reshape(-1)
        if params.size != self.num_parameters:
            raise ArityError(
                f"expected {self.num_parameters} parameters, got {params.size}"
            )
        gates = [
            Gate(g.kind, g.target, g.control, float(params[g.angle.index]))
            if isinstance(g.angle, Parameter)
            else g
            for g in self.gates
        ]
        return ParameterizedCircuit(self.num_qubits, gates)

    def __len__(self) -> int:
        return len(self.gates)


def zero_state(num_qubits: int) -> StateVector:
    if not isinstance(num_qubits, (int, np.integer)) or not 1 <= num_qubits <= MAX_QUBITS:
        raise QubitCountError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(num_qubits), amps)


def _apply_ops(states: np.ndarray, ops, n_rows: int) -> None:
    """Apply ``(kind, target, control, angles)`` ops in place to ``states``."""
    for kind, target, control, angles in ops:
        if kind == "H":
            kernels.h(states, target)
        elif kind == "CX":
            kernels.cx(states, control, target)
        else:
            a = np.asarray(angles, dtype=np.float64)
            if a.ndim == 0:
                a = np.full(n_rows, float(a))
            else:
                a = np.ascontiguousarray(a)
            getattr(kernels, kind.lower())(states, target, a)


def run_batch(states: np.ndarray, ops) -> np.ndarray:
    """Apply a gate program to a ``(batch, 2**n)`` array and return a new array.

    ``ops`` is an iterable of ``(kind, target, control, angles)`` where
    ``angles`` is a scalar (shared by every row), a ``(batch,)`` array, or
    ``None`` for H/CX.
    """
    out = np.array(states, dtype=np.complex128, order="C", copy=True)
    if out.ndim != 2:
        raise DimensionError("batch must be a 2-D array")
    _apply_ops(out, ops, out.shape[0])
    return out


def circuit_ops(circuit: ParameterizedCircuit):
    if not circuit.is_bound:
        raise UnboundParameterError("circuit has free parameter slots")
    return [(g.kind, g.target, g.control, g.angle) for g in circuit.gates]


def _check_gate(num_qubits: int, gate: Gate) -> None:
    for q in gate.qubits():
        if not 0 <= q < num_qubits:
            raise QubitIndexError(f"qubit {q} out of range for {num_qubits} qubits")
    if not gate.is_bound:
        raise UnboundParameterError("cannot apply a gate with a free parameter")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    _check_gate(state.num_qubits, gate)
    out = run_batch(state.amplitudes[None, :], [(gate.kind, gate.target, gate.control, gate.angle)])
    return StateVector(state.num_qubits, out[0])


def apply_circuit(
    state: StateVector, circuit: ParameterizedCircuit, params: Sequence[float] = ()
) -> StateVector:
    if circuit.num_qubits != state.num_qubits:
        raise DimensionError("circuit and state qubit counts differ")
    bound = circuit.bind(params)
    out = run_batch(state.amplitudes[None, :], circuit_ops(bound))
    return StateVector(state.num_qubits, out[0])


def inverse_circuit(circuit: ParameterizedCircuit) -> ParameterizedCircuit:
    """Adjoint circuit: gates reversed, rotation and phase angles negated."""
    if not circuit.is_bound:
        raise UnboundParameterError("only fully bound circuits can be inverted")
    gates = [
        Gate(g.kind, g.target, g.control, -g.angle) if g.kind in _ROTATIONS else g
        for g in reversed(circuit.gates)
    ]
    return ParameterizedCircuit(circuit.num_qubits, gates)


def inverse_ops(ops):
    return [
        (k, t, c, -np.asarray(a) if k in _ROTATIONS else a) for k, t, c, a in reversed(ops)
    ]


def inner_product(a: StateVector, b: StateVector) -> complex:
    if a.num_qubits != b.num_qubits:
        raise DimensionError("states have different qubit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def zero_batch(num_qubits: int, batch: int) -> np.ndarray:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise QubitCountError(f"num_qubits must be in [1, {MAX_QUBITS}]")
    states = np.zeros((batch, 1 << num_qubits), dtype=np.complex128)
    states[:, 0] = 1.0
    return states
