"""Qubit-circuit simulation running entirely in probability space.

An n-qubit register is a length-4**n probability vector over the product of
tetrahedral SIC frames; every qubit occupies one 2-bit chunk. Gates act as
pseudostochastic matrices on one or two chunks, and computational-basis
read-out compresses each measured chunk to a single bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import frames as frames_mod
from . import states
from .channels import KrausChannel, PseudoStochasticMap, kraus_to_map
from .errors import (
    DimensionMismatch,
    TargetOutOfRange,
    ValidationError,
)
from .frames import build_sic_qubit
from .linalg import check_unitary

_QUBIT_FRAME = None
_TWO_QUBIT_FRAME = None


def qubit_frame():
    """The fixed single-qubit SIC frame all circuits use (cached)."""
    global _QUBIT_FRAME
    if _QUBIT_FRAME is None:
        _QUBIT_FRAME = build_sic_qubit()
    return _QUBIT_FRAME


def two_qubit_frame():
    """Product frame for one pair of qubits (cached)."""
    global _TWO_QUBIT_FRAME
    if _TWO_QUBIT_FRAME is None:
        _TWO_QUBIT_FRAME = frames_mod.tensor(qubit_frame(), qubit_frame())
    return _TWO_QUBIT_FRAME


GATE_UNITARIES = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                   dtype=complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                     dtype=complex),
    "iswap": np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]],
                      dtype=complex),
}


def zero_state_vector():
    """Single-qubit chunk for |0>: [(3+sqrt3)/12, (3+sqrt3)/12, (3-sqrt3)/12, (3-sqrt3)/12]."""
    r3 = np.sqrt(3.0)
    return np.array([3 + r3, 3 + r3, 3 - r3, 3 - r3]) / 12.0


@dataclass(frozen=True)
class QubitRegister:
    """Probability vector of an n-qubit register over the product SIC frame."""

    n: int
    p: np.ndarray


def init_register(n):
    """Register for |0...0>: the n-fold tensor power of the |0> chunk."""
    if n < 1:
        raise ValidationError("register needs at least one qubit")
    p = zero_state_vector()
    out = p
    for _ in range(n - 1):
        out = np.kron(out, p)
    return QubitRegister(n, out)


def single_qubit_map(unitary, tol=1e-9):
    """Gate map S(U) = 3 s(U) - 2 J with s_ij = 2 Tr(E_i U E_j U^dag).

    The affine pieces s(U) and J are individually bistochastic; the result
    equals the generic channel conversion of U over the SIC frame.
    """
    u = check_unitary(unitary, tol=tol, what="gate")
    if u.shape != (2, 2):
        raise DimensionMismatch(f"single-qubit gate must be 2x2, got {u.shape}")
    frame = qubit_frame()
    s = 2 * np.einsum("iab,bc,jcd,ad->ij", frame.effects, u, frame.effects,
                      u.conj()).real
    return PseudoStochasticMap(frame, frame, 3 * s - 2 * np.full((4, 4), 0.25))


def two_qubit_map(unitary, tol=1e-9):
    """Gate map S(U) = 9 s_I - 12 s_II + 4 J for a two-qubit unitary.

    s_I uses products of effect pairs, s_II the half-traced combinations
    E_k x I/2 + I/2 x E_l; all three pieces are bistochastic.
    """
    u = check_unitary(unitary, tol=tol, what="gate")
    if u.shape != (4, 4):
        raise DimensionMismatch(f"two-qubit gate must be 4x4, got {u.shape}")
    frame = two_qubit_frame()
    ep = frame.effects
    s1 = 4 * np.einsum("pab,bc,qcd,ad->pq", ep, u, ep, u.conj()).real
    single = qubit_frame().effects
    half = np.eye(2, dtype=complex) / 2
    mixed = (np.einsum("kij,ab->kiajb", single, half).reshape(4, 4, 4)[:, None, :, :]
             + np.einsum("ij,kab->kiajb", half, single).reshape(4, 4, 4)[None, :, :, :])
    mixed = mixed.reshape(16, 4, 4)
    s2 = np.einsum("pab,bc,qcd,ad->pq", ep, u, mixed, u.conj()).real
    return PseudoStochasticMap(frame, frame,
                               9 * s1 - 12 * s2 + 4 * np.full((16, 16), 1 / 16))


def gate_map(name_or_unitary, tol=1e-9):
    """Gate map from a library name or an explicit 2x2 / 4x4 unitary."""
    if isinstance(name_or_unitary, str):
        name = name_or_unitary.lower()
        if name not in GATE_UNITARIES:
            raise ValidationError(f"unknown gate {name!r}; library has "
                                  f"{sorted(GATE_UNITARIES)}")
        u = GATE_UNITARIES[name]
    else:
        u = np.asarray(name_or_unitary, dtype=complex)
    if u.shape == (2, 2):
        return single_qubit_map(u, tol=tol)
    if u.shape == (4, 4):
        return two_qubit_map(u, tol=tol)
    raise DimensionMismatch(f"gates must be 2x2 or 4x4 unitaries, got {u.shape}")


def gate_library():
    """All named gate maps, built from their standard unitaries."""
    return {name: gate_map(name) for name in GATE_UNITARIES}


def projective_measure_map():
    """2x4 read-out matrix for one qubit: rows are outcomes 0 and 1.

    Entries are (1 +/- 1/sqrt(3))/2 arranged as 3 m - 2 J with m stochastic.
    """
    r = 1.0 / np.sqrt(3.0)
    m = 0.5 * np.array([[1 + r, 1 + r, 1 - r, 1 - r],
                        [1 - r, 1 - r, 1 + r, 1 + r]])
    return 3 * m - 2 * np.full((2, 4), 0.5)


def _check_targets(targets, n, width):
    targets = tuple(int(t) for t in targets)
    if len(targets) != width:
        raise TargetOutOfRange(f"expected {width} targets, got {targets}")
    if len(set(targets)) != len(targets):
        raise TargetOutOfRange(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise TargetOutOfRange(f"target {t} out of range for {n} qubits")
    return targets


def _apply(p, matrix, targets, n):
    """Chunk-structured application of a 1- or 2-chunk map to a flat register."""
    shape = [4] * n
    k = len(targets)
    tensor = np.asarray(p).reshape(shape)
    out_total = matrix.shape[0]
    size_out = {1: out_total, 2: int(round(np.sqrt(out_total)))}[k]
    m = matrix.reshape((size_out,) * k + (4,) * k)
    moved = np.tensordot(m, tensor, axes=(tuple(range(k, 2 * k)), targets))
    # axes now: [out_0..out_{k-1}, untouched axes in original relative order]
    remaining = [q for q in range(n) if q not in targets]
    current = list(targets) + remaining
    perm = [current.index(q) for q in range(n)]
    return np.transpose(moved, perm).reshape(-1)


def embed(gate, targets, n, tol=1e-9):
    """Full 4**n x 4**n matrix of a gate map acting on the given targets.

    Kronecker embedding with identity chunks; non-adjacent or reversed
    two-qubit targets are handled by permuting chunk indices, which is itself
    a nonnegative permutation map. Intended for small n; circuit execution
    uses chunk-structured application instead.
    """
    matrix = gate.matrix if isinstance(gate, PseudoStochasticMap) else np.asarray(gate)
    k = {16: 2, 4: 1}.get(matrix.shape[0])
    if k is None or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"embed expects a 4x4 or 16x16 map, got {matrix.shape}")
    targets = _check_targets(targets, n, k)
    full = np.kron(matrix, np.eye(4 ** (n - k)))
    order = list(targets) + [q for q in range(n) if q not in targets]
    inv = [order.index(q) for q in range(n)]
    tensor = full.reshape((4,) * (2 * n))
    perm = inv + [n + i for i in inv]
    return np.transpose(tensor, perm).reshape(4 ** n, 4 ** n)


@dataclass(frozen=True)
class GateOp:
    targets: tuple
    name: Optional[str] = None
    unitary: Optional[np.ndarray] = None

    def label(self):
        return self.name if self.name else f"u{len(self.targets)}"


@dataclass(frozen=True)
class MeasureOp:
    targets: tuple

    def label(self):
        return "measure"


@dataclass(frozen=True)
class CircuitProgram:
    """Gate and measurement sequence on an n-qubit register.

    Measurements are terminal read-outs: a gate may not follow a measurement
    on the same qubit.
    """

    n: int
    ops: tuple

    def __post_init__(self):
        measured = set()
        for op in self.ops:
            if isinstance(op, GateOp):
                width = 2 if (op.name in ("cz", "cx", "swap", "iswap")
                              or (op.unitary is not None
                                  and np.asarray(op.unitary).shape == (4, 4))) else 1
                targets = _check_targets(op.targets, self.n, width)
                overlap = measured.intersection(targets)
                if overlap:
                    raise ValidationError(
                        f"gate on already measured qubit(s) {sorted(overlap)}; "
                        "measurements are terminal")
            elif isinstance(op, MeasureOp):
                for t in op.targets:
                    if not 0 <= int(t) < self.n:
                        raise TargetOutOfRange(f"measure target {t} out of range")
                measured.update(int(t) for t in op.targets)
            else:
                raise ValidationError(f"unknown instruction {op!r}")

    def measured_qubits(self):
        out = sorted({int(t) for op in self.ops if isinstance(op, MeasureOp)
                      for t in op.targets})
        return tuple(out)


@dataclass(frozen=True)
class MeasurementRecord:
    """Joint outcome distribution over the measured qubits (ascending order)."""

    measured_qubits: tuple
    probabilities: np.ndarray
    counts: Optional[dict] = None
    seed: Optional[int] = None

    def bitstrings(self):
        k = len(self.measured_qubits)
        return ["".join(bits) for bits in itertools.product("01", repeat=k)]

    def as_dict(self):
        return dict(zip(self.bitstrings(), self.probabilities))


def run(program, return_trace=False):
    """Execute a program; returns the final register and the read-out record.

    The register returned is the pre-measurement probability vector; the
    record holds genuine (nonnegative) outcome probabilities over the
    measured qubits, which match Born statistics of the equivalent
    statevector computation.
    """
    n = program.n
    p = init_register(n).p
    trace = [("init", p.copy())] if return_trace else None
    for op in program.ops:
        if isinstance(op, GateOp):
            smap = gate_map(op.name if op.name else op.unitary)
            p = _apply(p, smap.matrix, tuple(op.targets), n)
            if return_trace:
                trace.append((op.label(), p.copy()))
    final = QubitRegister(n, p)
    measured = program.measured_qubits()
    mpr = projective_measure_map()
    q = p
    if measured:
        for qubit in measured:
            q = _apply_readout(q, mpr, qubit, n, measured)
    probs = _collapse_unmeasured(q, n, measured)
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValidationError(f"outcome probabilities sum to {total!r}")
    probs = probs / total
    record = MeasurementRecord(tuple(measured), probs)
    if return_trace:
        trace.append(("measure", probs.copy()))
        return final, record, trace
    return final, record


def _apply_readout(p, mpr, qubit, n, measured):
    # measured axes shrink to size 2; track mixed shapes by flattening lazily
    shape = [2 if (q in measured and q < qubit) else 4 for q in range(n)]
    tensor = np.asarray(p).reshape(shape)
    moved = np.tensordot(mpr, tensor, axes=([1], [qubit]))
    moved = np.moveaxis(moved, 0, qubit)
    return moved.reshape(-1)


def _collapse_unmeasured(q, n, measured):
    shape = [2 if qb in measured else 4 for qb in range(n)]
    tensor = np.asarray(q).reshape(shape)
    axes = tuple(qb for qb in range(n) if qb not in measured)
    if axes:
        tensor = tensor.sum(axis=axes)
    return tensor.reshape(-1)


def sample(record, shots, rng):
    """Multinomial sampling of the read-out distribution; deterministic per rng."""
    if shots < 1:
        raise ValidationError("shots must be >= 1")
    draws = rng.multinomial(int(shots), record.probabilities)
    return {b: int(c) for b, c in zip(record.bitstrings(), draws) if c > 0}


def oracle_unitary(marked):
    """Diagonal +-1 unitary flipping the phase of one computational basis state."""
    bits = str(marked)
    if set(bits) - {"0", "1"}:
        raise ValidationError(f"marked string must be binary, got {marked!r}")
    dim = 2 ** len(bits)
    diag = np.ones(dim)
    diag[int(bits, 2)] = -1.0
    return np.diag(diag).astype(complex)


def diffusion_unitary(n):
    """Inversion about the mean, 2|s><s| - I over n qubits."""
    dim = 2 ** n
    return (2.0 / dim) * np.ones((dim, dim), dtype=complex) - np.eye(dim)


def grover_program(marked):
    """Two-qubit Grover search finding the marked string with one query."""
    if len(str(marked)) != 2:
        raise ValidationError("the single-query construction is for 2 qubits")
    return CircuitProgram(2, (
        GateOp((0,), name="h"),
        GateOp((1,), name="h"),
        GateOp((0, 1), unitary=oracle_unitary(marked)),
        GateOp((0, 1), unitary=diffusion_unitary(2)),
        MeasureOp((0, 1)),
    ))


def register_frame(n):
    """Product frame of a small register (cost grows as 16**n; debug use)."""
    frame = qubit_frame()
    out = frame
    for _ in range(n - 1):
        out = frames_mod.tensor(out, frame)
    return out


def check_register_physical(reg, tol=1e-9):
    """Debug assertion that a register vector lies in the product-frame qplex."""
    if reg.n > 3:
        raise ValidationError("physicality assertion supported for n <= 3 only")
    frame = register_frame(reg.n)
    pv = states.ProbVector(frame, reg.p)
    return states.is_physical(pv, tol=tol)
