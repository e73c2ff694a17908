"""Generators of quantum dynamics in probability space.

Unitary evolution becomes a real matrix with zero column sums acting on
probability vectors; adding a dissipator built from noise operators gives the
full Markovian generator. The module also provides the Hamiltonian-sector
projector, a complete-positivity test for generators that never leaves
probability space, and the closed-form single-qubit channel matrices used as
reference fixtures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import frames as frames_mod
from . import states
from .channels import PseudoStochasticMap, maximally_entangled_state
from .errors import (
    DimensionMismatch,
    NotGeneratorShaped,
    NotHermitian,
    ShapeMismatch,
    ValidationError,
)
from .frames import MicPovmFrame
from .linalg import PAULI, check_hermitian, dagger, traceless_hermitian_basis
from .measurements import MeasurementMap
from .states import ProbVector

COLUMN_SUM_TOL = 1e-8


@dataclass(frozen=True)
class GeneratorMatrix:
    """Real d**2 x d**2 matrix with zero column sums over a frame."""

    frame: MicPovmFrame
    matrix: np.ndarray
    kind: str = "gksl"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        n = self.frame.size
        if m.shape != (n, n):
            raise DimensionMismatch(f"generator shape {m.shape} != ({n}, {n})")
        dev = np.abs(m.sum(axis=0)).max()
        if dev > COLUMN_SUM_TOL:
            raise NotGeneratorShaped(f"column sums deviate from 0 by {dev:.3e}")
        if self.kind not in ("hamiltonian", "dissipator", "gksl"):
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class OperatorBasis:
    """Traceless Hermitian operators with Tr(b_i b_j) = 2 delta_ij."""

    operators: np.ndarray

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        dim = ops.shape[1]
        if ops.shape != (dim * dim - 1, dim, dim):
            raise DimensionMismatch(
                f"need {dim * dim - 1} operators of shape ({dim}, {dim})")
        traces = np.abs(np.einsum("kii->k", ops))
        if traces.max() > 1e-9:
            raise ValidationError("basis operators must be traceless")
        if np.abs(ops - dagger(ops)).max() > 1e-9:
            raise NotHermitian("basis operators must be Hermitian")
        overlap = np.einsum("aij,bji->ab", ops, ops)
        if np.abs(overlap - 2 * np.eye(len(ops))).max() > 1e-9:
            raise ValidationError("basis operators must satisfy Tr(b_i b_j) = 2 delta_ij")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self):
        return self.operators.shape[1]


def pauli_basis():
    return OperatorBasis(PAULI)


def operator_basis(dim):
    """Default operator basis: Pauli matrices for qubits, generalized
    Gell-Mann matrices otherwise."""
    if dim == 2:
        return pauli_basis()
    return OperatorBasis(traceless_hermitian_basis(dim))


@dataclass(frozen=True)
class HamiltonianCoeffs:
    """Expansion H = nu0 I + sum_i nu[i] basis[i]."""

    nu0: float
    nu: np.ndarray


def decompose_hamiltonian(hamiltonian, basis):
    h = check_hermitian(hamiltonian, what="Hamiltonian")
    nu0 = float(np.trace(h).real) / basis.dim
    nu = np.einsum("ij,kji->k", h, basis.operators).real / 2.0
    return HamiltonianCoeffs(nu0, nu)


def reconstruct_hamiltonian(coeffs, basis):
    return coeffs.nu0 * np.eye(basis.dim) + np.einsum(
        "k,kij->ij", coeffs.nu, basis.operators)


def _commutator_generator(op, frame):
    """Real matrix with entries i Tr(op [effects[l], duals[k]])."""
    left = np.einsum("ij,ljm,kmi->lk", op, frame.effects, frame.duals)
    right = np.einsum("ij,kjm,lmi->lk", op, frame.duals, frame.effects)
    return np.real(1j * (left - right))


def hamiltonian_generator(hamiltonian, frame):
    """Probability-space generator of the von Neumann equation.

    The result is real with zero column sums, is invariant under adding a
    multiple of the identity to the Hamiltonian, and satisfies
    m^T graminv + graminv m = 0.
    """
    h = check_hermitian(hamiltonian, what="Hamiltonian")
    if h.shape[0] != frame.dim:
        raise DimensionMismatch(
            f"Hamiltonian dimension {h.shape[0]} != frame dimension {frame.dim}")
    return GeneratorMatrix(frame, _commutator_generator(h, frame), "hamiltonian")


def unitary_map(generator, t):
    """Evolution matrix exp(m t) of a Hamiltonian generator."""
    if generator.kind != "hamiltonian":
        raise ValidationError("unitary_map requires a hamiltonian-kind generator")
    u = expm(generator.matrix * float(t))
    return PseudoStochasticMap(generator.frame, generator.frame, u)


def basis_generators(frame, basis=None):
    """Generators of the operator-basis Hamiltonians.

    Their pairwise matrix-trace products equal -4 d delta_ij, which makes
    them an orthogonal coordinate system for the Hamiltonian sector.
    """
    if basis is None:
        basis = operator_basis(frame.dim)
    if basis.dim != frame.dim:
        raise DimensionMismatch("operator basis dimension does not match frame")
    return [GeneratorMatrix(frame, _commutator_generator(op, frame), "hamiltonian")
            for op in basis.operators]


def project_unitary(matrix, frame, basis=None):
    """Orthogonal projection of a matrix onto the Hamiltonian sector.

    Idempotent; Hamiltonian generators are fixed points and pure dissipators
    of unital noise project to zero.
    """
    matrix = np.asarray(matrix, dtype=float)
    gens = basis_generators(frame, basis)
    out = np.zeros_like(matrix)
    for g in gens:
        out -= np.trace(matrix @ g.matrix) / (4.0 * frame.dim) * g.matrix
    return GeneratorMatrix(frame, out, "hamiltonian")


def dissipator_matrix(noise_ops, frame):
    """Probability-space dissipator of a set of noise operators.

    Entry (i, j) is S_ij minus the symmetrized contraction of S with the
    effect product tensor, where S_ij = Tr(effects[i] Psi(duals[j])) and
    Psi(x) = sum_k A_k x A_k^dag. Equals the matrix elements of
    D(x) = Psi(x) - (1/2){Psi*(I), x} computed in the standard formalism.
    """
    noise_ops = [np.asarray(a, dtype=complex) for a in noise_ops]
    if not noise_ops:
        return GeneratorMatrix(frame, np.zeros((frame.size, frame.size)), "dissipator")
    for a in noise_ops:
        if a.shape != (frame.dim, frame.dim):
            raise DimensionMismatch(
                f"noise operator shape {a.shape} != ({frame.dim}, {frame.dim})")
    ops = np.array(noise_ops)
    moved = np.einsum("nab,jbc,ndc->jad", ops, frame.duals, ops.conj())
    s = np.einsum("iab,jba->ij", frame.effects, moved).real
    lt = frame.effect_product_tensor
    col = s.sum(axis=0)
    # Tr({E_i, E_l} duals[j]) contributions: the anticommutator makes the sum real
    sym = (np.einsum("jil,l->ij", lt, col) + np.einsum("jli,l->ij", lt, col)).real
    return GeneratorMatrix(frame, s - 0.5 * sym, "dissipator")


def gksl_generator(hamiltonian, noise_ops, frame):
    """Full Markovian generator: Hamiltonian part plus dissipator."""
    h = hamiltonian_generator(hamiltonian, frame)
    d = dissipator_matrix(noise_ops, frame)
    return GeneratorMatrix(frame, h.matrix + d.matrix, "gksl")


def evolve(generator, p0, t):
    """Propagate a probability vector: p(t) = exp(m t) p0."""
    if not generator.frame.matches(p0.frame):
        raise ValidationError("state is not represented over the generator's frame")
    p = expm(generator.matrix * float(t)) @ p0.p
    return ProbVector(generator.frame, p)


def heisenberg_evolve(measurement, generator, t):
    """Heisenberg picture: evolve measurement rows instead of the state.

    Accepts a MeasurementMap or a bare row/matrix; returns the same shape.
    The evolved rows applied to p0 equal the original rows applied to the
    evolved state.
    """
    u = expm(generator.matrix * float(t))
    if isinstance(measurement, MeasurementMap):
        return MeasurementMap(measurement.frame, measurement.matrix @ u,
                              measurement.labels)
    m = np.asarray(measurement, dtype=float)
    if m.shape[-1] != generator.frame.size:
        raise ShapeMismatch(
            f"row length {m.shape[-1]} != frame size {generator.frame.size}")
    return m @ u


def is_gksl_generator(generator, tol=1e-9):
    """Complete-positivity test for a candidate generator matrix.

    Forms the doubled-space vector of the maximally entangled state, applies
    the generator to its second factor, projects out the entangled direction
    with two-sided star products and runs the polynomial positivity pipeline
    on the (non-normalized) result. The projection annihilates the
    Hamiltonian part, so the full generator and its dissipator give the same
    verdict.
    """
    frame = generator.frame
    dev = np.abs(generator.matrix.sum(axis=0)).max()
    if dev > max(tol, COLUMN_SUM_TOL):
        raise NotGeneratorShaped(f"column sums deviate from 0 by {dev:.3e}")
    product = frames_mod.tensor(frame, frame)
    sigma = maximally_entangled_state(frame.dim)
    s = np.einsum("ij,aji->a", sigma, product.effects).real
    # complement of the entangled state: Tr(E_i)Tr(E_j) - s_(ij)
    p_bar = np.kron(frame.trace_vector, frame.trace_vector) - s
    applied = (s.reshape(frame.size, frame.size) @ generator.matrix.T).reshape(-1)
    sandwiched = states.star_components(
        product, p_bar, states.star_components(product, applied, p_bar))
    dim2 = frame.dim * frame.dim
    a = states.power_traces_components(product, sandwiched, dim2)
    return states.positivity_verdict(a, tol=tol)


# ---------------------------------------------------------------------------
# Reference single-qubit channels (closed forms and their defining channels)
# ---------------------------------------------------------------------------

CHANNEL_NAMES = ("identity", "depolarization", "dephasing", "damping",
                 "rotation-x", "rotation-y", "rotation-z")


def standard_channel_kraus(name, t, tau=1.0, omega=1.0):
    """Kraus operators of the named single-qubit channel at time t."""
    g = np.exp(-t / tau)
    if name == "identity":
        return [np.eye(2, dtype=complex)]
    if name == "depolarization":
        return [np.sqrt((1 + 3 * g) / 4) * np.eye(2, dtype=complex),
                np.sqrt((1 - g) / 4) * PAULI[0],
                np.sqrt((1 - g) / 4) * PAULI[1],
                np.sqrt((1 - g) / 4) * PAULI[2]]
    if name == "dephasing":
        return [np.sqrt((1 + g) / 2) * np.eye(2, dtype=complex),
                np.sqrt((1 - g) / 2) * PAULI[2]]
    if name == "damping":
        gh = np.exp(-t / (2 * tau))
        return [np.array([[1, 0], [0, gh]], dtype=complex),
                np.array([[0, np.sqrt(1 - g)], [0, 0]], dtype=complex)]
    if name.startswith("rotation-"):
        axis = {"rotation-x": 0, "rotation-y": 1, "rotation-z": 2}[name]
        return [expm(-0.5j * omega * t * PAULI[axis])]
    raise ValidationError(f"unknown channel {name!r}")


def standard_channel_matrix(name, t, tau=1.0, omega=1.0):
    """Closed-form pseudostochastic matrix of the named channel (SIC frame)."""
    g = np.exp(-t / tau)
    if name == "identity":
        return np.eye(4)
    if name == "depolarization":
        return g * np.eye(4) + (1 - g) / 4 * np.ones((4, 4))
    if name == "dephasing":
        block = 0.5 * np.array([[1 + g, 1 - g], [1 - g, 1 + g]])
        out = np.zeros((4, 4))
        out[:2, :2] = block
        out[2:, 2:] = block
        return out
    if name == "damping":
        gh = np.exp(-t / (2 * tau))
        r3 = np.sqrt(3.0)
        alpha = g / 4 - g / (4 * r3) + 0.25 + 1 / (4 * r3)
        a = alpha + gh / 2
        b = alpha - gh / 2
        c = alpha - g / 2
        d = -alpha + 0.5
        e = alpha + g / (2 * r3) + gh / 2 - 1 / (2 * r3)
        f = alpha + g / (2 * r3) - gh / 2 - 1 / (2 * r3)
        return np.array([[a, b, c, c], [b, a, c, c], [d, d, e, f], [d, d, f, e]])
    if name.startswith("rotation-"):
        wt = omega * t
        co = 2 * np.cos(wt / 2) ** 2
        si = 2 * np.sin(wt / 2) ** 2
        sn = np.sin(wt)
        if name == "rotation-x":
            m = [[co, -sn, sn, si], [sn, co, si, -sn],
                 [-sn, si, co, sn], [si, sn, -sn, co]]
        elif name == "rotation-y":
            m = [[co, -sn, si, sn], [sn, co, -sn, si],
                 [si, sn, co, -sn], [-sn, si, sn, co]]
        else:
            m = [[co, si, sn, -sn], [si, co, -sn, sn],
                 [-sn, sn, co, si], [sn, -sn, si, co]]
        return 0.5 * np.array(m)
    raise ValidationError(f"unknown channel {name!r}")
