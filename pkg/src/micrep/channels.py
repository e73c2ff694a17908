"""Channels as pseudostochastic matrices; complete positivity via Choi vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import frames as frames_mod
from . import states
from .errors import (
    DimensionMismatch,
    FrameMismatch,
    NotPseudoStochastic,
    NotTracePreserving,
)
from .frames import MicPovmFrame
from .linalg import dagger
from .states import ProbVector

COLUMN_SUM_TOL = 1e-8


@dataclass(frozen=True)
class PseudoStochasticMap:
    """Real matrix with unit column sums mapping in-frame vectors to out-frame ones."""

    in_frame: MicPovmFrame
    out_frame: MicPovmFrame
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        expected = (self.out_frame.size, self.in_frame.size)
        if m.shape != expected:
            raise DimensionMismatch(f"matrix shape {m.shape} != {expected}")
        dev = np.abs(m.sum(axis=0) - 1.0).max()
        if dev > COLUMN_SUM_TOL:
            raise NotPseudoStochastic(f"column sums deviate from 1 by {dev:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class KrausChannel:
    """Trace-preserving channel given by Kraus operators."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(v, dtype=complex) for v in self.operators)
        if not ops:
            raise DimensionMismatch("channel needs at least one Kraus operator")
        dev = np.abs(sum(dagger(v) @ v for v in ops) - np.eye(ops[0].shape[1])).max()
        if dev > 1e-8:
            raise NotTracePreserving(
                f"Kraus operators do not satisfy the completeness relation "
                f"(deviation {dev:.3e})")
        object.__setattr__(self, "operators", ops)

    @property
    def dim_in(self):
        return self.operators[0].shape[1]

    @property
    def dim_out(self):
        return self.operators[0].shape[0]

    def apply(self, rho):
        return sum(v @ rho @ dagger(v) for v in self.operators)


@dataclass(frozen=True)
class ChoiProbVector:
    """Probability vector of the Choi state over in_frame x out_frame."""

    in_frame: MicPovmFrame
    out_frame: MicPovmFrame
    components: np.ndarray


def kraus_to_map(channel, in_frame, out_frame=None):
    """Pseudostochastic matrix S_lk = sum_n Tr(out_effects[l] V_n in_duals[k] V_n^dag)."""
    if out_frame is None:
        out_frame = in_frame
    if channel.dim_in != in_frame.dim or channel.dim_out != out_frame.dim:
        raise DimensionMismatch(
            f"channel maps dim {channel.dim_in} -> {channel.dim_out}, frames are "
            f"{in_frame.dim} -> {out_frame.dim}")
    ops = np.array(channel.operators)
    moved = np.einsum("nab,kbc,ndc->kad", ops, in_frame.duals, ops.conj())
    s = np.einsum("lab,kba->lk", out_frame.effects, moved).real
    return PseudoStochasticMap(in_frame, out_frame, s)


def map_apply(smap, pv):
    """Apply the channel in probability space: p_out = S p_in."""
    if not smap.in_frame.matches(pv.frame):
        raise FrameMismatch("state is not represented over the map's input frame")
    return ProbVector(smap.out_frame, smap.matrix @ pv.p)


def dual_map_action(smap, m_out):
    """Heisenberg-picture image of an operator on the output space.

    Satisfies Tr(dual(M) rho) = Tr(M channel(rho)) for every input state.
    """
    m_out = np.asarray(m_out, dtype=complex)
    if m_out.shape != (smap.out_frame.dim, smap.out_frame.dim):
        raise DimensionMismatch(
            f"operator shape {m_out.shape} does not match output dimension")
    coords = np.einsum("lij,ji->l", smap.out_frame.duals, m_out)
    return np.einsum("l,lk,kij->ij", coords, smap.matrix, smap.in_frame.effects)


def tensor_maps(map_a, map_b):
    """Kronecker product of two channel matrices over the product frames."""
    return PseudoStochasticMap(
        frames_mod.tensor(map_a.in_frame, map_b.in_frame),
        frames_mod.tensor(map_a.out_frame, map_b.out_frame),
        np.kron(map_a.matrix, map_b.matrix),
    )


def partial_trace_map(frame_a, frame_b):
    """Map from the product frame to frame_a that sums out the second factor."""
    product = frames_mod.tensor(frame_a, frame_b)
    m = np.kron(np.eye(frame_a.size), np.ones((1, frame_b.size)))
    return PseudoStochasticMap(product, frame_a, m)


def maximally_entangled_state(dim):
    """Density matrix (1/d) sum_nm |nn><mm| of the canonical maximally entangled pair."""
    phi = np.zeros(dim * dim, dtype=complex)
    phi[:: dim + 1] = 1.0 / np.sqrt(dim)
    return np.outer(phi, phi.conj())


def max_entangled_prob(frame, conjugate_first=False):
    """Probability vector of the maximally entangled state on the doubled space.

    With ``conjugate_first`` the first tensor factor is measured with the
    entrywise-conjugated frame; for a SIC frame this reproduces the closed
    form (d delta_nm + 1) / (d**2 (d + 1)). The plain product frame is what
    the Choi construction uses.
    """
    first = frame.conjugate() if conjugate_first else frame
    product = frames_mod.tensor(first, frame)
    sigma = maximally_entangled_state(frame.dim)
    p = np.einsum("ij,aji->a", sigma, product.effects).real
    return ProbVector(product, p)


def choi_prob(smap, s=None):
    """Choi probability vector p_S = (I x S) s.

    ``s`` defaults to the maximally entangled vector over in_frame x in_frame.
    The result lives over in_frame x out_frame; it represents a state exactly
    when the map is completely positive.
    """
    if s is None:
        s = max_entangled_prob(smap.in_frame)
    n_in = smap.in_frame.size
    if s.p.shape != (n_in * n_in,):
        raise FrameMismatch("seed vector is not over the doubled input frame")
    block = s.p.reshape(n_in, n_in)
    p = (block @ smap.matrix.T).reshape(-1)
    return ChoiProbVector(smap.in_frame, smap.out_frame, p)


def map_from_choi(choi):
    """Reconstruct the channel matrix from its Choi probability vector.

    S_lk = d sum_n Tr(in_duals[n] in_duals[k]^T) p_S(n, l); inverse of
    :func:`choi_prob` with the default seed. The factor d compensates the
    1/d normalization of the maximally entangled state.
    """
    in_frame, out_frame = choi.in_frame, choi.out_frame
    # Tr(e_n e_k^T) = sum_ij e_n[i, j] e_k[i, j]; real for Hermitian duals
    overlap = np.einsum("nij,kij->nk", in_frame.duals, in_frame.duals).real
    block = choi.components.reshape(in_frame.size, out_frame.size)
    s = in_frame.dim * overlap.T @ block
    return PseudoStochasticMap(in_frame, out_frame, s.T)


def choi_frame(choi):
    """Product frame the Choi vector is represented over."""
    return frames_mod.tensor(choi.in_frame, choi.out_frame)


def is_cptp(smap, tol=1e-9):
    """Complete-positivity test: physicality of the Choi probability vector."""
    dev = np.abs(smap.matrix.sum(axis=0) - 1.0).max()
    if dev > max(tol, COLUMN_SUM_TOL):
        raise NotPseudoStochastic(f"column sums deviate from 1 by {dev:.3e}")
    choi = choi_prob(smap)
    pv = ProbVector(choi_frame(choi), choi.components)
    return states.is_physical(pv, tol=tol)


def transpose_map(frame):
    """Matrix of the transposition map, S_lk = Tr(effects[l] duals[k]^T).

    Positive but not completely positive; the canonical is_cptp counterexample.
    """
    s = np.einsum("lij,kij->lk", frame.effects, frame.duals).real
    return PseudoStochasticMap(frame, frame, s)


def build_matrix_unit_frame(frame, rng=None):
    """Coordinate vectors of a matrix-unit system |psi_n><psi_m|.

    Builds a random orthonormal basis in the standard formalism and returns
    the (d, d, d**2) array of Born coordinate vectors of the matrix units.
    Diagonal entries are genuine pure-state probability vectors; off-diagonal
    ones are complex and satisfy the star-product multiplication table of
    matrix units. The Choi vector of a map S assembles from them as
    (1/d) sum_nm kron(P[n, m], S @ P[n, m]).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    d = frame.dim
    # real orthonormal basis: keeps the basis' maximally entangled state equal
    # to the computational-basis one, so the assembled Choi vector matches
    # the direct construction
    basis, _ = np.linalg.qr(rng.normal(size=(d, d)))
    vectors = np.empty((d, d, frame.size), dtype=complex)
    for n in range(d):
        for m in range(d):
            unit = np.outer(basis[:, n], basis[:, m].conj())
            vectors[n, m] = np.einsum("ij,aji->a", unit, frame.effects)
    return vectors


def assemble_choi_from_matrix_units(smap, vectors):
    """Choi vector (1/d) sum_nm kron(P[n,m], S P[n,m]) from matrix-unit coordinates."""
    d = smap.in_frame.dim
    total = np.zeros(smap.in_frame.size * smap.out_frame.size, dtype=complex)
    for n in range(d):
        for m in range(d):
            total += np.kron(vectors[n, m], smap.matrix @ vectors[n, m])
    total = total / d
    return ChoiProbVector(smap.in_frame, smap.out_frame, total.real)
