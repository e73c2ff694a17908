"""MIC-POVM frames: construction, validation, tensor products, frame transitions.

A frame is a minimal informationally complete POVM: exactly d**2 positive
effects summing to the identity and spanning the operator space. Everything
else in the package is expressed in the coordinates a frame induces — its
Gram matrix, dual operators, and the two structure tensors that encode
operator multiplication in those coordinates.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    FrameSingular,
    NotNormalized,
    NotPositive,
    SymmetryViolation,
)
from .linalg import PAULI, dagger

DEFAULT_TOL = 1e-9
MAX_CONDITION_NUMBER = 1e12


class MicPovmFrame:
    """A MIC-POVM together with its derived tensors.

    Instances are immutable after construction. The structure tensors are
    computed lazily and cached: the fill is idempotent, so concurrent reads
    are safe.

    Attributes:
        dim: Hilbert-space dimension d.
        size: number of effects, d**2.
        effects: (d**2, d, d) complex array of POVM effects.
        duals: (d**2, d, d) complex array, Tr(effects[l] @ duals[k]) = delta_lk.
        gram: (d**2, d**2) real Gram matrix of pairwise effect overlaps.
        gram_inverse: inverse of the Gram matrix.
        trace_vector: (d**2,) real array of effect traces.
        condition_number: condition number of the Gram matrix.
        tol: absolute tolerance used for this frame's validity checks.
    """

    def __init__(self, effects, *, tol=DEFAULT_TOL, validate=True):
        effects = np.array(effects, dtype=complex)
        if effects.ndim != 3 or effects.shape[1] != effects.shape[2]:
            raise DimensionMismatch(
                f"effects must be a stack of square matrices, got shape {effects.shape}")
        dim = effects.shape[1]
        if effects.shape[0] != dim * dim:
            raise FrameSingular(
                f"a MIC-POVM in dimension {dim} needs {dim * dim} effects, "
                f"got {effects.shape[0]}")
        self.dim = dim
        self.size = dim * dim
        self.tol = float(tol)
        self.effects = effects

        if validate:
            self._check_effects()

        gram = np.einsum("aij,bji->ab", effects, effects)
        if validate and np.abs(gram.imag).max() > self.tol:
            raise NotPositive("effects are not Hermitian: Gram matrix is not real")
        self.gram = gram.real
        self.condition_number = float(np.linalg.cond(self.gram))
        if not np.isfinite(self.condition_number) or \
                self.condition_number > MAX_CONDITION_NUMBER:
            raise FrameSingular(
                f"effects are not linearly independent enough: Gram condition "
                f"number {self.condition_number:.3e}")
        self.gram_inverse = np.linalg.inv(self.gram)
        self.duals = np.einsum("ab,bij->aij", self.gram_inverse, effects)
        self.trace_vector = np.einsum("aii->a", effects).real

        if validate:
            self._check_duality()

        for arr in (self.effects, self.gram, self.gram_inverse, self.duals,
                    self.trace_vector):
            arr.setflags(write=False)
        self._state_tensor = None
        self._effect_tensor = None

    def _check_effects(self):
        tol = self.tol
        herm_dev = np.abs(self.effects - dagger(self.effects)).max()
        if herm_dev > tol:
            raise NotPositive(f"effects are not Hermitian (max deviation {herm_dev:.3e})")
        for k, e in enumerate(self.effects):
            lo = np.linalg.eigvalsh(e)[0]
            if lo < -tol:
                raise NotPositive(
                    f"effect {k} is not positive semidefinite (min eigenvalue {lo:.3e})")
        total = self.effects.sum(axis=0)
        dev = np.abs(total - np.eye(self.dim)).max()
        if dev > tol:
            raise NotNormalized(
                f"effects do not sum to the identity (max deviation {dev:.3e})")

    def _check_duality(self):
        delta = np.einsum("aij,bji->ab", self.effects, self.duals)
        dev = np.abs(delta - np.eye(self.size)).max()
        if dev > max(self.tol, 10 * self.tol * self.condition_number ** 0.5):
            raise FrameSingular(f"dual basis inaccurate (duality deviation {dev:.3e})")

    @property
    def state_product_tensor(self):
        """Stack L with L[k, n, m] = Tr(duals[n] duals[m] effects[k]).

        Contracting two state vectors with L[k] gives the coordinates of the
        operator product of the states they represent. Entries are complex;
        only contractions representing Hermitian combinations (powers of one
        state, symmetrized products) come out real.
        """
        if self._state_tensor is None:
            t = np.einsum("nij,mjk,aki->anm", self.duals, self.duals, self.effects)
            t.setflags(write=False)
            self._state_tensor = t
        return self._state_tensor

    @property
    def effect_product_tensor(self):
        """Stack Lt with Lt[k, n, m] = Tr(effects[n] effects[m] duals[k])."""
        if self._effect_tensor is None:
            t = np.einsum("nij,mjk,aki->anm", self.effects, self.effects, self.duals)
            t.setflags(write=False)
            self._effect_tensor = t
        return self._effect_tensor

    def conjugate(self):
        """Frame of entrywise complex-conjugated effects (computational basis)."""
        return MicPovmFrame(np.conj(self.effects), tol=self.tol, validate=False)

    def matches(self, other):
        """True if the two frames define the same representation."""
        return self is other or (
            isinstance(other, MicPovmFrame)
            and self.dim == other.dim
            and np.allclose(self.effects, other.effects, atol=1e-12)
        )

    def __repr__(self):
        return f"MicPovmFrame(dim={self.dim}, cond={self.condition_number:.3g})"


@dataclass(frozen=True)
class FrameTransition:
    """Change of representation between two frames over the same space.

    ``matrix`` maps source-frame probability vectors to target-frame ones.
    """

    source: MicPovmFrame
    target: MicPovmFrame
    matrix: np.ndarray


def build_sic_qubit(tol=DEFAULT_TOL):
    """The tetrahedral qubit SIC frame.

    Effects are (I +/- directions . sigma) / 4 with the four unit Bloch
    vectors (-1,1,1), (1,-1,1), (1,1,-1), (-1,-1,-1) scaled by 1/sqrt(3).
    """
    c = np.sqrt(3.0) / 12.0
    eye = np.eye(2, dtype=complex)
    signs = np.array([(-1, 1, 1), (1, -1, 1), (1, 1, -1), (-1, -1, -1)], dtype=float)
    effects = [eye / 4 + c * np.einsum("i,ijk->jk", s, PAULI) for s in signs]
    return MicPovmFrame(effects, tol=tol)


def sic_bloch_directions():
    """Unit Bloch vectors of the tetrahedral qubit SIC effects."""
    return np.array([(-1, 1, 1), (1, -1, 1), (1, 1, -1), (-1, -1, -1)],
                    dtype=float) / np.sqrt(3.0)


def build_sic_from_fiducials(vectors, tol=DEFAULT_TOL):
    """Build a SIC frame from d**2 unit kets with equiangular overlaps.

    Raises:
        SymmetryViolation: if any pairwise overlap deviates from the
            equiangularity value (d delta_kl + 1)/(d + 1).
        FrameSingular: if the resulting Gram matrix is not invertible.
    """
    kets = np.array(vectors, dtype=complex)
    if kets.ndim != 2:
        raise DimensionMismatch("fiducials must be a list of kets")
    n, dim = kets.shape
    if n != dim * dim:
        raise DimensionMismatch(
            f"need {dim * dim} fiducial kets for dimension {dim}, got {n}")
    norms = np.linalg.norm(kets, axis=1)
    if np.abs(norms - 1.0).max() > max(tol, 1e-8):
        raise NotNormalized("fiducial kets must be unit vectors")
    overlaps = np.abs(kets.conj() @ kets.T) ** 2
    expected = (dim * np.eye(n) + 1.0) / (dim + 1.0)
    dev = np.abs(overlaps - expected).max()
    if dev > max(tol, 1e-8):
        raise SymmetryViolation(
            f"pairwise overlaps deviate from the equiangularity condition by {dev:.3e}")
    effects = np.einsum("ki,kj->kij", kets, kets.conj()) / dim
    return MicPovmFrame(effects, tol=tol)


def build_mic_from_effects(effects, tol=DEFAULT_TOL):
    """Validate a list of operators as a MIC-POVM and build its frame.

    Raises NotPositive, NotNormalized or FrameSingular naming the failing
    condition.
    """
    return MicPovmFrame(effects, tol=tol)


_TENSOR_CACHE = weakref.WeakKeyDictionary()


def tensor(frame_a, frame_b):
    """Product frame with effects effects_a[i] x effects_b[j].

    The composite index is row-major: (i, j) -> i * frame_b.size + j, the
    ordering of a matrix Kronecker product. Gram matrices and duals then
    factorize as Kronecker products as well. Results are memoized per frame
    pair (frames are immutable), so repeated Choi-style constructions reuse
    the product frame and its cached structure tensors.
    """
    per_a = _TENSOR_CACHE.get(frame_a)
    if per_a is not None:
        cached = per_a.get(frame_b)
        if cached is not None:
            return cached
    effects = np.einsum("aij,bkl->abikjl", frame_a.effects, frame_b.effects)
    d = frame_a.dim * frame_b.dim
    effects = effects.reshape(frame_a.size * frame_b.size, d, d)
    out = MicPovmFrame(effects, tol=max(frame_a.tol, frame_b.tol), validate=False)
    _TENSOR_CACHE.setdefault(frame_a, weakref.WeakKeyDictionary())[frame_b] = out
    return out


def transition_matrix(target, source):
    """Transition from source-frame coordinates to target-frame coordinates.

    Entry (m, n) is Tr(target.effects[m] @ source.duals[n]); the matrix has
    unit column sums and its product with the reverse transition is the
    identity.
    """
    if target.dim != source.dim:
        raise DimensionMismatch(
            f"frames act on different spaces: {target.dim} != {source.dim}")
    m = np.einsum("aij,bji->ab", target.effects, source.duals)
    return FrameTransition(source=source, target=target, matrix=m.real)
