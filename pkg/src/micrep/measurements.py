"""Measurements and observables as pseudostochastic matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import states
from .errors import (
    DimensionMismatch,
    FrameMismatch,
    NotNormalized,
    NotPositive,
    NotPseudoStochastic,
)
from .frames import MicPovmFrame
from .linalg import check_hermitian, dagger

COLUMN_SUM_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementMap:
    """m x d**2 matrix mapping state vectors to outcome probabilities."""

    frame: MicPovmFrame
    matrix: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[1] != self.frame.size:
            raise DimensionMismatch(
                f"matrix shape {m.shape} incompatible with frame size {self.frame.size}")
        dev = np.abs(m.sum(axis=0) - 1.0).max()
        if dev > COLUMN_SUM_TOL:
            raise NotPseudoStochastic(f"column sums deviate from 1 by {dev:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        labels = self.labels
        if labels is None:
            labels = tuple(range(m.shape[0]))
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def n_outcomes(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Observable:
    """Spectral data of a Hermitian operator plus its mean-value row."""

    values: np.ndarray
    projector_map: MeasurementMap
    mean_row: np.ndarray


def povm_to_map(effects, frame, labels=None, tol=1e-9):
    """Measurement matrix M_ij = Tr(effects[i] duals[j]) of a POVM."""
    effects = np.asarray(effects, dtype=complex)
    if effects.ndim != 3 or effects.shape[1:] != (frame.dim, frame.dim):
        raise DimensionMismatch(
            f"effects shape {effects.shape} incompatible with dimension {frame.dim}")
    for k, e in enumerate(effects):
        if np.abs(e - dagger(e)).max() > max(tol, 1e-8):
            raise NotPositive(f"effect {k} is not Hermitian")
        if np.linalg.eigvalsh(e)[0] < -max(tol, 1e-8):
            raise NotPositive(f"effect {k} is not positive semidefinite")
    dev = np.abs(effects.sum(axis=0) - np.eye(frame.dim)).max()
    if dev > max(tol, 1e-8):
        raise NotNormalized(f"effects do not sum to the identity (deviation {dev:.3e})")
    m = np.einsum("iab,jba->ij", effects, frame.duals).real
    return MeasurementMap(frame, m, labels)


def map_to_povm(mmap):
    """Reconstruct POVM effects M_k = sum_l matrix[k, l] effects[l]."""
    return np.einsum("kl,lij->kij", mmap.matrix, mmap.frame.effects)


def outcome_probs(mmap, pv):
    """Outcome distribution q = M p."""
    if not mmap.frame.matches(pv.frame):
        raise FrameMismatch("state is not represented over the measurement's frame")
    return mmap.matrix @ pv.p


def circled_star(frame, lam, mu):
    """Product of effect-expansion rows: component k is Tr(X Y duals[k]).

    Rows are coordinates in the effect expansion X = sum_i lam_i effects[i];
    the output row represents the operator product X Y in the same expansion,
    and traces are recovered by contraction with the frame's trace vector.
    """
    lam = np.asarray(lam)
    mu = np.asarray(mu)
    if lam.shape != (frame.size,) or mu.shape != (frame.size,):
        raise FrameMismatch(
            f"rows must have {frame.size} components, got {lam.shape} and {mu.shape}")
    return np.einsum("knm,n,m->k", frame.effect_product_tensor, lam, mu)


def effect_power_traces(frame, row, count):
    """Tr(X^j) for j = 1..count where X = sum_i row_i effects[i]."""
    out = np.empty(count)
    acc = np.asarray(row, dtype=complex)
    out[0] = float(np.real(acc @ frame.trace_vector))
    for j in range(1, count):
        acc = circled_star(frame, acc, row)
        out[j] = float(np.real(acc @ frame.trace_vector))
    return out


def is_valid_measurement(mmap, tol=1e-9):
    """Positivity verdict for every row of a measurement matrix.

    Each row reconstructs to an operator whose power traces are computed with
    the circled-star product; the polynomial positivity pipeline then decides
    semidefiniteness. Unlike the state test the traces are not normalized —
    effect traces are arbitrary nonnegative numbers.
    """
    dev = np.abs(mmap.matrix.sum(axis=0) - 1.0).max()
    if dev > max(tol, COLUMN_SUM_TOL):
        raise NotPseudoStochastic(f"column sums deviate from 1 by {dev:.3e}")
    verdicts = []
    for row in mmap.matrix:
        a = effect_power_traces(mmap.frame, row, mmap.frame.dim)
        verdicts.append(states.positivity_verdict(a, tol=tol))
    return verdicts


def observable_from_operator(op, frame, tol=1e-9):
    """Observable from a Hermitian operator via its spectral decomposition.

    Eigenvalues closer than ``degeneracy_tol`` are merged into one outcome.
    """
    op = check_hermitian(op, tol=max(tol, 1e-8), what="observable")
    if op.shape[0] != frame.dim:
        raise DimensionMismatch(
            f"operator dimension {op.shape[0]} != frame dimension {frame.dim}")
    eigvals, eigvecs = np.linalg.eigh(op)
    values = []
    projectors = []
    start = 0
    for i in range(1, len(eigvals) + 1):
        if i == len(eigvals) or eigvals[i] - eigvals[start] > 1e-10:
            vecs = eigvecs[:, start:i]
            projectors.append(vecs @ dagger(vecs))
            values.append(float(eigvals[start:i].mean()))
            start = i
    pmap = povm_to_map(np.array(projectors), frame, labels=tuple(values), tol=tol)
    values = np.array(values)
    return Observable(values, pmap, values @ pmap.matrix)


def observable_mean(obs, pv):
    """Expectation value <O> = mean_row . p."""
    if not obs.projector_map.frame.matches(pv.frame):
        raise FrameMismatch("state is not represented over the observable's frame")
    return float(obs.mean_row @ pv.p)
