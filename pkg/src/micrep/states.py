"""States as probability vectors: Born coordinates, star product, qplex membership.

A state is a length-d**2 real probability vector of Born probabilities over a
frame. The star product expresses operator multiplication directly on such
vectors, which in turn yields power traces, characteristic-polynomial
coefficients and a positivity test that never reconstructs the operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, FrameMismatch, MicRepError, NotNormalized
from .frames import MicPovmFrame
from .linalg import check_hermitian

NORMALIZATION_TOL = 1e-8


@dataclass(frozen=True)
class ProbVector:
    """Probability vector of a state over a fixed frame.

    Normalization (components summing to one) is enforced at construction;
    positivity of the represented operator is not — deciding it is exactly
    what :func:`is_physical` is for.
    """

    frame: MicPovmFrame
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (self.frame.size,):
            raise DimensionMismatch(
                f"expected {self.frame.size} components, got shape {p.shape}")
        s = p.sum()
        if abs(s - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"components sum to {s!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class PhysicalityVerdict:
    """Outcome of the polynomial positivity test.

    ``effective_degree`` is the number of (numerically) nonzero eigenvalues;
    ``boundary`` flags operators with stripped zero eigenvalues, i.e. points
    on the boundary of the positivity region.
    """

    is_physical: bool
    effective_degree: int
    poly_coeffs: np.ndarray
    minors: np.ndarray
    boundary: bool = False
    failure_reason: Optional[str] = None


def _require_same_frame(a, b):
    if not a.frame.matches(b.frame):
        raise FrameMismatch("operands are defined over different frames")


def to_prob(rho, frame, tol=1e-9):
    """Born probabilities of a density operator: p_k = Tr(rho effects[k])."""
    rho = check_hermitian(rho, tol=max(tol, 1e-7), what="density operator")
    if rho.shape[0] != frame.dim:
        raise DimensionMismatch(
            f"operator dimension {rho.shape[0]} != frame dimension {frame.dim}")
    p = np.einsum("ij,aji->a", rho, frame.effects).real
    return ProbVector(frame, p)


def from_prob(pv):
    """Operator reconstruction sum_k p_k duals[k].

    The result always has unit trace but may be indefinite; callers that
    need positivity should run :func:`is_physical`.
    """
    return np.einsum("a,aij->ij", pv.p, pv.frame.duals)


def hs_inner(s, p):
    """Hilbert-Schmidt product Tr(sigma rho) = s^T graminv p."""
    _require_same_frame(s, p)
    return float(s.p @ s.frame.gram_inverse @ p.p)


def star_components(frame, s, p):
    """Star product on raw coordinate arrays (complex allowed).

    Component k is Tr(sigma rho effects[k]) where sigma, rho are the
    operators represented by s and p; the left factor is the first argument.
    """
    return np.einsum("knm,n,m->k", frame.state_product_tensor, s, p)


def star(s, p):
    """Star product of two probability vectors; the result represents sigma rho."""
    _require_same_frame(s, p)
    return star_components(s.frame, s.p, p.p)


def power_traces_components(frame, v, count):
    """Traces of operator powers a_n = sum((v*^n)) for n = 1..count."""
    out = np.empty(count)
    acc = np.asarray(v, dtype=complex)
    out[0] = acc.sum().real
    for n in range(1, count):
        acc = star_components(frame, acc, v)
        out[n] = acc.sum().real
    return out


def power_traces(pv):
    """Power traces a_1..a_d of the represented operator via iterated stars."""
    return power_traces_components(pv.frame, pv.p, pv.frame.dim)


def char_poly_coeffs(a):
    """Characteristic-polynomial coefficients from power traces.

    Input a_1..a_d, output b_0..b_d with b_0 = 1 and the recursion
    b_n = (1/n) sum_{i=1..n} (-1)^(i-1) b_(n-i) a_i. The polynomial is
    chi(x) = sum_m (-1)^m b_m x^(d-m).
    """
    a = np.asarray(a, dtype=float)
    d = a.shape[0]
    b = np.zeros(d + 1)
    b[0] = 1.0
    for n in range(1, d + 1):
        acc = 0.0
        for i in range(1, n + 1):
            acc += (-1.0) ** (i - 1) * b[n - i] * a[i - 1]
        b[n] = acc / n
    return b


def hurwitz_minors(b):
    """Leading principal minors of the Hurwitz matrix of sum_m b_m x^(deg-m)."""
    deg = len(b) - 1
    h = np.zeros((deg, deg))
    for i in range(deg):
        for j in range(deg):
            k = 2 * (j + 1) - (i + 1)
            if 0 <= k <= deg:
                h[i, j] = b[k]
    return np.array([np.linalg.det(h[: i + 1, : i + 1]) for i in range(deg)])


def positivity_verdict(a, tol=1e-9):
    """Decide whether a Hermitian operator with power traces ``a`` is PSD.

    The operator is first rescaled to unit root-mean-square eigenvalue
    (sign-preserving; without this, minors of small-eigenvalue spectra
    underflow any absolute tolerance). Newton-Girard then converts power
    traces to characteristic-polynomial coefficients; trailing coefficients
    below tolerance are stripped (zero eigenvalues, reported via the
    ``boundary`` flag); the Routh-Hurwitz minors of the reflected polynomial
    certify strict positivity of the remaining spectrum. Reported
    coefficients and minors refer to the rescaled operator.
    """
    a = np.asarray(a, dtype=float)
    d = len(a)
    rms = np.sqrt(max(a[1], 0.0) / d) if d > 1 else abs(a[0])
    if rms <= tol:
        # numerically the zero operator: PSD, on the boundary
        return PhysicalityVerdict(True, 0, np.array([1.0] + [0.0] * d),
                                  np.array([]), boundary=True)
    a = a / rms ** np.arange(1, d + 1)
    b = char_poly_coeffs(a)
    strip_tol = tol * max(1.0, np.abs(b).max())
    nonzero = np.nonzero(np.abs(b) > strip_tol)[0]
    if len(nonzero) == 0:
        raise MicRepError("internal invariant violated: all polynomial "
                          "coefficients vanish including b_0")
    d_eff = int(nonzero.max())
    boundary = d_eff < len(b) - 1
    if d_eff == 0:
        # all eigenvalues numerically zero: the zero operator is PSD
        return PhysicalityVerdict(True, 0, b, np.array([]), boundary=True)
    minors = hurwitz_minors(b[: d_eff + 1])
    ok = bool(np.all(minors > tol))
    reason = None if ok else (
        f"Hurwitz minor {int(np.argmax(minors <= tol)) + 1} of {d_eff} is "
        f"{minors[minors <= tol][0]:.3e}")
    return PhysicalityVerdict(ok, d_eff, b, minors, boundary=boundary,
                              failure_reason=reason)


def is_physical(pv, tol=1e-9):
    """Qplex membership test: does ``pv`` represent a positive operator?

    Runs entirely in probability space: power traces by iterated star
    products, Newton-Girard, zero-root stripping, Routh-Hurwitz minors.
    """
    if abs(pv.p.sum() - 1.0) > max(tol, NORMALIZATION_TOL):
        raise NotNormalized("probability vector is not normalized")
    a = power_traces(pv)
    return positivity_verdict(a, tol=tol)


def is_pure(pv, tol=1e-9):
    """True iff the vector is a fixed point of the star square, p * p = p."""
    return bool(np.abs(star(pv, pv) - pv.p).max() <= tol)
