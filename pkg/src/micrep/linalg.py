"""Small linear-algebra helpers used across the package."""

from __future__ import annotations

import numpy as np

from .errors import NotHermitian, NotUnitary

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])
SIGMA_MINUS = 0.5 * (SIGMA_X - 1j * SIGMA_Y)
SIGMA_PLUS = 0.5 * (SIGMA_X + 1j * SIGMA_Y)


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol=1e-9):
    return np.abs(a - dagger(a)).max() <= tol


def check_hermitian(a, tol=1e-9, what="operator"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(f"{what} must be a square matrix, got shape {a.shape}")
    if not is_hermitian(a, tol):
        raise NotHermitian(f"{what} is not Hermitian (max deviation "
                           f"{np.abs(a - dagger(a)).max():.3e})")
    return a


def check_unitary(u, tol=1e-9, what="operator"):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"{what} must be a square matrix, got shape {u.shape}")
    dev = np.abs(u @ dagger(u) - np.eye(u.shape[0])).max()
    if dev > tol:
        raise NotUnitary(f"{what} is not unitary (max deviation {dev:.3e})")
    return u


def min_eigenvalue(a):
    return float(np.linalg.eigvalsh(a)[0])


def kron_all(mats):
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m))
    return out


def traceless_hermitian_basis(dim):
    """Generalized Gell-Mann matrices: traceless, Hermitian, Tr(b_i b_j) = 2 delta_ij.

    For dim = 2 this returns the Pauli matrices (x, y, z order differs:
    here symmetric, antisymmetric, diagonal families are concatenated).
    """
    basis = []
    for j in range(dim):
        for k in range(j + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            basis.append(m)
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            basis.append(m)
    for l in range(1, dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -l
        basis.append(np.sqrt(2.0 / (l * (l + 1))) * m)
    return np.array(basis)


def random_density_matrix(dim, rng):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ dagger(x)
    return rho / np.trace(rho).real


def random_pure_ket(dim, rng):
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary(dim, rng):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(x)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus_channel(dim_in, dim_out, rng, env_dim=None):
    """Random CPTP channel via a Haar-ish random Stinespring isometry."""
    if env_dim is None:
        env_dim = dim_in * dim_in
    x = rng.normal(size=(dim_out * env_dim, dim_in)) + 1j * rng.normal(
        size=(dim_out * env_dim, dim_in))
    q, _ = np.linalg.qr(x)
    v = q[:, :dim_in].reshape(dim_out, env_dim, dim_in)
    return [v[:, k, :] for k in range(env_dim)]
