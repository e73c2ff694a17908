"""Standard-formalism reference implementations used as independent oracles.

Everything here works with density matrices, statevectors and superoperators
directly, never with the probability-space machinery under test.
"""

import itertools

import numpy as np
from scipy.integrate import solve_ivp

from micrep.linalg import dagger


def born_probs(rho, effects):
    return np.einsum("ij,aji->a", rho, effects).real


def apply_kraus(ops, rho):
    return sum(v @ rho @ dagger(v) for v in ops)


def adjoint_kraus(ops, m):
    return sum(dagger(v) @ m @ v for v in ops)


def dissipator_action(noise_ops, rho):
    w = sum(dagger(a) @ a for a in noise_ops)
    out = sum(a @ rho @ dagger(a) for a in noise_ops)
    return out - 0.5 * (w @ rho + rho @ w)


def gksl_action(hamiltonian, noise_ops, rho):
    out = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    if noise_ops:
        out = out + dissipator_action(noise_ops, rho)
    return out


def maximally_entangled(dim):
    phi = np.zeros(dim * dim, dtype=complex)
    phi[:: dim + 1] = 1.0 / np.sqrt(dim)
    return np.outer(phi, phi.conj())


def choi_matrix(channel_action, dim_in):
    """Choi state (Id x Phi)(sigma) for a channel given as a callable."""
    out_probe = channel_action(np.zeros((dim_in, dim_in), dtype=complex))
    dim_out = out_probe.shape[0]
    blocks = np.zeros((dim_in * dim_out, dim_in * dim_out), dtype=complex)
    for n in range(dim_in):
        for m in range(dim_in):
            unit = np.zeros((dim_in, dim_in), dtype=complex)
            unit[n, m] = 1.0
            blocks[n * dim_out:(n + 1) * dim_out, m * dim_out:(m + 1) * dim_out] = \
                channel_action(unit)
    return blocks / dim_in


def choi_min_eigenvalue(kraus_ops, dim_in):
    choi = choi_matrix(lambda rho: apply_kraus(kraus_ops, rho), dim_in)
    return float(np.linalg.eigvalsh(choi)[0])


def conditional_cp_min_eigenvalue(generator_action, dim):
    """Min eigenvalue of Pbar (Id x L)(sigma) Pbar; >= 0 iff L generates CPTP maps."""
    sigma = maximally_entangled(dim)
    pbar = np.eye(dim * dim) - sigma
    c = choi_matrix(generator_action, dim) * dim  # undo the 1/d of choi_matrix
    q = pbar @ c @ pbar
    return float(np.linalg.eigvalsh(q)[0])


def master_equation_probs(hamiltonian, noise_ops, rho0, effects, times,
                          rtol=1e-11, atol=1e-12):
    """Born probabilities along a high-accuracy master-equation integration."""
    dim = rho0.shape[0]

    def rhs(_, y):
        rho = y.reshape(dim, dim)
        return gksl_action(hamiltonian, noise_ops, rho).reshape(-1)

    sol = solve_ivp(rhs, (0.0, max(times)), rho0.reshape(-1).astype(complex),
                    t_eval=sorted(times), rtol=rtol, atol=atol)
    out = {}
    for t, col in zip(sol.t, sol.y.T):
        out[t] = born_probs(col.reshape(dim, dim), effects)
    return out


def elementary_symmetric(roots):
    """Brute-force elementary symmetric polynomials e_0..e_n of the roots."""
    roots = list(roots)
    out = [1.0]
    for k in range(1, len(roots) + 1):
        out.append(float(sum(np.prod(c) for c in itertools.combinations(roots, k))))
    return np.array(out)


def random_mic_effects(dim, rng):
    """Random MIC-POVM: normalized random positive operators."""
    while True:
        gs = []
        for _ in range(dim * dim):
            x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            gs.append(x @ dagger(x))
        total = sum(gs)
        vals, vecs = np.linalg.eigh(total)
        inv_sqrt = (vecs * (1.0 / np.sqrt(vals))) @ dagger(vecs)
        effects = np.array([inv_sqrt @ g @ inv_sqrt for g in gs])
        gram = np.einsum("aij,bji->ab", effects, effects).real
        if np.linalg.cond(gram) < 1e6:
            return effects


# ---------------------------------------------------------------------------
# Statevector circuit simulation
# ---------------------------------------------------------------------------

def _apply_unitary(state, u, targets, n):
    k = len(targets)
    tensor = state.reshape((2,) * n)
    m = u.reshape((2,) * (2 * k))
    moved = np.tensordot(m, tensor, axes=(tuple(range(k, 2 * k)), targets))
    current = list(targets) + [q for q in range(n) if q not in targets]
    perm = [current.index(q) for q in range(n)]
    return np.transpose(moved, perm).reshape(-1)


def statevector_outcome_probs(n, operations, measured):
    """Born probabilities over the measured qubits (ascending order).

    ``operations`` is a list of (unitary, targets); qubit 0 is the leftmost
    tensor factor and the most significant outcome bit.
    """
    state = np.zeros(2 ** n, dtype=complex)
    state[0] = 1.0
    for u, targets in operations:
        state = _apply_unitary(state, np.asarray(u, dtype=complex),
                               tuple(targets), n)
    probs = np.abs(state.reshape((2,) * n)) ** 2
    other = tuple(q for q in range(n) if q not in measured)
    if other:
        probs = probs.sum(axis=other)
    return probs.reshape(-1)
