"""Negativity of dynamics generators and its minimization over POVM families.

A generator whose off-diagonal entries are all nonnegative produces an
entrywise-nonnegative (hence stochastic) evolution matrix for every time; the
negativity quantifies how far a given frame representation is from that
classical-like regime. Minimizing it over families of frames and locating the
decoherence strength where the minimum hits zero gives the critical times.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import dynamics
from .errors import BracketNotFound, InfeasibleParameters, ValidationError
from .frames import MicPovmFrame, build_sic_qubit
from .linalg import PAULI, SIGMA_MINUS

MODEL_KINDS = ("depol", "deph", "damp")


@dataclass(frozen=True)
class DecoherenceModel:
    """Spin-1/2 precession with one of the standard dissipative processes.

    theta sets the polar angle of the field (azimuth fixed to zero), tau the
    characteristic decoherence time.
    """

    kind: str
    theta: float
    tau: float

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValidationError(f"kind must be one of {MODEL_KINDS}")
        if not self.tau > 0:
            raise ValidationError("tau must be positive")


def hamiltonian_operator(theta):
    """Field Hamiltonian (sigma_x sin(theta) + sigma_z cos(theta)) / 2."""
    return 0.5 * (PAULI[0] * np.sin(theta) + PAULI[2] * np.cos(theta))


def lindblad_operators(kind, tau):
    """Noise operators of the named process at characteristic time tau."""
    if kind == "depol":
        return [s / (2.0 * np.sqrt(tau)) for s in PAULI]
    if kind == "deph":
        return [PAULI[2] / np.sqrt(tau)]
    if kind == "damp":
        return [SIGMA_MINUS / np.sqrt(tau)]
    raise ValidationError(f"kind must be one of {MODEL_KINDS}")


def spin_model_generator(model, frame):
    """Full generator of the model over the given qubit frame."""
    if frame.dim != 2:
        raise ValidationError("spin models are defined for qubit frames")
    return dynamics.gksl_generator(hamiltonian_operator(model.theta),
                                   lindblad_operators(model.kind, model.tau),
                                   frame)


def negativity(generator):
    """Sum of magnitudes of negative off-diagonal entries."""
    m = generator.matrix if isinstance(generator, dynamics.GeneratorMatrix) \
        else np.asarray(generator)
    off = m - np.diag(np.diag(m))
    return float(np.sum(np.maximum(0.0, -off)))


# ---------------------------------------------------------------------------
# POVM families
# ---------------------------------------------------------------------------

def _su2(alpha, beta, gamma):
    ca, sa = np.exp(-0.5j * (alpha + gamma)), np.exp(-0.5j * (alpha - gamma))
    cb, sb = np.cos(beta / 2), np.sin(beta / 2)
    return np.array([[ca * cb, -sa * sb], [np.conj(sa) * sb, np.conj(ca) * cb]])


class PovmFamily:
    """Parameterized set of qubit MIC-POVM frames searched by the optimizer.

    Subclasses provide ``effects(x)`` returning the stack of four effects or
    None when the parameters are infeasible, plus a schedule of start points.
    ``precursor`` names a smaller family whose optimum seeds this one (the
    families are nested, so a chained search can never do worse).
    """

    name = ""
    n_params = 0
    precursor = None

    def effects(self, x):
        raise NotImplementedError

    def build(self, x, tol=1e-9):
        eff = self.effects(np.asarray(x, dtype=float))
        if eff is None:
            raise InfeasibleParameters(
                f"parameters do not map to a valid {self.name} frame")
        return MicPovmFrame(eff, tol=tol)

    def params_from_effects(self, effects):
        raise NotImplementedError

    def initial_point(self, rng, index, align=None):
        raise NotImplementedError


_PERTURBATION_SCALES = (0.1, 0.3, 0.6, 1.2)


class SicFamily(PovmFamily):
    """All qubit SICs: global unitary rotations of the tetrahedron frame."""

    name = "sic"
    n_params = 3

    def __init__(self):
        self._base = build_sic_qubit().effects

    def effects(self, x):
        u = _su2(*x)
        return np.einsum("ab,kbc,dc->kad", u, self._base, u.conj())

    def initial_point(self, rng, index, align=None):
        if index == 0:
            return np.zeros(3)
        return rng.uniform(0.0, 2 * np.pi, 3)


class ProjectiveMicFamily(PovmFamily):
    """Weighted rank-1 projector frames w_k (I + n_k . sigma) / 2.

    Parameters are the four Bloch directions (theta, phi each); the weights
    follow from completeness by a linear solve and must all be positive.
    """

    name = "pmic"
    n_params = 8
    _MIN_WEIGHT = 1e-6
    precursor = SicFamily

    def __init__(self):
        self._base = self.params_from_effects(build_sic_qubit().effects)

    def effects(self, x):
        th, ph = x[0::2], x[1::2]
        n = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph),
                      np.cos(th)], axis=1)
        system = np.vstack([np.ones(4), n.T])
        try:
            w = np.linalg.solve(system, np.array([2.0, 0.0, 0.0, 0.0]))
        except np.linalg.LinAlgError:
            return None
        if np.any(w < self._MIN_WEIGHT):
            return None
        bloch = np.einsum("ki,iab->kab", n, PAULI)
        return 0.5 * w[:, None, None] * (np.eye(2, dtype=complex)[None] + bloch)

    def params_from_effects(self, effects):
        """Direction angles of four (weighted) rank-1 effects."""
        x = np.empty(8)
        for k in range(4):
            v = np.einsum("iab,ba->i", PAULI, effects[k]).real
            norm = np.linalg.norm(v)
            n = v / norm if norm > 1e-12 else np.array([0.0, 0.0, 1.0])
            x[2 * k] = np.arccos(np.clip(n[2], -1.0, 1.0))
            x[2 * k + 1] = np.arctan2(n[1], n[0])
        return x

    def initial_point(self, rng, index, align=None):
        if index == 0:
            return self._base.copy()
        base = self._base
        if align is not None and index % 2 == 1:
            rotated = np.einsum("ab,kbc,dc->kad", align,
                                build_sic_qubit().effects, align.conj())
            base = self.params_from_effects(rotated)
        scale = _PERTURBATION_SCALES[index % 4]
        return base + rng.normal(0.0, scale, 8)


class GeneralMicFamily(PovmFamily):
    """Unconstrained MIC frames from factored positive matrices.

    Each of the four effects is M^dag M for a lower-triangular 2x2 factor
    (four real parameters each); the stack is then renormalized by the
    inverse square root of its sum, so every parameter point yields a POVM
    and the search has no feasibility wall.
    """

    name = "mic"
    n_params = 16
    precursor = ProjectiveMicFamily

    def __init__(self):
        self._base = self.params_from_effects(build_sic_qubit().effects)

    def params_from_effects(self, effects):
        """Factor parameters reproducing the given four effects exactly."""
        flip = np.array([[0.0, 1.0], [1.0, 0.0]])
        x = np.empty(16)
        for k in range(4):
            # reversed Cholesky gives E = M^dag M with M lower triangular
            c = np.linalg.cholesky(flip @ effects[k] @ flip + 1e-13 * np.eye(2))
            m = (flip @ c @ flip).conj().T
            x[4 * k: 4 * k + 4] = [abs(m[0, 0]), m[1, 0].real, m[1, 0].imag,
                                   abs(m[1, 1])]
        return x

    def effects(self, x):
        eff = np.empty((4, 2, 2), dtype=complex)
        for k in range(4):
            a, b, c, d = x[4 * k: 4 * k + 4]
            m = np.array([[a, 0.0], [b + 1j * c, d]])
            eff[k] = m.conj().T @ m
        total = eff.sum(axis=0)
        vals, vecs = np.linalg.eigh(total)
        if vals[0] < 1e-10:
            return None
        inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
        return np.einsum("ab,kbc,cd->kad", inv_sqrt, eff, inv_sqrt)

    def initial_point(self, rng, index, align=None):
        if index == 0:
            return self._base.copy()
        base = self._base
        if align is not None and index % 2 == 1:
            rotated = np.einsum("ab,kbc,dc->kad", align,
                                build_sic_qubit().effects, align.conj())
            base = self.params_from_effects(rotated)
        scale = _PERTURBATION_SCALES[index % 4]
        return base + rng.normal(0.0, scale, 16)


FAMILIES = {"sic": SicFamily, "pmic": ProjectiveMicFamily, "mic": GeneralMicFamily}


def povm_family(name):
    try:
        return FAMILIES[name.lower()]()
    except KeyError:
        raise ValidationError(f"unknown POVM family {name!r}; "
                              f"choose from {sorted(FAMILIES)}") from None


# ---------------------------------------------------------------------------
# Objective and optimizer
# ---------------------------------------------------------------------------

def _fast_negativity(effects, hamiltonian, noise_ops):
    """Negativity of the model generator for raw effects, or None if singular.

    Algebraically identical to building the frame and the generator through
    the public constructors, but skips validation and never materializes the
    structure tensors; the dissipator uses D(x) = Psi(x) - {Psi*(I), x}/2
    with Psi*(I) accumulated directly from the noise operators.
    """
    gram = np.einsum("aij,bji->ab", effects, effects).real
    try:
        gram_inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        return None
    if np.abs(gram_inv).max() > 1e11:
        return None
    duals = np.einsum("ab,bij->aij", gram_inv, effects)
    left = np.einsum("ij,ljm,kmi->lk", hamiltonian, effects, duals)
    right = np.einsum("ij,kjm,lmi->lk", hamiltonian, duals, effects)
    gen = np.real(1j * (left - right))
    if noise_ops is not None and len(noise_ops):
        moved = np.einsum("nab,jbc,ndc->jad", noise_ops, duals, noise_ops.conj())
        s = np.einsum("iab,jba->ij", effects, moved).real
        w = np.einsum("kba,kbc->ac", noise_ops.conj(), noise_ops)
        anti = np.einsum("iab,bc,jca->ij", effects, w, duals) \
            + np.einsum("ab,ibc,jca->ij", w, effects, duals)
        gen = gen + s - 0.5 * np.real(anti)
    off = gen - np.diag(np.diag(gen))
    return float(np.sum(np.maximum(0.0, -off)))


@dataclass(frozen=True)
class OptimizerConfig:
    """Budget and tolerances for the negativity minimization."""

    restarts: int = 32
    max_iterations: int = 500
    fatol: float = 1e-12
    xatol: float = 1e-9
    zero_tol: float = 1e-6
    tau_tol: float = 0.005
    penalty: float = 50.0
    stop_at_zero: bool = True
    chain_precursor: bool = True
    polish_rounds: int = 2
    warm_spread: float = 0.1
    warm_copies: int = 4
    distrust_threshold: float = 0.05


def _field_alignment(hamiltonian):
    """Unitary rotating the z axis onto the Hamiltonian's Bloch axis."""
    v = np.einsum("iab,ba->i", PAULI, hamiltonian).real
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        return None
    theta = np.arccos(np.clip(v[2] / norm, -1.0, 1.0))
    phi = np.arctan2(v[1], v[0])
    return _su2(phi, theta, 0.0)


@dataclass(frozen=True)
class NegativityReport:
    """Result of a multistart negativity minimization."""

    value: float
    params: np.ndarray
    family: str
    kind: str
    theta: float
    tau: float
    evaluations: int
    restarts_run: int
    best_so_far: tuple


class _FoundZero(Exception):
    pass


def _minimize_over_family(hamiltonian, noise, family, cfg, rng, warm_starts):
    """Multistart simplex minimization of the generator negativity.

    Returns (value, params, evaluations, restarts_run, trail). Infeasible
    candidates are penalized, not fatal; warm starts are tried before the
    family's own schedule; with ``stop_at_zero`` the search ends as soon as
    a value below ``zero_tol`` appears (zero is the global minimum of a
    nonnegative objective). When the family has a precursor the chain is
    optimized first and its best frame seeds this search, so nested families
    always do at least as well as their precursors.
    """
    evaluations = 0
    best_value = math.inf
    best_x = None
    trail = []

    def objective(x):
        nonlocal evaluations
        evaluations += 1
        eff = family.effects(x)
        if eff is None:
            return cfg.penalty
        value = _fast_negativity(eff, hamiltonian, noise)
        if value is None:
            return cfg.penalty
        return value

    def guarded(x):
        value = objective(x)
        if cfg.stop_at_zero and value < cfg.zero_tol:
            raise _FoundZero(x, value)
        return value

    warm = [np.asarray(w, dtype=float) for w in warm_starts]
    if cfg.stop_at_zero:
        # a warm start that is already at zero settles the search in one
        # evaluation, before any precursor chain is paid for
        for w in warm:
            value = objective(w)
            if value < cfg.zero_tol:
                return value, w, evaluations, 0, [value]

    chained = []
    if cfg.chain_precursor and family.precursor is not None:
        pre = family.precursor()
        pre_cfg = dataclasses.replace(cfg, restarts=max(4, cfg.restarts // 2))
        pv, px, pev, _, _ = _minimize_over_family(hamiltonian, noise, pre,
                                                  pre_cfg, rng, ())
        evaluations += pev
        eff = pre.effects(px)
        if eff is not None:
            chained.append(family.params_from_effects(eff))

    align = _field_alignment(hamiltonian)
    starts = warm + chained
    starts += [family.initial_point(rng, i, align=align)
               for i in range(cfg.restarts)]
    options = {"maxiter": cfg.max_iterations, "fatol": cfg.fatol,
               "xatol": cfg.xatol, "adaptive": family.n_params >= 8}
    restarts_run = 0
    try:
        for x0 in starts:
            restarts_run += 1
            res = minimize(guarded, x0, method="Nelder-Mead", options=options)
            if res.fun < best_value:
                best_value = float(res.fun)
                best_x = np.asarray(res.x)
                trail.append(best_value)
        # restarting from the incumbent re-inflates the simplex, which often
        # makes progress on the kinked max(0, .) surface
        for _ in range(cfg.polish_rounds):
            res = minimize(guarded, best_x, method="Nelder-Mead", options=options)
            if res.fun < best_value:
                best_value = float(res.fun)
                best_x = np.asarray(res.x)
                trail.append(best_value)
    except _FoundZero as stop:
        best_x, best_value = np.asarray(stop.args[0]), float(stop.args[1])
        trail.append(best_value)
    if best_x is None:
        raise InfeasibleParameters("no feasible frame found in any restart")
    return best_value, best_x, evaluations, restarts_run, trail


def min_negativity(model, family, cfg=None, rng=None, warm_starts=()):
    """Minimum negativity of the model generator over a POVM family.

    Multistart derivative-free simplex search; deterministic for a given rng
    state.
    """
    if cfg is None:
        cfg = OptimizerConfig()
    if rng is None:
        rng = np.random.default_rng(0)
    if isinstance(family, str):
        family = povm_family(family)
    hamiltonian = hamiltonian_operator(model.theta)
    noise = np.array(lindblad_operators(model.kind, model.tau))
    value, params, evaluations, restarts_run, trail = _minimize_over_family(
        hamiltonian, noise, family, cfg, rng, warm_starts)
    return NegativityReport(value, params, family.name, model.kind,
                            model.theta, model.tau, evaluations, restarts_run,
                            tuple(trail))


@dataclass(frozen=True)
class TauCritResult:
    """Critical decoherence time located by bisection."""

    tau_crit: float
    kind: str
    theta: float
    family: str
    evaluations: int
    history: tuple


def tau_crit(kind, theta, family, cfg=None, seed=0,
             tau_lo=0.1, tau_hi=1.0, tau_min=1e-3, tau_max=64.0):
    """Largest tau at which some frame in the family removes all negativity.

    Each evaluation is a full minimization. The bracket auto-expands:
    downward until a zero appears (failing that raises BracketNotFound) and
    upward until the minimum is positive. The zero frontier is then advanced
    in small steps before the final bisection: zeros found at one tau seed
    the search at the next (the optimal frames deform continuously with tau,
    and near the critical point the zero basins are too narrow for cold
    multistart to find reliably).
    """
    if cfg is None:
        cfg = OptimizerConfig()
    if isinstance(family, str):
        family = povm_family(family)
    seeds = np.random.SeedSequence(seed)
    evaluations = 0
    history = []
    warm = []

    def attempt(tau, stream, factor=1):
        nonlocal evaluations
        model = DecoherenceModel(kind, theta, tau)
        rng = np.random.default_rng(stream)
        starts = list(warm)
        if warm:
            # the zero set deforms continuously with tau: a small cloud
            # around the last zero-achieving frame is the best lead
            starts += [warm[0] + rng.normal(0.0, cfg.warm_spread, len(warm[0]))
                       for _ in range(cfg.warm_copies * factor)]
        budget = cfg if factor == 1 else \
            dataclasses.replace(cfg, restarts=cfg.restarts * factor)
        report = min_negativity(model, family, budget, rng,
                                warm_starts=tuple(starts))
        evaluations += report.evaluations
        if report.value < cfg.zero_tol:
            warm.clear()
            warm.append(report.params)
        return report.value

    def minimum(tau, stream):
        value = attempt(tau, stream)
        if cfg.zero_tol <= value < cfg.distrust_threshold:
            # a small positive minimum near the critical point is as likely a
            # missed zero as a real one; retry with a doubled budget before
            # letting it cap the bisection
            retry = attempt(tau, stream.spawn(1)[0], factor=2)
            value = min(value, retry)
        history.append((tau, value))
        return value

    stream = iter(seeds.spawn(4096))

    lo = float(tau_lo)
    while minimum(lo, next(stream)) >= cfg.zero_tol:
        lo /= 2.0
        if lo < tau_min:
            raise BracketNotFound(
                f"no classical-like representation found down to tau={tau_min}")
    hi = float(tau_hi)
    while minimum(hi, next(stream)) < cfg.zero_tol:
        lo = hi
        hi *= 2.0
        if hi > tau_max:
            raise BracketNotFound(f"negativity still zero at tau={tau_max}")
    # advance the warm-started zero frontier in small steps; evaluations that
    # stay inside the zero region cost almost nothing
    step = max(4.0 * cfg.tau_tol, 0.05 * (hi - lo))
    t = lo + step
    while t < hi - 0.25 * step:
        if minimum(t, next(stream)) < cfg.zero_tol:
            lo = t
        else:
            hi = t
            break
        t += step
    while hi - lo > cfg.tau_tol:
        mid = 0.5 * (lo + hi)
        if minimum(mid, next(stream)) < cfg.zero_tol:
            lo = mid
        else:
            hi = mid
    return TauCritResult(0.5 * (lo + hi), kind, theta, family.name,
                         evaluations, tuple(history))


def _scan_point(args):
    kind, theta, family_name, cfg, seed, index, kwargs = args
    point_seed = int(np.random.SeedSequence((seed, index)).generate_state(1)[0])
    try:
        result = tau_crit(kind, theta, family_name, cfg, seed=point_seed,
                          **kwargs)
        return {"theta": theta, "tau_crit": result.tau_crit,
                "family": result.family, "kind": kind, "seed": seed,
                "evaluations": result.evaluations}
    except BracketNotFound:
        return {"theta": theta, "tau_crit": float("nan"),
                "family": family_name, "kind": kind, "seed": seed,
                "evaluations": 0}


def scan(kind, theta_grid, family, cfg=None, seed=0, workers=1, **kwargs):
    """tau_crit over a theta grid; points without a bracket record NaN.

    Grid points are independent searches with per-point seed streams derived
    from the master seed, so results are identical for any worker count.
    """
    family_name = family if isinstance(family, str) else family.name
    jobs = [(kind, float(theta), family_name, cfg, seed, i, kwargs)
            for i, theta in enumerate(np.asarray(theta_grid, dtype=float))]
    if workers and workers > 1:
        import concurrent.futures
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_point, jobs))
    return [_scan_point(job) for job in jobs]
