import numpy as np
import pytest

from micrep.errors import NotPositive, NotPseudoStochastic
from micrep.frames import tensor
from micrep.linalg import PAULI, dagger, random_density_matrix
from micrep.measurements import (
    MeasurementMap,
    circled_star,
    effect_power_traces,
    is_valid_measurement,
    map_to_povm,
    observable_from_operator,
    observable_mean,
    outcome_probs,
    povm_to_map,
)
from micrep.states import ProbVector, to_prob

from oracles import born_probs, random_mic_effects

PROJECTORS = np.array([[[1, 0], [0, 0]], [[0, 0], [0, 1]]], dtype=complex)


def test_frame_measured_in_itself_is_identity(sic):
    m = povm_to_map(sic.effects, sic)
    assert np.abs(m.matrix - np.eye(4)).max() <= 1e-12


def test_projective_map_closed_form(sic):
    m = povm_to_map(PROJECTORS, sic)
    r = 1.0 / np.sqrt(3.0)
    expected = 3 * 0.5 * np.array([[1 + r, 1 + r, 1 - r, 1 - r],
                                   [1 - r, 1 - r, 1 + r, 1 + r]]) - 1.0
    assert np.abs(m.matrix - expected).max() <= 1e-12


def test_trivial_povm_single_row(sic):
    m = povm_to_map(np.eye(2, dtype=complex)[None], sic)
    assert np.abs(m.matrix - 1.0).max() <= 1e-12


def test_povm_to_map_rejects_negative_effect(sic):
    sz = PAULI[2]
    effects = np.array([sz, np.eye(2) - sz], dtype=complex)
    with pytest.raises(NotPositive):
        povm_to_map(effects, sic)


def test_map_to_povm_round_trip(sic):
    m = povm_to_map(PROJECTORS, sic)
    back = map_to_povm(m)
    assert np.abs(back - PROJECTORS).max() <= 1e-12


def test_map_to_povm_identity_gives_frame(sic):
    m = MeasurementMap(sic, np.eye(4))
    assert np.abs(map_to_povm(m) - sic.effects).max() <= 1e-12


def test_map_to_povm_all_ones_row(sic):
    m = MeasurementMap(sic, np.ones((1, 4)))
    assert np.abs(map_to_povm(m)[0] - np.eye(2)).max() <= 1e-12


def test_outcome_probs_match_born(sic, rng):
    m = povm_to_map(PROJECTORS, sic)
    for _ in range(20):
        rho = random_density_matrix(2, rng)
        q = outcome_probs(m, to_prob(rho, sic))
        assert np.abs(q - born_probs(rho, PROJECTORS)).max() <= 1e-10


@pytest.mark.parametrize("dim", [2, 3])
def test_outcome_probs_random_povms(dim, mic_frames, rng):
    frame = mic_frames[dim]
    effects = random_mic_effects(dim, rng)  # a POVM is a POVM
    m = povm_to_map(effects, frame)
    for _ in range(30):
        rho = random_density_matrix(dim, rng)
        q = outcome_probs(m, to_prob(rho, frame))
        assert np.abs(q - born_probs(rho, effects)).max() <= 1e-10


def test_row_reconstruction_hermitian_and_complete(sic, rng):
    matrix = rng.normal(size=(3, 4))
    matrix = matrix / matrix.sum(axis=0)
    m = MeasurementMap(sic, matrix)
    effects = map_to_povm(m)
    assert np.abs(effects - dagger(effects)).max() <= 1e-10
    assert np.abs(effects.sum(axis=0) - np.eye(2)).max() <= 1e-9


def test_circled_star_identity_row(sic, rng):
    # I = sum_i effects[i], so the all-ones row represents the identity
    ones = np.ones(4)
    x = rng.normal(size=4)
    assert np.abs(circled_star(sic, ones, x) - x).max() <= 1e-10


def test_circled_star_projector_traces(sic):
    m = povm_to_map(PROJECTORS, sic)
    row = m.matrix[0]
    sq = circled_star(sic, row, row)
    assert abs(np.real(sq @ sic.trace_vector) - 1.0) <= 1e-10


def test_circled_star_matches_operator_product(sic, rng):
    for _ in range(20):
        lam = rng.normal(size=4)
        mu = rng.normal(size=4)
        x = np.einsum("i,iab->ab", lam, sic.effects)
        y = np.einsum("i,iab->ab", mu, sic.effects)
        out = circled_star(sic, lam, mu)
        rebuilt = np.einsum("i,iab->ab", out, sic.effects)
        assert np.abs(rebuilt - x @ y).max() <= 1e-10


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_effect_power_traces_match_oracle(dim, mic_frames, rng):
    frame = mic_frames[dim]
    row = rng.normal(size=dim * dim)
    x = np.einsum("i,iab->ab", row, frame.effects)
    a = effect_power_traces(frame, row, dim)
    powers = [x]
    for _ in range(dim - 1):
        powers.append(powers[-1] @ x)
    expected = np.array([np.trace(p).real for p in powers])
    assert np.abs(a - expected).max() <= 1e-8


def test_is_valid_measurement_projective(sic):
    m = povm_to_map(PROJECTORS, sic)
    verdicts = is_valid_measurement(m)
    assert all(v.is_physical for v in verdicts)


def test_is_valid_measurement_flags_indefinite_row(sic):
    m = povm_to_map(PROJECTORS, sic)
    twisted = np.array([2 * m.matrix[0] - m.matrix[1],
                        2 * m.matrix[1] - m.matrix[0]])
    verdicts = is_valid_measurement(MeasurementMap(sic, twisted))
    assert not verdicts[0].is_physical
    assert not verdicts[1].is_physical
    # oracle: the reconstructed row operators are indefinite
    effects = map_to_povm(MeasurementMap(sic, twisted))
    assert np.linalg.eigvalsh(effects[0])[0] < -0.5


def test_is_valid_measurement_identity_matrix(sic):
    verdicts = is_valid_measurement(MeasurementMap(sic, np.eye(4)))
    assert all(v.is_physical for v in verdicts)


def test_is_valid_measurement_rejects_bad_columns(sic):
    with pytest.raises(NotPseudoStochastic):
        MeasurementMap(sic, np.ones((2, 4)))


@pytest.mark.parametrize("dim", [2, 3])
def test_is_valid_measurement_agrees_with_eigen_oracle(dim, mic_frames, rng):
    frame = mic_frames[dim]
    checked = 0
    mismatches = 0
    for _ in range(20):
        matrix = rng.normal(size=(3, dim * dim))
        matrix = matrix / matrix.sum(axis=0)
        m = MeasurementMap(frame, matrix)
        effects = map_to_povm(m)
        for row_effects, verdict in zip(effects, is_valid_measurement(m)):
            lam = np.linalg.eigvalsh(row_effects)[0]
            if abs(lam) < 1e-8:
                continue
            checked += 1
            mismatches += int(verdict.is_physical != (lam > 0))
    assert checked > 30
    assert mismatches == 0


def test_observable_mean_sigma_z(sic):
    obs = observable_from_operator(PAULI[2], sic)
    p0 = to_prob(np.diag([1.0, 0.0]).astype(complex), sic)
    assert abs(observable_mean(obs, p0) - 1.0) <= 1e-10
    uniform = ProbVector(sic, np.full(4, 0.25))
    assert abs(observable_mean(obs, uniform)) <= 1e-10


def test_observable_mean_sigma_x_plus_state(sic):
    obs = observable_from_operator(PAULI[0], sic)
    plus = to_prob(np.full((2, 2), 0.5, dtype=complex), sic)
    assert abs(observable_mean(obs, plus) - 1.0) <= 1e-10


def test_observable_mean_matches_trace_oracle(sic, rng):
    for _ in range(20):
        x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        op = x + dagger(x)
        obs = observable_from_operator(op, sic)
        rho = random_density_matrix(2, rng)
        lhs = observable_mean(obs, to_prob(rho, sic))
        assert abs(lhs - np.trace(op @ rho).real) <= 1e-9


def test_observable_mean_row_is_values_times_matrix(sic):
    obs = observable_from_operator(PAULI[2], sic)
    assert np.abs(obs.mean_row -
                  np.asarray(obs.values) @ obs.projector_map.matrix).max() == 0.0


def test_tensor_rule_for_measurements(sic):
    pz = povm_to_map(PROJECTORS, sic)
    product_frame = tensor(sic, sic)
    pair_effects = np.array([np.kron(a, b) for a in PROJECTORS for b in PROJECTORS])
    joint = povm_to_map(pair_effects, product_frame)
    assert np.abs(joint.matrix - np.kron(pz.matrix, pz.matrix)).max() <= 1e-10
