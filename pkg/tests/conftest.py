import numpy as np
import pytest

from micrep.frames import MicPovmFrame, build_sic_qubit

from oracles import random_mic_effects


@pytest.fixture(scope="session")
def sic():
    return build_sic_qubit()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def mic_frames():
    """One random MIC frame per dimension, shared across tests."""
    rng = np.random.default_rng(7)
    return {d: MicPovmFrame(random_mic_effects(d, rng)) for d in (2, 3, 4)}
