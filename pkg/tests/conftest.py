import numpy as np
import pytest

from radeuler.eos import GasParams
from radeuler.evolution import make_state
from radeuler.initial_data import InitialDataSpec, build, equilibrium_data, model_for


@pytest.fixture
def params():
    return GasParams()


def state_for(spec, n, **options):
    data = build(spec, n)
    model = model_for(data, **options)
    return data, model, make_state(0.0, data.P, data.u, data.s, data.r, model)


@pytest.fixture
def bump_state():
    return state_for(InitialDataSpec(epsilon=1e-3), 64)


@pytest.fixture
def equilibrium_state():
    data = equilibrium_data(64)
    model = model_for(data)
    return data, model, make_state(0.0, data.P, data.u, data.s, data.r, model)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
