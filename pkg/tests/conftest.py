import numpy as np
import pytest

from clonebound.sampling import random_density_matrix, random_priors


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, dim, rank=None):
    if rank is None:
        rank = int(rng.integers(1, dim + 1))
    return random_density_matrix(rng, dim, rank=rank)


def random_two_state_problem(rng, dim=2, copies_in=1, copies_out=2):
    from clonebound.states import CloningProblem, Ensemble

    states = (random_state(rng, dim), random_state(rng, dim))
    return CloningProblem(
        Ensemble(states, random_priors(rng, 2)), copies_in, copies_out
    )
