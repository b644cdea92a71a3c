import numpy as np
import pytest
from hypothesis import settings, strategies as st

from isomh3.lie_core import ExtIsom, exp_sl, from_real6

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rand_sl2(rng, scale=0.8):
    """Well-conditioned random SL(2,C) element (exp of a Gaussian algebra vector)."""
    return exp_sl(from_real6(rng.normal(size=6) * scale))


def rand_ext(rng, eps=None, scale=0.8):
    if eps is None:
        eps = int(rng.choice([-1, 1]))
    return ExtIsom(rand_sl2(rng, scale), eps)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
