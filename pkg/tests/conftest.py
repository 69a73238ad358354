import numpy as np
import pytest
from hypothesis import strategies as st

from poissondiff import Rates, classify

GRID = (0.0, 0.5, 1.0, 2.0)


def _valid(values):
    return not classify(Rates.of(values)).is_dirac


rate_value = st.sampled_from([0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0])
any_rates = st.tuples(rate_value, rate_value, rate_value, rate_value).map(Rates.of)
valid_rates = any_rates.filter(lambda r: not classify(r).is_dirac)
positive_rates = st.tuples(*[st.floats(0.1, 4.0)] * 4).map(Rates.of)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
