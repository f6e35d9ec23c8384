import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from intervalfa import IntervalDataset, IntervalObservation

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

MODELS = ("uniform", "symtri", "tri")

finite = st.floats(-50.0, 50.0, allow_nan=False, allow_infinity=False)
width = st.one_of(st.just(0.0), st.floats(1e-3, 20.0))
unit = st.floats(0.0, 1.0)


@st.composite
def observations(draw, with_mode=True):
    lo = draw(finite)
    w = draw(width)
    hi = lo + w
    if not with_mode:
        return IntervalObservation(lo, hi)
    md = min(max(lo + draw(unit) * w, lo), hi)
    return IntervalObservation(lo, hi, md)


@st.composite
def datasets(draw, min_n=2, max_n=8, min_p=1, max_p=4):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    p = draw(st.integers(min_p, max_p))
    return random_dataset(np.random.default_rng(seed), n, p)


def random_dataset(rng, n, p, degenerate_share=0.2, scale=10.0):
    c = rng.normal(0.0, scale, (n, p))
    r = rng.uniform(0.0, scale / 2, (n, p))
    r[rng.random((n, p)) < degenerate_share] = 0.0
    lo, hi = c - r, c + r
    mode = np.clip(lo + rng.random((n, p)) * (hi - lo), lo, hi)
    return IntervalDataset(lo, hi, mode)


def triples(data, j):
    return [(float(data.lower[i, j]), float(data.upper[i, j]), float(data.mode[i, j])) for i in range(data.n)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
