import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ore_gcrd.ore import DiffPoly
from ore_gcrd.polynomial import Poly

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")

coef = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)
small_int = st.integers(min_value=-5, max_value=5)


@st.composite
def polys(draw, max_degree: int = 4, nonzero: bool = False, ints: bool = False):
    n = draw(st.integers(min_value=1 if nonzero else 0, max_value=max_degree + 1))
    elem = small_int if ints else coef
    cs = draw(st.lists(elem, min_size=n, max_size=n))
    if nonzero:
        if cs[-1] == 0:
            cs[-1] = 1
    return Poly(cs)


@st.composite
def diffpolys(draw, max_order: int = 3, max_tdeg: int = 2, min_order: int = 0, ints: bool = True):
    """Operators with a nonzero leading coefficient; small integers keep products exact."""
    order = draw(st.integers(min_value=min_order, max_value=max_order))
    rows = [draw(polys(max_tdeg, ints=ints)) for _ in range(order)]
    rows.append(draw(polys(max_tdeg, nonzero=True, ints=ints)))
    return DiffPoly(rows)


def random_diffpoly(rng: np.random.Generator, order: int, tdeg: int) -> DiffPoly:
    rows = [rng.standard_normal(tdeg + 1) for _ in range(order + 1)]
    return DiffPoly(rows)


def coeff_distance(a: DiffPoly, b: DiffPoly) -> float:
    """Largest absolute coefficient difference over a common padding."""
    n = max(len(a), len(b))
    out = 0.0
    for i in range(n):
        x, y = a[i].coeffs, b[i].coeffs
        m = max(len(x), len(y))
        if m:
            out = max(out, float(np.max(np.abs(np.pad(x, (0, m - len(x))) - np.pad(y, (0, m - len(y)))))))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
