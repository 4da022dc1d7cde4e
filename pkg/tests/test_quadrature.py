import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from toeplitz_ergodic import adaptive_gauss_legendre, gauss_legendre
from toeplitz_ergodic.errors import ToleranceError


def test_nodes_cached_and_normalised():
    x, w = gauss_legendre(12)
    assert gauss_legendre(12)[0] is x
    assert w.sum() == pytest.approx(2)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=20), st.floats(-2, 0), st.floats(0.1, 3))
def test_polynomials_exact(coeffs, a, width):
    p = np.polynomial.Polynomial(coeffs)
    b = a + width
    exact = p.integ()(b) - p.integ()(a)
    res = adaptive_gauss_legendre(p, (a, b), nodes=20)
    assert res.value == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_kink_at_breakpoint():
    res = adaptive_gauss_legendre(np.abs, (-1.0, 0.0, 2.0))
    assert res.value == pytest.approx(2.5, abs=1e-14)


def test_oscillatory():
    res = adaptive_gauss_legendre(lambda x: np.cos(40 * x), (0.0, math.pi / 3), rtol=1e-12)
    assert res.value == pytest.approx(math.sin(40 * math.pi / 3) / 40, abs=1e-12)
    assert res.intervals >= 1


def test_singular_integrand_reports():
    with pytest.raises(ToleranceError):
        adaptive_gauss_legendre(lambda x: 1.0 / np.sqrt(np.abs(x)) + np.sin(1 / x),
                                (-1.0, 1.0), rtol=1e-14, max_intervals=64)
