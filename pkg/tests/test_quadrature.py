import numpy as np
from numpy.testing import assert_allclose

from chaingeo.quadrature import integrate_unit_square


def test_polynomial_exact():
    val, err, n = integrate_unit_square(lambda s, t: s**3 * t + t**2, tol=1e-12)
    assert_allclose(val, 1.0 / 8.0 + 1.0 / 3.0, atol=1e-13)
    assert n == 1  # a single panel resolves a low-degree polynomial


def test_peaky_integrand_refines():
    def f(s, t):
        return np.exp(-((s - 0.5) ** 2 + (t - 0.5) ** 2) * 400.0)

    val, err, n = integrate_unit_square(f, tol=1e-9)
    assert n > 1
    assert abs(val - np.pi / 400.0) < 1e-8  # gaussian mass, tails negligible


def test_error_estimate_honest_when_capped():
    def rough(s, t):
        return np.sign(np.sin(40 * s) * np.sin(40 * t))

    val, err, n = integrate_unit_square(rough, tol=1e-12, max_panels=60)
    assert n <= 64
    assert err > 1e-12  # the cap was hit and the estimate says so
