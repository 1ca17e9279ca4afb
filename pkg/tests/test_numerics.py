import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steklov.errors import BracketError, ConditioningError, ConvergenceError
from steklov.numerics import (QuadratureSpec, RootSpec, cumulative_integral, find_root, integrate,
                              integrate_periodic, newton_system, sym_generalized_eig)


def test_integrate_smooth():
    assert integrate(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-13)
    assert integrate(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-13)


def test_integrate_empty_and_reversed():
    assert integrate(np.exp, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        integrate(np.exp, 1.0, 0.0)


def test_endpoint_singularity_hint():
    spec = QuadratureSpec(abs_tol=0.0, rel_tol=1e-13, endpoint_singularity_hint=-0.5)
    assert integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0, spec) == pytest.approx(2.0, rel=1e-12)
    spec = QuadratureSpec(abs_tol=0.0, rel_tol=1e-13, endpoint_singularity_hint=-0.5)
    val = integrate(lambda x: np.cos(x) / np.sqrt(x), 0.0, 2.0, spec)
    # int_0^2 cos x / sqrt x = sqrt(2 pi) C(sqrt(4/pi)) with the Fresnel integral C
    from scipy.special import fresnel

    assert val == pytest.approx(math.sqrt(2 * math.pi) * fresnel(math.sqrt(4 / math.pi))[1], rel=1e-11)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0, rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_depth=41)
    with pytest.raises(ValueError):
        QuadratureSpec(endpoint_singularity_hint=-1.0)


def test_nonconvergence_reports_best():
    spec = QuadratureSpec(abs_tol=0.0, rel_tol=1e-14, max_depth=2)
    with pytest.raises(ConvergenceError) as exc:
        integrate(lambda x: np.abs(np.sin(50 * x)), 0.0, 1.0, spec)
    assert exc.value.best is not None


def test_cumulative_integral_matches_closed_form():
    x = np.array([0.0, 0.3, 1.0, 2.5, 0.3])
    got = cumulative_integral(np.cosh, x)
    np.testing.assert_allclose(got, np.sinh(x), rtol=1e-14, atol=1e-16)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=20))
def test_cumulative_integral_property(points):
    # antiderivative of r e^{-r}: 1 - (1 + r) e^{-r}
    x = np.array(points)
    got = cumulative_integral(lambda r: r * np.exp(-r), x)
    np.testing.assert_allclose(got, 1 - (1 + x) * np.exp(-x), rtol=1e-12, atol=1e-15)


def test_periodic_trapezoid():
    # int exp(cos t) = 2 pi I_0(1)
    from scipy.special import i0

    assert integrate_periodic(lambda t: np.exp(np.cos(t))) == pytest.approx(2 * math.pi * i0(1.0), rel=1e-13)


def test_find_root():
    assert find_root(lambda x: x**2 - 2, RootSpec((0.0, 2.0))) == pytest.approx(math.sqrt(2), abs=1e-14)
    with pytest.raises(BracketError):
        find_root(lambda x: x**2 + 1, RootSpec((0.0, 2.0)))
    with pytest.raises(ValueError):
        RootSpec((1.0, 0.0))


def test_newton_system():
    def F(x):
        return np.array([x[0] ** 2 + x[1] ** 2 - 1, x[0] - x[1]])

    x, res, its = newton_system(F, [1.0, 0.2])
    np.testing.assert_allclose(x, [1 / math.sqrt(2)] * 2, atol=1e-12)
    assert res <= 1e-12 and its > 0


def test_newton_failure():
    with pytest.raises(ConvergenceError) as exc:
        newton_system(lambda x: np.array([x[0] ** 2 + 1.0]), [0.5], max_iter=5)
    assert exc.value.best is not None


def test_generalized_eig_against_scipy():
    from scipy.linalg import eigh

    rng = np.random.default_rng(7)
    M = rng.standard_normal((8, 8))
    A = M + M.T
    C = rng.standard_normal((8, 8))
    B = C @ C.T + 8 * np.eye(8)
    vals, V = sym_generalized_eig(A, B, count=3)
    np.testing.assert_allclose(vals, eigh(A, B, eigvals_only=True)[:3], rtol=1e-12)
    np.testing.assert_allclose(V.T @ B @ V, np.eye(3), atol=1e-12)


def test_generalized_eig_errors():
    with pytest.raises(ConditioningError):
        sym_generalized_eig(np.eye(2), -np.eye(2))
    with pytest.raises(ValueError):
        sym_generalized_eig(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))


def test_rounding_noise_fails_fast():
    # 1/sinh t - 1/t cancels near 0: bisection cannot meet 1e-16 relative there
    spec = QuadratureSpec(abs_tol=0.0, rel_tol=1e-16, max_depth=40)
    with pytest.raises(ConvergenceError):
        cumulative_integral(lambda t: 1 / np.sinh(t) - 1 / t, np.array([1e-4, 1.0]), spec)
    with pytest.raises(ConvergenceError):
        integrate(lambda t: 1 / np.sinh(t) - 1 / t, 1e-6, 1.0, spec)
