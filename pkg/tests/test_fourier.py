import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steklov.fourier import FourierSeries


def test_evaluation_and_derivatives():
    f = FourierSeries(1.0, [0.2, 0.0, 0.1], [0.0, 0.3])
    t = np.linspace(0, 2 * np.pi, 7)
    exact = 1 + 0.2 * np.cos(t) + 0.1 * np.cos(3 * t) + 0.3 * np.sin(2 * t)
    d1 = -0.2 * np.sin(t) - 0.3 * np.sin(3 * t) + 0.6 * np.cos(2 * t)
    d2 = -0.2 * np.cos(t) - 0.9 * np.cos(3 * t) - 1.2 * np.sin(2 * t)
    np.testing.assert_allclose(f(t), exact, atol=1e-15)
    np.testing.assert_allclose(f(t, 1), d1, atol=1e-14)
    np.testing.assert_allclose(f(t, 2), d2, atol=1e-14)
    assert f.highest_mode == 3


def test_constant_series():
    f = FourierSeries.constant(2.5)
    assert f(0.3) == 2.5 and f(np.zeros(3), 1).tolist() == [0, 0, 0]
    assert f.highest_mode == 0


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=6), st.lists(st.floats(-1, 1), min_size=1, max_size=6),
       st.floats(-2, 2))
def test_samples_roundtrip(a, b, a0):
    f = FourierSeries(a0, a, b)
    g = FourierSeries.from_function(f, modes=8)
    np.testing.assert_allclose(g.a[: f.modes], f.a, atol=1e-14)
    np.testing.assert_allclose(g.b[: f.modes], f.b, atol=1e-14)
    assert g.a0 == pytest.approx(a0, abs=1e-14)


def test_tail_check():
    with pytest.raises(ValueError):
        FourierSeries.from_function(lambda t: 1 / (1.5 + np.cos(t)), modes=8)
    ok = FourierSeries.from_function(lambda t: 1 / (1.5 + np.cos(t)), modes=64)
    assert ok(0.0) == pytest.approx(0.4, rel=1e-12)


def test_dict_roundtrip_and_trim():
    f = FourierSeries(1.0, [0.0, 0.2, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0])
    d = f.to_dict()
    assert d == {"a0": 1.0, "a": [0.0, 0.2], "b": [0.0, 0.0]}
    assert FourierSeries.from_dict(d)(0.4) == f(0.4)


def test_from_dict_truncation():
    big = {"a0": 1.0, "a": [0.1] + [0.0] * 80}
    assert FourierSeries.from_dict(big, max_modes=64).modes == 64
    with pytest.raises(ValueError):
        FourierSeries.from_dict({"a0": 1.0, "a": [0.0] * 70 + [0.1]}, max_modes=64)
