import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steklov.domains import StarDomain
from steklov.errors import InvalidModelError, SteklovError
from steklov.fourier import FourierSeries
from steklov.spaces import SpaceForm, WarpedModel
from steklov.steklov2d import (AccuracyWarning, WeightedPlanarDomain, conformal_model, dtn_matrices,
                               dtn_spectrum, nu1_domain, planar_radius)

# Ritz values from a harmonic-polynomial basis (degree 50, 2048 boundary nodes)
FROZEN_FLAT_COS2_01 = (0.8531403131198723, 1.1488386510654156, 1.975754737157021, 1.984841744698493)
# the same basis in the Poincare disk with boundary weight 2/(1 - |z|^2)
FROZEN_HYP_COS2_01 = (0.7256942482568808, 0.9782380919512346)
FROZEN_HYP_COS3_01 = 0.7980035919492488


def disk(R=1.0):
    return WeightedPlanarDomain(FourierSeries.constant(R))


def test_unit_disk_spectrum():
    sp = dtn_spectrum(disk(), modes=7)
    np.testing.assert_allclose(sp.eigenvalues, [0, 1, 1, 2, 2, 3, 3], atol=1e-10)
    assert sp.refinement_gap < 1e-10
    assert sp.asymmetry < 1e-10
    assert np.all(sp.residuals < 1e-12)


def test_constant_mode_density():
    sp = dtn_spectrum(disk(), modes=3)
    v = sp.eigendensities[:, 0]
    assert np.ptp(v) <= 1e-7 * np.max(np.abs(v))


@pytest.mark.parametrize("R", [0.5, 2.0, 3.0])
def test_disk_scaling(R):
    sp = dtn_spectrum(disk(R), modes=3)
    assert sp.nu1 == pytest.approx(1 / R, rel=1e-10)
    assert sp.nu2 == pytest.approx(1 / R, rel=1e-10)


def test_against_ritz_flat():
    sp = dtn_spectrum(WeightedPlanarDomain(FourierSeries.cosine(1.0, 0.1, 2)), modes=5)
    np.testing.assert_allclose(sp.eigenvalues[1:], FROZEN_FLAT_COS2_01, rtol=1e-11)


def test_against_ritz_hyperbolic():
    H = SpaceForm(1.0)
    sp = dtn_spectrum(conformal_model(StarDomain.perturbed(H, 1.0, 0.1, 2)), modes=3)
    np.testing.assert_allclose(sp.eigenvalues[1:], FROZEN_HYP_COS2_01, rtol=1e-11)
    assert nu1_domain(StarDomain.perturbed(H, 1.0, 0.1, 3)) == pytest.approx(FROZEN_HYP_COS3_01, rel=1e-11)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 3.0])
def test_hyperbolic_balls(R):
    assert nu1_domain(StarDomain.ball(SpaceForm(1.0), R)) == pytest.approx(1 / math.sinh(R), abs=1e-6)


def test_poincare_model_directly():
    # planar radius tanh(R/2) with weight 2/(1 - t^2): the classical disk model
    R = 1.7
    t = math.tanh(R / 2)
    dom = WeightedPlanarDomain(FourierSeries.constant(t), FourierSeries.constant(2 / (1 - t * t)))
    assert dom.weighted_length() == pytest.approx(2 * math.pi * math.sinh(R), rel=1e-12)
    assert dtn_spectrum(dom, modes=3).nu1 == pytest.approx(1 / math.sinh(R), rel=1e-10)


def test_spectral_convergence():
    dom = WeightedPlanarDomain(FourierSeries.cosine(1.0, 0.2, 3))
    a = dtn_spectrum(dom, modes=3, N=256).nu1
    b = dtn_spectrum(dom, modes=3, N=512).nu1
    assert abs(a - b) <= 1e-8


@settings(max_examples=8, deadline=None, derandomize=True)
@given(st.floats(0.0, 0.25), st.integers(2, 4), st.floats(0.5, 3.0))
def test_weight_and_scale_laws(eps, mode, c):
    dom = WeightedPlanarDomain(FourierSeries.cosine(1.0, eps, mode))
    base = dtn_spectrum(dom, modes=4, refine=False).eigenvalues
    heavy = dtn_spectrum(dom.reweighted(c), modes=4, refine=False).eigenvalues
    big = dtn_spectrum(dom.scaled(c), modes=4, refine=False).eigenvalues
    np.testing.assert_allclose(heavy[1:] * c, base[1:], rtol=1e-10)
    np.testing.assert_allclose(big[1:] * c, base[1:], rtol=1e-8)
    assert np.all(base >= -1e-9)


def test_hersch_payne():
    for rho in (FourierSeries.cosine(1.0, 0.3, 2), FourierSeries.cosine(1.0, 0.2, 3)):
        dom = WeightedPlanarDomain(rho)
        sp = dtn_spectrum(dom, modes=4)
        assert 1 / sp.nu1 + 1 / sp.nu2 >= dom.area() / math.pi - 1e-8


def test_symmetrized_operator():
    A, B, _ = dtn_matrices(WeightedPlanarDomain(FourierSeries(1.0, [0.1, 0.2], [0.05])), 128)
    assert np.abs(A - A.T).max() <= 1e-10 * np.abs(A).max()
    assert np.all(np.diag(B) > 0)


def test_under_resolved_grid_warns():
    dom = WeightedPlanarDomain(FourierSeries.cosine(1.0, 0.3, 10))
    with pytest.warns(AccuracyWarning):
        sp = dtn_spectrum(dom, modes=3, N=64)
    assert sp.warnings


def test_argument_checks():
    with pytest.raises(ValueError):
        dtn_spectrum(disk(), modes=200, N=256)
    with pytest.raises(ValueError):
        dtn_matrices(disk(), 255)
    with pytest.raises(InvalidModelError):
        WeightedPlanarDomain(FourierSeries.cosine(1.0, 1.5, 2))


def test_nu1_requires_constant_mode():
    sp = dtn_spectrum(disk(), modes=3)
    sp.eigenvalues = sp.eigenvalues + 1.0
    with pytest.raises(SteklovError):
        sp.nu1


def test_json_and_csv():
    sp = dtn_spectrum(disk(), modes=3)
    obj = json.loads(sp.to_json())
    assert set(obj) >= {"N", "eigenvalues", "refinement_gap"}
    assert sp.to_json() == dtn_spectrum(disk(), modes=3).to_json()
    rows = list(csv.reader(io.StringIO(sp.densities_csv())))
    assert rows[0] == ["theta", "mode0", "mode1", "mode2"] and len(rows) == 257


def test_conformal_model_flat_is_identity():
    dom = StarDomain.perturbed(SpaceForm(0.0), 1.0, 0.2, 3)
    pm = conformal_model(dom)
    t = np.linspace(0, 2 * np.pi, 9)
    np.testing.assert_allclose(pm.rho(t), dom.rho(t), atol=1e-14)
    np.testing.assert_allclose(pm.w(t), 1.0, atol=1e-14)


def test_conformal_model_hyperbolic_ball():
    R = 1.3
    pm = conformal_model(StarDomain.ball(SpaceForm(1.0), R))
    s = 2 * math.tanh(R / 2)
    assert pm.rho(0.0) == pytest.approx(s, rel=1e-14)
    assert pm.w(0.0) == pytest.approx(math.sinh(R) / s, rel=1e-14)
    assert pm.weighted_length() == pytest.approx(2 * math.pi * math.sinh(R), rel=1e-13)


def test_planar_radius_normalization():
    for amb in (SpaceForm(1.0), WarpedModel.sinh_scaled(1.2, -1.0)):
        assert planar_radius(amb, np.array([1e-4]))[0] / 1e-4 == pytest.approx(1.0, abs=1e-8)
    W = WarpedModel.sinh_scaled(1.0, -1.0)
    r = np.array([0.3, 1.0, 2.5])
    np.testing.assert_allclose(planar_radius(W, r), planar_radius(SpaceForm(1.0), r), rtol=1e-12)


def test_warped_ball_matches_space_form():
    W = WarpedModel.sinh_scaled(1.2, -1.0)
    assert nu1_domain(StarDomain.ball(W, 1.0)) == pytest.approx(1.2 / math.sinh(1.2), abs=1e-8)
