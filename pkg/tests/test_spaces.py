import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steklov.errors import DomainError, InvalidModelError, PoleError
from steklov.spaces import (Field, RankOneSpace, Sign, SpaceForm, WarpedModel, ball_volume, curvature_check,
                            density, lambda1_sphere, mean_curvature, named_space, radius_for_volume,
                            space_from_json, space_to_json, sphere_volume, unit_sphere_volume)

ALL_NONCOMPACT = ([RankOneSpace(Field.REAL, n) for n in (2, 3, 5)]
                  + [RankOneSpace(Field.COMPLEX, n) for n in (2, 3)]
                  + [RankOneSpace(Field.QUATERNION, 2), RankOneSpace(Field.CAYLEY, 2)])


def test_real_hyperbolic_plane_formulas():
    H = RankOneSpace(Field.REAL, 2)
    r = np.array([0.3, 1.0, 2.0])
    np.testing.assert_allclose(density(H, r), np.sinh(r))
    np.testing.assert_allclose(mean_curvature(H, r), 1 / np.tanh(r))
    np.testing.assert_allclose(lambda1_sphere(H, r), 1 / np.sinh(r) ** 2)


def test_complex_hyperbolic_density():
    CH2 = RankOneSpace(Field.COMPLEX, 2)
    assert CH2.real_dim == 4 and CH2.k == 2
    r = 0.7
    assert density(CH2, r) == pytest.approx(math.sinh(r) ** 3 * math.cosh(r))
    assert lambda1_sphere(CH2, r) == pytest.approx(3 / math.sinh(r) ** 2 - 1 / math.cosh(r) ** 2)


@pytest.mark.parametrize("space", ALL_NONCOMPACT, ids=lambda s: s.label)
def test_mean_curvature_is_log_derivative(space):
    r = np.linspace(0.2, 4.0, 9)
    h = 1e-5
    fd = (np.log(density(space, r + h)) - np.log(density(space, r - h))) / (2 * h)
    np.testing.assert_allclose(mean_curvature(space, r), fd, rtol=1e-8)


@pytest.mark.parametrize("space", ALL_NONCOMPACT, ids=lambda s: s.label)
def test_sphere_identity(space):
    # -d/dr TrA = lambda_1 on rank-one spaces
    r = np.linspace(0.2, 4.0, 9)
    np.testing.assert_allclose(-space.mean_curvature_prime(r), space.lambda1_sphere(r), rtol=1e-12)


def test_compact_window():
    S2 = RankOneSpace(Field.REAL, 2, Sign.COMPACT)
    assert S2.r_max == math.pi
    CP2 = RankOneSpace(Field.COMPLEX, 2, Sign.COMPACT)
    assert CP2.r_max == pytest.approx(math.atan(math.sqrt(5)))
    with pytest.raises(DomainError):
        density(S2, 3.5)


def test_pole_and_negative_radius():
    H = RankOneSpace(Field.REAL, 2)
    with pytest.raises(PoleError):
        mean_curvature(H, 0.0)
    with pytest.raises(DomainError):
        density(H, -0.1)
    assert density(H, 0.0) == 0.0


def test_sphere_and_ball_volume():
    H = RankOneSpace(Field.REAL, 2)
    assert sphere_volume(H, 1.0) == pytest.approx(2 * math.pi * math.sinh(1.0))
    assert ball_volume(H, 1.0) == pytest.approx(2 * math.pi * (math.cosh(1.0) - 1), rel=1e-13)
    R3 = SpaceForm(0.0, 3)
    assert ball_volume(R3, 2.0) == pytest.approx(4 / 3 * math.pi * 8, rel=1e-13)
    assert unit_sphere_volume(2) == pytest.approx(4 * math.pi)


def test_space_form_closed_volume():
    M = SpaceForm(1.5)
    r = np.array([0.1, 1.0, 3.0])
    np.testing.assert_allclose(M.ball_volume(r), M.ball_volume_closed(r), rtol=1e-13)


@settings(max_examples=25, deadline=None, derandomize=True)
@given(st.floats(0.05, 4.0))
def test_radius_for_volume_roundtrip(R):
    for sp in (RankOneSpace(Field.REAL, 2), SpaceForm(0.0, 3), RankOneSpace(Field.COMPLEX, 2)):
        assert radius_for_volume(sp, sp.ball_volume(R)) == pytest.approx(R, rel=1e-12)


def test_radius_for_volume_errors():
    S2 = RankOneSpace(Field.REAL, 2, Sign.COMPACT)
    with pytest.raises(DomainError):
        radius_for_volume(S2, 100.0)
    with pytest.raises(DomainError):
        radius_for_volume(S2, -1.0)


def test_warped_model_sinh_is_hyperbolic():
    W = WarpedModel.sinh_scaled(1.0, -1.0)
    H = SpaceForm(1.0)
    r = np.linspace(0.1, 3, 7)
    np.testing.assert_allclose(W.lambda1_sphere(r), H.lambda1_sphere(r))
    np.testing.assert_allclose(W.ball_volume(r), H.ball_volume_closed(r), rtol=1e-13)


def test_warped_model_finite_difference_derivatives():
    W = WarpedModel(2, lambda r: np.sinh(1.2 * r) / 1.2, -1.0)
    r = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(W.psi_prime(r), np.cosh(1.2 * r), rtol=1e-9)
    np.testing.assert_allclose(W.radial_curvature(r), -1.44, rtol=1e-6)


def test_warped_model_validation():
    with pytest.raises(InvalidModelError):
        WarpedModel(2, lambda r: np.sinh(r) + 1.0)
    with pytest.raises(InvalidModelError):
        WarpedModel(2, lambda r: 2 * r)


def test_warp_table_roundtrip(tmp_path):
    r = np.linspace(0, 3, 301)
    path = tmp_path / "warp.csv"
    path.write_text("r,psi\n" + "\n".join(f"{a!r},{b!r}" for a, b in zip(r.tolist(), np.sinh(r).tolist())))
    W = space_from_json({"kind": "warped", "warp": "table", "path": "warp.csv", "k": -1.0}, tmp_path)
    assert W.psi(1.5) == pytest.approx(math.sinh(1.5), rel=1e-5)
    assert W.to_dict()["path"] == "warp.csv"


def test_warp_table_empty(tmp_path):
    path = tmp_path / "warp.csv"
    path.write_text("r,psi\n")
    with pytest.raises(InvalidModelError):
        space_from_json({"kind": "warped", "warp": "table", "path": str(path)})


def test_curvature_check():
    W = WarpedModel.sinh_scaled(1.2, -1.0)
    rep = curvature_check(W, 3.0)
    assert rep.passed and rep["K <= k"].margin == pytest.approx(0.44)
    bad = WarpedModel.sinh_scaled(0.8, -1.0)
    assert not curvature_check(bad, 3.0).passed


@pytest.mark.parametrize("name,n,label", [("H2", None, "RH^2"), ("S2", None, "S^2"), ("Rn", 3, "R^3"),
                                          ("CHn", 3, "CH^3"), ("HH2", None, "HH^2"), ("CaH2", None, "CaH^2"),
                                          ("CP2", None, "CP^2"), ("CaP2", None, "CaP^2")])
def test_named_spaces(name, n, label):
    assert named_space(name, n).label == label


def test_named_space_errors():
    with pytest.raises(ValueError):
        named_space("Rn")
    with pytest.raises(ValueError):
        named_space("XY3")


@pytest.mark.parametrize("space", [RankOneSpace(Field.COMPLEX, 3), SpaceForm(0.5, 2),
                                   RankOneSpace(Field.REAL, 2, Sign.COMPACT), WarpedModel.sinh_scaled(1.2, -1.0)],
                         ids=str)
def test_json_roundtrip(space):
    obj = json.loads(json.dumps(space_to_json(space)))
    back = space_from_json(obj)
    assert back.label == space.label
    assert back.density(0.8) == pytest.approx(space.density(0.8), rel=1e-15)
