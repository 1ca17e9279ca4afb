"""Star-shaped domains in 2D constant-curvature and warped ambients.

A domain is ``{exp_b(r u(theta)) : r <= rho(theta)}`` about a base point b.
In a constant-curvature plane points are handled in model coordinates: the
Euclidean plane itself when ``delta == 0`` and the Poincare disk otherwise,
where the point at geodesic polar coordinates (r, theta) about the origin is
``tanh(delta r / 2) e^{i theta}``. Base points are given in the same model
coordinates.

Integrals over the domain are taken in polar coordinates about a centre p.
Instead of casting rays from p, the boundary keeps its parameterization by
the base-point angle theta and the polar angle about p, ``phi(theta)``, is
used as the change of variables; ``phi' > 0`` is exactly star-shapedness
about p.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .ball_eigen import nu1_ball
from .errors import (ConvergenceError, DomainError, GeometryError, HypothesisError,
                     UnsupportedOperationError)
from .fourier import FourierSeries
from .numerics import TIGHT_QUAD, cumulative_integral, integrate, integrate_periodic, newton_system
from .radial import RadialProfile, g_profile
from .reports import VerificationReport, dumps
from .spaces import (Field, RankOneSpace, SpaceForm, WarpedModel, curvature_check, named_space,
                     radius_for_volume, space_from_json)

DEFAULT_BOUNDARY_N = 256
MAX_MODES = 64
Ambient2D = Union[SpaceForm, WarpedModel]


def as_ambient(space) -> Ambient2D:
    """Accept a 2D space form, warped model, or the real hyperbolic plane."""
    if isinstance(space, str):
        space = named_space(space, 2)
    if isinstance(space, RankOneSpace):
        if space.field is Field.REAL and space.n == 2 and space.noncompact:
            return SpaceForm(1.0, 2)
        raise UnsupportedOperationError(f"{space.label} is not a supported 2D ambient")
    if space.real_dim != 2:
        raise UnsupportedOperationError("domains are two-dimensional")
    return space


@dataclass(frozen=True)
class StarDomain:
    ambient: Ambient2D
    rho: FourierSeries
    base_point: complex = 0j

    def __post_init__(self):
        amb = as_ambient(self.ambient)
        object.__setattr__(self, "ambient", amb)
        object.__setattr__(self, "base_point", complex(self.base_point))
        if self.rho.modes > MAX_MODES:
            object.__setattr__(self, "rho", FourierSeries.from_dict(self.rho.to_dict(), MAX_MODES))
        t = 2 * np.pi * np.arange(1024) / 1024
        r = self.rho(t)
        if np.min(r) <= 0:
            raise DomainError("rho must be positive")
        if np.max(r) >= amb.r_max:
            raise DomainError(f"rho exceeds the valid radius of {amb.label}")
        if isinstance(amb, WarpedModel) and self.base_point != 0:
            raise UnsupportedOperationError("warped ambients only support domains about the pole")
        if isinstance(amb, SpaceForm) and amb.delta > 0 and abs(self.base_point) >= 1:
            raise DomainError("base point must lie in the unit disk")

    @classmethod
    def ball(cls, ambient, R: float, base_point: complex = 0j) -> "StarDomain":
        return cls(ambient, FourierSeries.constant(R), base_point)

    @classmethod
    def perturbed(cls, ambient, R0: float, eps: float, mode: int = 2, base_point: complex = 0j) -> "StarDomain":
        """``rho(theta) = R0 (1 + eps cos(mode theta))``."""
        return cls(ambient, FourierSeries.cosine(R0, R0 * eps, mode), base_point)

    @property
    def is_round(self) -> bool:
        return self.rho.highest_mode == 0

    def to_dict(self) -> dict:
        return {
            "ambient": self.ambient.to_dict(),
            "rho_fourier": self.rho.to_dict(),
            "base_point": [self.base_point.real, self.base_point.imag],
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict, base_dir: Optional[Path] = None) -> "StarDomain":
        amb = obj.get("ambient", {"kind": "spaceform", "delta": 0.0})
        amb = named_space(amb, 2) if isinstance(amb, str) else space_from_json(amb, base_dir)
        bp = obj.get("base_point", [0.0, 0.0])
        return cls(amb, FourierSeries.from_dict(obj["rho_fourier"], MAX_MODES), complex(bp[0], bp[1]))

    @classmethod
    def from_json(cls, path) -> "StarDomain":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), path.parent)


def transplant(domain: StarDomain, target: SpaceForm) -> StarDomain:
    """Same radial function about the pole of ``target``."""
    return StarDomain(target, domain.rho)


# ---- boundary geometry ---------------------------------------------------------


@dataclass(frozen=True)
class BoundaryElement:
    """Boundary samples on the uniform theta grid (all fields are arrays)."""

    theta: np.ndarray
    r: np.ndarray
    ds_dtheta: np.ndarray
    sec_theta: np.ndarray

    @property
    def length(self) -> float:
        return float(2 * np.pi * np.mean(self.ds_dtheta))


def boundary_elements(domain: StarDomain, N: int = DEFAULT_BOUNDARY_N) -> BoundaryElement:
    t = 2 * np.pi * np.arange(N) / N
    r = domain.rho(t)
    dr = domain.rho(t, 1)
    psi = domain.ambient.psi(r)
    ds = np.sqrt(dr**2 + psi**2)
    return BoundaryElement(t, r, ds, ds / psi)


def _grid_size(domain: StarDomain, N: Optional[int]) -> int:
    return N or max(DEFAULT_BOUNDARY_N, 16 * domain.rho.highest_mode)


def _antiderivative_psi(ambient: Ambient2D, s):
    if isinstance(ambient, SpaceForm):
        d = ambient.delta
        if d == 0:
            return 0.5 * s**2
        return 2 * np.sinh(d * s / 2) ** 2 / d**2
    return cumulative_integral(ambient.psi, np.asarray(s, dtype=float), TIGHT_QUAD)


def volume(domain: StarDomain) -> float:
    """``int_0^{2 pi} int_0^{rho} psi(r) dr dtheta``."""

    def outer(t):
        return _antiderivative_psi(domain.ambient, domain.rho(t))

    return integrate_periodic(outer, rel_tol=1e-13)


def _dist_terms(delta, r1, r2, dtheta):
    s = np.sin(dtheta / 2) ** 2
    if delta == 0:
        return np.sqrt((r1 - r2) ** 2 + 4 * r1 * r2 * s)
    # sinh^2(delta d/2) without the cancellation of the cosine law
    h = np.sinh(delta * (r1 - r2) / 2) ** 2 + np.sinh(delta * r1) * np.sinh(delta * r2) * s
    return 2 / delta * np.arcsinh(np.sqrt(h))


def distance(ambient, a, b):
    """Geodesic distance between points given in polar coordinates (r, theta)
    about a common origin."""
    amb = as_ambient(ambient)
    if not isinstance(amb, SpaceForm):
        raise UnsupportedOperationError("distance needs a constant-curvature ambient")
    r1, t1 = a
    r2, t2 = b
    return _dist_terms(amb.delta, np.asarray(r1, float), np.asarray(r2, float), np.asarray(t1, float) - np.asarray(t2, float))


class _ModelPlane:
    """Isometries and distances of a constant-curvature plane in model coordinates."""

    def __init__(self, ambient: SpaceForm):
        self.delta = ambient.delta

    def from_polar(self, r, theta, base: complex):
        """Model point at geodesic polar (r, theta) about ``base``."""
        e = np.exp(1j * theta)
        if self.delta == 0:
            return base + r * e
        zeta = np.tanh(self.delta * r / 2) * e
        return (zeta + base) / (1 + np.conj(base) * zeta)

    def from_polar_derivative(self, r, dr, theta, base: complex):
        e = np.exp(1j * theta)
        if self.delta == 0:
            return (dr + 1j * r) * e
        d = self.delta
        t = np.tanh(d * r / 2)
        dzeta = (0.5 * d * (1 - t**2) * dr + 1j * t) * e
        zeta = t * e
        return dzeta * (1 - abs(base) ** 2) / (1 + np.conj(base) * zeta) ** 2

    def recenter(self, z, a: complex):
        """Isometry sending a to the origin, and its complex derivative."""
        if self.delta == 0:
            return z - a, np.ones_like(z)
        den = 1 - np.conj(a) * z
        return (z - a) / den, (1 - abs(a) ** 2) / den**2

    def radius(self, w):
        """Distance from the origin to the model point w."""
        if self.delta == 0:
            return np.abs(w)
        return 2 / self.delta * np.arctanh(np.abs(w))

    def inside(self, a: complex) -> bool:
        return self.delta == 0 or abs(a) < 1


@dataclass
class _Polar:
    """Boundary seen from a centre p."""

    r: np.ndarray  # distance to p
    direction: np.ndarray  # unit vector at p (complex)
    dphi: np.ndarray  # d(polar angle about p)/d theta
    ds: np.ndarray  # arc length density in theta


def _boundary_about(domain: StarDomain, a: complex, N: int) -> _Polar:
    plane = _ModelPlane(domain.ambient)
    t = 2 * np.pi * np.arange(N) / N
    r, dr = domain.rho(t), domain.rho(t, 1)
    z = plane.from_polar(r, t, domain.base_point)
    dz = plane.from_polar_derivative(r, dr, t, domain.base_point)
    w, dw_dz = plane.recenter(z, a)
    if np.any(np.abs(w) == 0):
        raise GeometryError("centre lies on the boundary")
    dw = dw_dz * dz
    psi = domain.ambient.psi(r)
    return _Polar(plane.radius(w), w / np.abs(w), (dw / w).imag, np.sqrt(dr**2 + psi**2))


def _profile_fn(weight) -> Callable:
    if isinstance(weight, RadialProfile):
        return weight.g
    return weight


@dataclass(frozen=True)
class CenterOfMass:
    point: complex  # model coordinates
    r: float  # polar coordinates about the base point
    theta: float
    residual: float
    iterations: int
    tolerance: float

    def to_dict(self) -> dict:
        return {"point": [self.point.real, self.point.imag], "r": self.r, "theta": self.theta,
                "residual": self.residual, "iterations": self.iterations}


def _polar_of(domain: StarDomain, a: complex):
    plane = _ModelPlane(domain.ambient)
    w, _ = plane.recenter(np.asarray([a]), domain.base_point)
    w = complex(w[0])
    return float(plane.radius(abs(w))), float(np.angle(w)) if w != 0 else 0.0


def _check_star(pol: _Polar, where: str):
    if np.min(pol.dphi) <= 0:
        raise GeometryError(f"domain is not star-shaped about {where}")
    winding = np.mean(pol.dphi)
    if abs(winding - 1) > 1e-8:
        raise GeometryError(f"{where} lies outside the domain")


def center_of_mass(domain: StarDomain, weight=None, N: Optional[int] = None,
                   start: Optional[complex] = None) -> CenterOfMass:
    """Point p where ``int_M g(d(p,q)) X/|X| dm(q)`` vanishes.

    ``weight`` is a RadialProfile or any callable g(r); it defaults to the
    ambient profile. Solved by damped Newton from the base point.
    """
    amb = domain.ambient
    if not isinstance(amb, SpaceForm):
        raise UnsupportedOperationError("center of mass needs a constant-curvature ambient")
    g = _profile_fn(weight if weight is not None else g_profile(amb))
    N = _grid_size(domain, N)
    plane = _ModelPlane(amb)
    h = 2 * np.pi / N

    def moment(x):
        a = complex(x[0], x[1])
        if not plane.inside(a):
            return np.array([np.nan, np.nan])
        pol = _boundary_about(domain, a, N)
        m = np.sum(g(pol.r) * pol.direction * pol.ds) * h
        return np.array([m.real, m.imag])

    be = boundary_elements(domain, N)
    gmax = float(np.max(g(be.r + _ModelPlane(amb).radius(abs(domain.base_point)))))
    scale = be.length * gmax
    limit = 1e-10 * scale
    a0 = domain.base_point if start is None else complex(start)
    try:
        x, res, its = newton_system(moment, [a0.real, a0.imag], tol=1e-14 * scale, max_iter=50)
    except ConvergenceError as exc:
        x = exc.best
        res = float(np.linalg.norm(moment(x)))
        its = len(exc.trace or [])
        if not res <= limit:
            raise
    a = complex(x[0], x[1])
    _check_star(_boundary_about(domain, a, N), "the center of mass")
    r, th = _polar_of(domain, a)
    return CenterOfMass(a, r, th, float(res), int(its), limit)


# ---- trial bounds ------------------------------------------------------------------


@dataclass
class TrialBoundReport:
    domain: StarDomain
    center: CenterOfMass
    numerator: float
    denominator: float
    volume: float
    R_vol: float
    ball_nu1: float
    oracle_nu1: Optional[float] = None

    @property
    def bound(self) -> float:
        return self.numerator / self.denominator

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "center": self.center.to_dict(),
            "numerator": self.numerator,
            "denominator": self.denominator,
            "bound": self.bound,
            "volume": self.volume,
            "R_vol": self.R_vol,
            "ball_nu1": self.ball_nu1,
            "oracle_nu1": self.oracle_nu1,
        }


def _dirichlet_integral(prof: RadialProfile, ambient: SpaceForm, radii):
    """``H(s) = int_0^s (g^2 lambda_1 + g'^2) psi`` at each radius."""

    def f(r):
        return prof.integrand(r) * ambient.psi(r)

    return cumulative_integral(f, radii, TIGHT_QUAD)


def trial_bound_rank1(domain: StarDomain, N: Optional[int] = None, oracle: bool = False,
                      center: Optional[CenterOfMass] = None) -> TrialBoundReport:
    """Rayleigh quotient of the test functions ``g(r) x_i / r`` about the
    center of mass; an upper bound for nu_1 of the domain."""
    amb = domain.ambient
    if not isinstance(amb, SpaceForm):
        raise UnsupportedOperationError("trial bound needs a constant-curvature ambient")
    prof = g_profile(amb)
    N = _grid_size(domain, N)
    com = center if center is not None else center_of_mass(domain, prof, N)
    pol = _boundary_about(domain, com.point, N)
    _check_star(pol, "the center of mass")
    h = 2 * np.pi / N
    num = float(np.sum(_dirichlet_integral(prof, amb, pol.r) * pol.dphi) * h)
    den = float(np.sum(prof.g(pol.r) ** 2 * pol.ds) * h)
    vol = volume(domain)
    R_vol = radius_for_volume(amb, vol)
    rep = TrialBoundReport(domain, com, num, den, vol, R_vol, nu1_ball(amb, R_vol).nu1_ratio)
    if oracle:
        from .steklov2d import nu1_domain

        rep.oracle_nu1 = nu1_domain(domain)
    return rep


def lemma2_check(domain: StarDomain, profile: Optional[RadialProfile] = None, center: str = "center",
                 N: Optional[int] = None) -> VerificationReport:
    """Compare ``int_M g^2(d(p,q)) dm`` with ``|S(R)| g^2(R)`` where R is the
    equal-volume radius and p the center of mass or the base point."""
    amb = domain.ambient
    if not isinstance(amb, SpaceForm):
        raise UnsupportedOperationError("needs a constant-curvature ambient")
    prof = profile if profile is not None else g_profile(amb)
    N = _grid_size(domain, N)
    if center == "center":
        p = center_of_mass(domain, prof, N).point
    elif center == "base":
        p = domain.base_point
    else:
        raise ValueError("center must be 'center' or 'base'")
    pol = _boundary_about(domain, p, N)
    lhs = float(np.sum(prof.g(pol.r) ** 2 * pol.ds) * 2 * np.pi / N)
    R = radius_for_volume(amb, volume(domain))
    rhs = float(2 * np.pi * amb.psi(R) * prof.g(R) ** 2)
    margin = lhs - rhs
    centered_ball = domain.is_round and abs(p - domain.base_point) <= 1e-12
    rep = VerificationReport("lemma2", meta={"ambient": amb.label, "center": center, "R": R})
    rep.add("boundary g^2 >= sphere g^2", margin >= -1e-9 * rhs, margin, lhs=lhs, rhs=rhs,
            equality=bool(centered_ball and abs(margin) <= 1e-9 * rhs))
    return rep


# ---- curvature-bound comparison ------------------------------------------------------


@dataclass(frozen=True)
class CkResult:
    C_k: float
    R_k: float
    R_k_prime: float
    volume: float
    volume_transplanted: float
    boundary_ratio: float  # g^2 psi at R_k over the same at R_k'
    energy_ratio: float  # ambient ball energy over space-form ball energy
    delta: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("C_k", "R_k", "R_k_prime", "volume", "volume_transplanted",
                                               "boundary_ratio", "energy_ratio", "delta")}


def _comparison_form(domain: StarDomain, k: Optional[float]) -> SpaceForm:
    amb = domain.ambient
    if k is None:
        k = amb.curvature_bound if isinstance(amb, WarpedModel) else amb.curvature
    if k > 0:
        raise UnsupportedOperationError("only curvature bounds k <= 0 are supported")
    if isinstance(amb, WarpedModel):
        rmax = float(np.max(domain.rho(2 * np.pi * np.arange(1024) / 1024)))
        chk = curvature_check(WarpedModel(amb.n, amb.psi_fn, k, amb.psi_prime_fn, amb.psi_double_prime_fn,
                                          amb.spec, amb.r_max), 2 * rmax)
        if not chk.passed:
            raise HypothesisError(f"radial curvature exceeds k = {k}: {chk.summary()}")
    elif amb.curvature > k + 1e-12:
        raise HypothesisError(f"ambient curvature {amb.curvature} exceeds k = {k}")
    if domain.base_point != 0:
        raise UnsupportedOperationError("comparison requires a domain about the pole")
    return SpaceForm(math.sqrt(-k), 2)


def compute_Ck(domain: StarDomain, k: Optional[float] = None) -> CkResult:
    """Comparison constant relating nu_1 of the domain to the equal-volume
    ball of the comparison space form. ``k`` defaults to the model's bound."""
    target = _comparison_form(domain, k)
    prof = g_profile(target)
    vol = volume(domain)
    vol_k = volume(transplant(domain, target))
    R_k = radius_for_volume(target, vol)
    R_kp = radius_for_volume(target, vol_k)

    def boundary(R):
        return prof.g(R) ** 2 * target.psi(R)

    spec = type(TIGHT_QUAD)(abs_tol=0.0, rel_tol=1e-13, max_depth=40)
    e_amb = integrate(lambda r: prof.integrand(r) * domain.ambient.psi(r), 0.0, R_k, spec)
    e_k = integrate(lambda r: prof.integrand(r) * target.psi(r), 0.0, R_k, spec)
    b = float(boundary(R_k) / boundary(R_kp))
    e = e_amb / e_k
    return CkResult(b * e, R_k, R_kp, vol, vol_k, b, e, target.delta)


def trial_bound_curvature(domain: StarDomain, k: Optional[float] = None, oracle: bool = False):
    """``C_k nu_1(B_k(R_k))`` with its ingredients; returns (bound, report)."""
    ck = compute_Ck(domain, k)
    target = SpaceForm(ck.delta, 2)
    ball = nu1_ball(target, ck.R_k).nu1_ratio
    bound = ck.C_k * ball
    rep = VerificationReport("curvature_bound", meta={"ambient": domain.ambient.label, **ck.to_dict(),
                                                      "ball_nu1": ball, "bound": bound})
    rep.add("C_k >= 1", ck.C_k >= 1 - 1e-12, ck.C_k - 1)
    if oracle:
        from .steklov2d import nu1_domain

        nu = nu1_domain(domain)
        rep.meta["oracle_nu1"] = nu
        rep.add("oracle <= bound", nu <= bound + 1e-8, bound - nu)
    return bound, rep
