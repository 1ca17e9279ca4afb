"""Boundary-integral Steklov solver for weighted planar domains.

A curved 2D domain with metric ``e^{2f}|dz|^2`` has the same harmonic
functions as its planar image, so its Steklov problem becomes

    Delta u = 0 in D,    du/dn = nu * w * u on dD,    w = e^f on dD.

The Dirichlet-to-Neumann map is discretized with the Nystrom method on the
trapezoid grid, using the Kress product rule for the logarithmic singularity
of the single-layer kernel:

    S[du/dn] = (1/2 I + K)[u]  on dD,

and the Steklov pairs solve ``(W DtN) v = nu (W w) v`` with W the
quadrature weights.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, InvalidModelError, SteklovError
from .fourier import FourierSeries
from .numerics import TIGHT_QUAD, cumulative_integral, sym_generalized_eig
from .reports import dumps
from .spaces import SpaceForm, WarpedModel

DEFAULT_N = 256
ZERO_MODE_TOL = 1e-7
REFINE_WARN = 1e-4


class AccuracyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class WeightedPlanarDomain:
    """Planar domain ``|z| <= rho(theta)`` with boundary weight ``w(theta)``."""

    rho: FourierSeries
    w: FourierSeries = field(default_factory=lambda: FourierSeries(1.0))

    def __post_init__(self):
        t = 2 * np.pi * np.arange(512) / 512
        if np.min(self.rho(t)) <= 0:
            raise InvalidModelError("planar radius must be positive")
        if np.min(self.w(t)) <= 0:
            raise InvalidModelError("boundary weight must be positive")

    @property
    def highest_mode(self) -> int:
        return max(self.rho.highest_mode, self.w.highest_mode)

    def scaled(self, c: float) -> "WeightedPlanarDomain":
        return WeightedPlanarDomain(self.rho.scaled(c), self.w)

    def reweighted(self, c: float) -> "WeightedPlanarDomain":
        return WeightedPlanarDomain(self.rho, self.w.scaled(c))

    def area(self) -> float:
        """Planar area (unweighted)."""
        n = 4 * max(64, 8 * self.rho.highest_mode)
        t = 2 * np.pi * np.arange(n) / n
        return float(np.pi * np.mean(self.rho(t) ** 2))

    def weighted_length(self, n: int = 1024) -> float:
        t = 2 * np.pi * np.arange(n) / n
        r, dr = self.rho(t), self.rho(t, 1)
        return float(2 * np.pi * np.mean(self.w(t) * np.hypot(r, dr)))


@dataclass
class SteklovSpectrum:
    eigenvalues: np.ndarray
    eigendensities: np.ndarray  # nodal boundary values, one column per eigenvalue
    N: int
    theta: np.ndarray
    residuals: np.ndarray
    asymmetry: float
    refinement_gap: float = float("nan")
    warnings: list = field(default_factory=list)

    @property
    def nu0(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def nu1(self) -> float:
        """First nonzero eigenvalue (the constant mode is skipped)."""
        if abs(self.eigenvalues[0]) >= ZERO_MODE_TOL:
            raise SteklovError(f"no near-zero constant mode found (nu_0 = {self.eigenvalues[0]})")
        return float(self.eigenvalues[1])

    @property
    def nu2(self) -> float:
        self.nu1
        return float(self.eigenvalues[2])

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "refinement_gap": float(self.refinement_gap),
            "residuals": [float(x) for x in self.residuals],
            "asymmetry": float(self.asymmetry),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def densities_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["theta"] + [f"mode{i}" for i in range(self.eigendensities.shape[1])])
        for t, row in zip(self.theta, self.eigendensities):
            wr.writerow([repr(float(t))] + [repr(float(v)) for v in row])
        return buf.getvalue()


def _kress_weights(n: int) -> np.ndarray:
    """R_k for ``int log(4 sin^2((t - s)/2)) f(s) ds ~ sum_k R_{|i-k|} f(s_k)``."""
    N = 2 * n
    tk = np.pi * np.arange(N) / n
    m = np.arange(1, n)
    R = -(2 * np.pi / n) * (np.cos(np.outer(tk, m)) @ (1.0 / m)) - (np.pi / n**2) * np.cos(n * tk)
    return R


def _geometry(domain: WeightedPlanarDomain, N: int):
    t = 2 * np.pi * np.arange(N) / N
    r, dr, ddr = domain.rho(t), domain.rho(t, 1), domain.rho(t, 2)
    c, s = np.cos(t), np.sin(t)
    x = np.stack([r * c, r * s], axis=1)
    dx = np.stack([dr * c - r * s, dr * s + r * c], axis=1)
    ddx = np.stack([ddr * c - 2 * dr * s - r * c, ddr * s + 2 * dr * c - r * s], axis=1)
    speed = np.hypot(dx[:, 0], dx[:, 1])
    normal = np.stack([dx[:, 1], -dx[:, 0]], axis=1) / speed[:, None]
    kappa = (dx[:, 0] * ddx[:, 1] - dx[:, 1] * ddx[:, 0]) / speed**3
    return t, x, speed, normal, kappa


def dtn_matrices(domain: WeightedPlanarDomain, N: int):
    """Return (A, B, theta) with A the weighted DtN form and B the weighted mass."""
    if N % 2:
        raise ValueError("N must be even")
    n = N // 2
    t, x, speed, normal, kappa = _geometry(domain, N)
    h = np.pi / n
    diff = x[:, None, :] - x[None, :, :]  # x_i - x_j
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    idx = np.arange(N)
    dt = t[:, None] - t[None, :]
    sin2 = 4 * np.sin(dt / 2) ** 2
    np.fill_diagonal(sin2, 1.0)
    np.fill_diagonal(dist2, 1.0)
    # scale lengths so the logarithmic capacity of the curve is < 1 (S invertible)
    L = 2.0 * float(np.max(np.hypot(x[:, 0], x[:, 1])))
    M2 = -np.log(dist2 / sin2) / (4 * np.pi)
    M2[idx, idx] = -np.log(speed**2) / (4 * np.pi)
    Rw = _kress_weights(n)
    Rmat = Rw[np.abs(idx[:, None] - idx[None, :])]
    S = (-Rmat / (4 * np.pi) + h * M2 + h * math.log(L) / (2 * np.pi)) * speed[None, :]
    # double-layer kernel d/dn_y of -(1/2 pi) log|x - y|
    num = -np.einsum("ijk,jk->ij", -diff, normal)
    Kk = num / (2 * np.pi * dist2)
    Kk[idx, idx] = -kappa / (4 * np.pi)
    K = h * Kk * speed[None, :]
    rhs = 0.5 * np.eye(N) + K
    try:
        DtN = np.linalg.solve(S, rhs)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError("single-layer matrix is singular") from exc
    wq = h * speed
    A = wq[:, None] * DtN
    B = np.diag(domain.w(t) * wq)
    return A, B, t


def _solve(domain: WeightedPlanarDomain, modes: int, N: int):
    A, B, t = dtn_matrices(domain, N)
    scale = np.abs(A).max()
    asym = float(np.abs(A - A.T).max() / scale)
    As = 0.5 * (A + A.T)
    vals, V = sym_generalized_eig(As, B, count=modes)
    res = np.array([np.linalg.norm(As @ V[:, i] - vals[i] * (B @ V[:, i])) / (np.linalg.norm(As, 2) * np.linalg.norm(V[:, i]))
                    for i in range(len(vals))])
    return vals, V, t, res, asym


def dtn_spectrum(domain: WeightedPlanarDomain, modes: int = 6, N: int = DEFAULT_N, refine: bool = True) -> SteklovSpectrum:
    """Lowest ``modes`` weighted Steklov eigenpairs on an N-point boundary grid.

    With ``refine`` the problem is re-solved at N/2 and the change in nu_1
    is reported as ``refinement_gap``.
    """
    if modes >= N // 2:
        raise ValueError("modes must be below N/2")
    msgs = []
    hm = domain.highest_mode
    if N < 8 * hm:
        msgs.append(f"N = {N} below 8 x highest boundary mode ({hm})")
    vals, V, t, res, asym = _solve(domain, modes, N)
    spec = SteklovSpectrum(vals, V, N, t, res, asym, warnings=msgs)
    if refine and modes < N // 4:
        coarse, *_ = _solve(domain, modes, N // 2)
        k = 1 if modes > 1 else 0
        spec.refinement_gap = float(abs(coarse[k] - vals[k]))
        if spec.refinement_gap > REFINE_WARN:
            msgs.append(f"N vs N/2 disagreement {spec.refinement_gap:.3g} on nu_1")
    for m in msgs:
        warnings.warn(m, AccuracyWarning, stacklevel=2)
    return spec


# ---- conformal planar models ---------------------------------------------------


def planar_radius(ambient, r):
    """s(r) with s'/s = 1/psi and s(r)/r -> 1 at the pole."""
    r = np.asarray(r, dtype=float)
    if isinstance(ambient, SpaceForm):
        if ambient.delta == 0:
            return r.copy()
        d = ambient.delta
        return 2.0 / d * np.tanh(d * r / 2)
    if isinstance(ambient, WarpedModel):
        return _warped_planar_radius(ambient, r)
    raise TypeError(f"no conformal model for {type(ambient).__name__}")


_POLE_PANEL = 0.05
_GL_X, _GL_W = np.polynomial.legendre.leggauss(30)


def _log_ratio_near_pole(ambient, r):
    """``log(s(r)/r) = int_0^r (1/psi - 1/t) dt`` for r <= _POLE_PANEL.

    The integrand cancels near t = 0, which stalls adaptive refinement; it
    is analytic there, so one fixed Gauss panel is accurate to rounding.
    """
    t = 0.5 * r[:, None] * (_GL_X[None, :] + 1)
    vals = 1.0 / ambient.psi(t) - 1.0 / t
    return 0.5 * r * (vals @ _GL_W)


def _warped_planar_radius(ambient, r):
    r = np.asarray(r, dtype=float)
    flat = r.ravel()
    out = np.empty_like(flat)
    near = flat <= _POLE_PANEL
    if near.any():
        out[near] = flat[near] * np.exp(_log_ratio_near_pole(ambient, flat[near]))
    if (~near).any():
        r1 = np.array([_POLE_PANEL])
        log_s1 = math.log(_POLE_PANEL) + float(_log_ratio_near_pole(ambient, r1)[0])
        spec = type(TIGHT_QUAD)(abs_tol=0.0, rel_tol=1e-14, max_depth=40)
        tail = cumulative_integral(lambda t: 1.0 / ambient.psi(t), flat[~near], spec, start=_POLE_PANEL)
        out[~near] = np.exp(log_s1 + tail)
    return out.reshape(r.shape)


def conformal_model(domain, modes: int = 96, oversample: int = 4) -> WeightedPlanarDomain:
    """Planar image of a 2D star domain under geodesic polar -> planar polar
    ``(r, theta) -> (s(r), theta)``; boundary weight ``psi(rho)/s(rho)``."""
    amb = domain.ambient
    if amb.real_dim != 2:
        raise ValueError("conformal model requires a 2D ambient")
    M = 2 * oversample * modes
    t = 2 * np.pi * np.arange(M) / M
    rho = domain.rho(t)
    psi = np.asarray(amb.psi(rho), dtype=float)
    if np.any(psi <= 0):
        raise InvalidModelError("warp must be positive on the boundary")
    s = planar_radius(amb, rho)
    return WeightedPlanarDomain(
        FourierSeries.from_samples(s, modes).trimmed(),
        FourierSeries.from_samples(psi / s, modes).trimmed(),
    )


def nu1_domain(domain, N: int = DEFAULT_N) -> float:
    return dtn_spectrum(conformal_model(domain), modes=4, N=N).nu1
