"""First nonzero Steklov eigenvalue of geodesic balls.

Two independent routes are evaluated:

* ratio: ``g'(R)/g(R)`` for the radial profile g;
* integral: the Rayleigh quotient of ``g(r) x_i/r`` summed over i,
  ``int_0^R (g^2 lambda_1 + g'^2) phi dr / (g(R)^2 phi(R))``. The unit-sphere
  volume appears in numerator and denominator and cancels exactly.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional


from .errors import SteklovError
from .numerics import QuadratureSpec, integrate
from .radial import g_profile
from .reports import fmt
from .spaces import RankOneSpace, SpaceForm, SpaceModel

AGREEMENT_TOL = 1e-8
_QUAD = QuadratureSpec(abs_tol=0.0, rel_tol=1e-13, max_depth=40)


@dataclass(frozen=True)
class BallEigenResult:
    space: SpaceModel
    R: float
    nu1_ratio: float
    nu1_integral: float
    closed_form: Optional[float]
    agreement: float

    @property
    def consistent(self) -> bool:
        return self.agreement <= AGREEMENT_TOL


def closed_form_nu1(space: SpaceModel, R: float) -> Optional[float]:
    """Known closed forms: the round 2-sphere, constant-curvature planes, R^n."""
    if isinstance(space, SpaceForm):
        if space.delta == 0:
            return 1.0 / R
        if space.n == 2:
            return space.delta / math.sinh(space.delta * R)
        return None
    if isinstance(space, RankOneSpace) and space.k == 1 and space.n == 2:
        return 1.0 / (math.sinh(R) if space.noncompact else math.sin(R))
    return None


def nu1_ball(space: SpaceModel, R: float) -> BallEigenResult:
    """nu_1 of the geodesic ball of radius R about any point of ``space``."""
    prof = g_profile(space)
    space._check(R)
    gR = prof.g(R)
    ratio = prof.g_prime(R) / gR

    def f(r):
        return prof.integrand(r) * space.density(r)

    num = integrate(f, 0.0, R, _QUAD)
    integral = num / (gR**2 * space.density(R))
    return BallEigenResult(
        space=space,
        R=float(R),
        nu1_ratio=float(ratio),
        nu1_integral=float(integral),
        closed_form=closed_form_nu1(space, R),
        agreement=abs(ratio - integral) / abs(ratio),
    )


@dataclass(frozen=True)
class SweepEntry:
    R: float
    result: Optional[BallEigenResult]
    error: Optional[str] = None


def nu1_ball_sweep(space: SpaceModel, radii: Iterable[float], workers: int = 1) -> list:
    """One entry per radius, in input order; failures are recorded, not raised."""
    radii = [float(R) for R in radii]

    def one(R):
        try:
            return SweepEntry(R, nu1_ball(space, R))
        except SteklovError as exc:
            return SweepEntry(R, None, f"{type(exc).__name__}: {exc}")

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, radii))
    return [one(R) for R in radii]


CSV_COLUMNS = ("space", "R", "nu1_ratio", "nu1_integral", "closed_form", "agreement")


def sweep_to_csv(entries, space_label: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS + ("error",))
    for e in entries:
        res = e.result
        if res is None:
            w.writerow([space_label, fmt(e.R), "", "", "", "", e.error])
            continue
        cf = "" if res.closed_form is None else fmt(res.closed_form)
        w.writerow([space_label, fmt(res.R), fmt(res.nu1_ratio), fmt(res.nu1_integral), cf,
                    fmt(res.agreement), ""])
    return buf.getvalue()
