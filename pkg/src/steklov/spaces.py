"""Ambient geometries and their radial data.

Three kinds of model are supported:

* :class:`RankOneSpace` -- real/complex/quaternionic hyperbolic spaces, the
  Cayley hyperbolic plane and their compact duals, with curvature normalized
  to ``-4 <= K <= -1`` (noncompact) or ``1 <= K <= 4`` (compact);
* :class:`SpaceForm` -- simply connected space of constant curvature
  ``-delta**2`` (``delta = 0`` is Euclidean space);
* :class:`WarpedModel` -- rotationally symmetric metric ``dr^2 + psi(r)^2 dtheta^2``.

Every model exposes the volume density ``phi`` along radial geodesics, the
mean curvature ``phi'/phi`` of geodesic spheres and the first nonzero
eigenvalue of the Laplacian on those spheres. All methods accept scalars or
numpy arrays.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, InvalidModelError, PoleError
from .numerics import TIGHT_QUAD, RootSpec, cumulative_integral, find_root
from .reports import VerificationReport


class Field(enum.Enum):
    REAL = ("R", 1)
    COMPLEX = ("C", 2)
    QUATERNION = ("H", 4)
    CAYLEY = ("Ca", 8)

    @property
    def code(self) -> str:
        return self.value[0]

    @property
    def dim(self) -> int:
        return self.value[1]

    @classmethod
    def parse(cls, code: Union[str, "Field"]) -> "Field":
        if isinstance(code, Field):
            return code
        for f in cls:
            if f.code.lower() == str(code).lower() or f.name.lower() == str(code).lower():
                return f
        raise ValueError(f"unknown field {code!r}")


class Sign(enum.Enum):
    COMPACT = "compact"
    NONCOMPACT = "noncompact"


def _asarray(r):
    return np.asarray(r, dtype=float)


def _out(x, like):
    # scalar in -> float out
    return float(x) if np.ndim(like) == 0 else x


def sin_delta(delta: float, r):
    """``sinh(delta r)/delta`` for delta > 0, ``r`` for delta = 0."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    r_ = _asarray(r)
    if delta == 0:
        return _out(r_.copy(), r)
    return _out(np.sinh(delta * r_) / delta, r)


def unit_sphere_volume(m: int) -> float:
    """Volume of the unit m-sphere in R^(m+1)."""
    return 2.0 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


class _RadialModel:
    """Shared plumbing; subclasses supply density/curvature formulas."""

    real_dim: int
    r_max: float = math.inf
    # True when -d/dr TrA equals lambda_1(S(r)) (rank-one spaces, space forms)
    has_sphere_identity: bool = True
    noncompact: bool = True

    def _check(self, r, allow_pole=False):
        r_ = _asarray(r)
        if np.any(r_ < 0) or np.any(~np.isfinite(r_)):
            raise DomainError("radius must be finite and non-negative")
        if np.any(r_ >= self.r_max):
            raise DomainError(f"radius outside the valid window r < {self.r_max} for {self.label}")
        if not allow_pole and np.any(r_ == 0):
            raise PoleError(f"quantity diverges at the pole r = 0 for {self.label}")
        return r_

    @property
    def omega(self) -> float:
        return unit_sphere_volume(self.real_dim - 1)

    def radial_integral(self, r):
        """``int_0^r phi`` (vectorized)."""
        r_ = self._check(r, allow_pole=True)
        return _out(cumulative_integral(self._density, r_, TIGHT_QUAD), r)

    def density(self, r):
        r_ = self._check(r, allow_pole=True)
        return _out(self._density(r_), r)

    def mean_curvature(self, r):
        r_ = self._check(r)
        return _out(self._mean_curvature(r_), r)

    def mean_curvature_prime(self, r):
        r_ = self._check(r)
        return _out(self._mean_curvature_prime(r_), r)

    def lambda1_sphere(self, r):
        r_ = self._check(r)
        return _out(self._lambda1(r_), r)

    def sphere_volume(self, r):
        return self.omega * self.density(r)

    def ball_volume(self, r):
        return self.omega * self.radial_integral(r)


@dataclass(frozen=True)
class RankOneSpace(_RadialModel):
    """Rank-one symmetric space ``K P^n`` (compact) or ``K H^n`` (noncompact)."""

    field: Field
    n: int
    sign: Sign = Sign.NONCOMPACT

    def __post_init__(self):
        object.__setattr__(self, "field", Field.parse(self.field))
        object.__setattr__(self, "sign", Sign(self.sign))
        if self.n < 1:
            raise ValueError("base dimension must be positive")
        if self.field is Field.CAYLEY and self.n != 2:
            raise ValueError("the Cayley plane requires n = 2")
        if self.real_dim < 2:
            raise ValueError("real dimension must be at least 2")

    @property
    def k(self) -> int:
        return self.field.dim

    @property
    def real_dim(self) -> int:
        return self.k * self.n

    @property
    def noncompact(self) -> bool:
        return self.sign is Sign.NONCOMPACT

    @property
    def r_max(self) -> float:
        if self.noncompact:
            return math.inf
        if self.k == 1:
            # the arctan window degenerates at k = 1; r < pi is our reading for spheres
            return math.pi
        return math.atan(math.sqrt((self.real_dim + 1) / (self.k - 1)))

    @property
    def label(self) -> str:
        if self.noncompact:
            return f"{self.field.code}H^{self.n}"
        if self.k == 1:
            return f"S^{self.n}"
        return f"{self.field.code}P^{self.n}"

    @property
    def series_a(self) -> float:
        """``phi(r) = r^(d-1) (1 + a r^2 + O(r^4))``."""
        a = (self.real_dim - 1) / 6 + (self.k - 1) / 2
        return a if self.noncompact else -a

    def _density(self, r):
        d, k = self.real_dim, self.k
        if self.noncompact:
            return np.sinh(r) ** (d - 1) * np.cosh(r) ** (k - 1)
        return np.sin(r) ** (d - 1) * np.cos(r) ** (k - 1)

    def _mean_curvature(self, r):
        d, k = self.real_dim, self.k
        if self.noncompact:
            return (d - 1) / np.tanh(r) + (k - 1) * np.tanh(r)
        return (d - 1) / np.tan(r) - (k - 1) * np.tan(r)

    def _mean_curvature_prime(self, r):
        d, k = self.real_dim, self.k
        if self.noncompact:
            return -(d - 1) / np.sinh(r) ** 2 + (k - 1) / np.cosh(r) ** 2
        return -(d - 1) / np.sin(r) ** 2 - (k - 1) / np.cos(r) ** 2

    def _lambda1(self, r):
        d, k = self.real_dim, self.k
        if self.noncompact:
            return (d - 1) / np.sinh(r) ** 2 - (k - 1) / np.cosh(r) ** 2
        return (d - 1) / np.sin(r) ** 2 + (k - 1) / np.cos(r) ** 2

    def to_dict(self) -> dict:
        return {"kind": "rank1", "field": self.field.code, "n": self.n, "sign": self.sign.value}


@dataclass(frozen=True)
class SpaceForm(_RadialModel):
    """Constant curvature ``-delta**2`` in dimension n."""

    delta: float
    n: int = 2

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def real_dim(self) -> int:
        return self.n

    @property
    def curvature(self) -> float:
        return -self.delta**2

    @property
    def label(self) -> str:
        if self.delta == 0:
            return f"R^{self.n}"
        return f"M^{self.n}({fmt_curv(self.curvature)})"

    @property
    def series_a(self) -> float:
        return (self.n - 1) * self.delta**2 / 6

    def psi(self, r):
        return sin_delta(self.delta, r)

    def psi_prime(self, r):
        return np.cosh(self.delta * _asarray(r))

    def _density(self, r):
        return sin_delta(self.delta, r) ** (self.n - 1)

    def _mean_curvature(self, r):
        if self.delta == 0:
            return (self.n - 1) / r
        return (self.n - 1) * self.delta / np.tanh(self.delta * r)

    def _mean_curvature_prime(self, r):
        if self.delta == 0:
            return -(self.n - 1) / r**2
        return -(self.n - 1) * self.delta**2 / np.sinh(self.delta * r) ** 2

    def _lambda1(self, r):
        return (self.n - 1) / sin_delta(self.delta, r) ** 2

    def ball_volume_closed(self, r):
        """Closed form for n = 2 only: ``2 pi (cosh(delta r) - 1)/delta^2``."""
        if self.n != 2:
            raise NotImplementedError("closed-form volume implemented for n = 2")
        r_ = _asarray(r)
        if self.delta == 0:
            return _out(np.pi * r_**2, r)
        return _out(4 * np.pi * np.sinh(self.delta * r_ / 2) ** 2 / self.delta**2, r)

    def to_dict(self) -> dict:
        return {"kind": "spaceform", "delta": self.delta, "n": self.n}


def fmt_curv(k: float) -> str:
    return repr(float(k))


def _fd1(f, r):
    h = 1e-3 * np.maximum(1.0, np.abs(r))
    return (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) / (12 * h)


def _fd2(f, r):
    h = 1e-3 * np.maximum(1.0, np.abs(r))
    return (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h**2)


@dataclass(frozen=True)
class WarpedModel(_RadialModel):
    """Rotationally symmetric model ``dr^2 + psi(r)^2 g_{S^{n-1}}``.

    ``psi_prime``/``psi_double_prime`` are optional analytic derivatives; when
    absent a fourth-order central difference is used (psi must then be
    evaluable slightly beyond the queried radii, including r < 0 near the pole).
    ``curvature_bound`` is the constant k of the hypothesis ``K <= k``.
    """

    n: int
    psi_fn: Callable
    curvature_bound: float = 0.0
    psi_prime_fn: Optional[Callable] = None
    psi_double_prime_fn: Optional[Callable] = None
    spec: dict = field(default_factory=dict, compare=False)
    r_max: float = math.inf

    has_sphere_identity = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        if self.curvature_bound > 0:
            raise ValueError("only curvature bounds k <= 0 are supported")
        p0 = float(self.psi_fn(np.asarray(0.0)))
        dp0 = float(self.psi_prime(0.0))
        if abs(p0) > 1e-12 or abs(dp0 - 1) > 1e-6:
            raise InvalidModelError(f"warp must satisfy psi(0)=0, psi'(0)=1 (got {p0}, {dp0})")

    @property
    def real_dim(self) -> int:
        return self.n

    @property
    def delta(self) -> float:
        return math.sqrt(-self.curvature_bound)

    @property
    def label(self) -> str:
        return self.spec.get("label", "warped")

    def psi(self, r):
        r_ = _asarray(r)
        return _out(np.asarray(self.psi_fn(r_), dtype=float), r)

    def psi_prime(self, r):
        r_ = _asarray(r)
        if self.psi_prime_fn is not None:
            return _out(np.asarray(self.psi_prime_fn(r_), dtype=float), r)
        return _out(_fd1(self.psi_fn, r_), r)

    def psi_double_prime(self, r):
        r_ = _asarray(r)
        if self.psi_double_prime_fn is not None:
            return _out(np.asarray(self.psi_double_prime_fn(r_), dtype=float), r)
        if self.psi_prime_fn is not None:
            return _out(_fd1(self.psi_prime_fn, r_), r)
        return _out(_fd2(self.psi_fn, r_), r)

    def radial_curvature(self, r):
        return -self.psi_double_prime(r) / self.psi(r)

    def _density(self, r):
        return np.asarray(self.psi_fn(r), dtype=float) ** (self.n - 1)

    def _mean_curvature(self, r):
        return (self.n - 1) * self.psi_prime(r) / self.psi(r)

    def _mean_curvature_prime(self, r):
        p, dp, ddp = self.psi(r), self.psi_prime(r), self.psi_double_prime(r)
        return (self.n - 1) * (ddp * p - dp**2) / p**2

    def _lambda1(self, r):
        return (self.n - 1) / self.psi(r) ** 2

    @classmethod
    def sinh_scaled(cls, scale: float, curvature_bound: float, n: int = 2) -> "WarpedModel":
        """``psi(r) = sinh(scale r)/scale``: constant curvature ``-scale**2``."""
        a = float(scale)
        return cls(
            n=n,
            psi_fn=lambda r: np.sinh(a * r) / a,
            psi_prime_fn=lambda r: np.cosh(a * r),
            psi_double_prime_fn=lambda r: a * np.sinh(a * r),
            curvature_bound=curvature_bound,
            spec={"warp": "sinh_scaled", "scale": a, "label": f"warped(sinh({a!r} r)/{a!r})"},
        )

    @classmethod
    def from_table(cls, r, psi, curvature_bound: float = 0.0, n: int = 2, source: Optional[str] = None):
        """Tabulated warp interpolated by a cubic spline (derivatives from the spline)."""
        r = np.asarray(r, dtype=float)
        psi = np.asarray(psi, dtype=float)
        order = np.argsort(r)
        r, psi = r[order], psi[order]
        if r[0] != 0.0 or psi[0] != 0.0:
            raise InvalidModelError("tabulated warp must start at (0, 0)")
        if np.any(psi[1:] <= 0):
            raise InvalidModelError("tabulated warp must be positive for r > 0")
        spline = CubicSpline(r, psi, bc_type=((1, 1.0), "not-a-knot"))
        d1, d2 = spline.derivative(1), spline.derivative(2)
        spec = {"warp": "table", "label": "warped(table)"}
        if source is not None:
            spec["path"] = source
        else:
            spec["table"] = np.column_stack([r, psi]).tolist()
        return cls(
            n=n,
            psi_fn=spline,
            psi_prime_fn=d1,
            psi_double_prime_fn=d2,
            curvature_bound=curvature_bound,
            spec=spec,
            r_max=float(r[-1]) * (1 + 1e-15),
        )

    def to_dict(self) -> dict:
        if "warp" not in self.spec:
            raise ValueError("warped model built from a bare callable is not serializable")
        out = {"kind": "warped", "n": self.n, "k": self.curvature_bound}
        out.update({k: v for k, v in self.spec.items() if k != "label"})
        return out


SpaceModel = Union[RankOneSpace, SpaceForm, WarpedModel]


# ---- module-level operations -------------------------------------------------


def density(space: SpaceModel, r):
    return space.density(r)


def mean_curvature(space: SpaceModel, r):
    return space.mean_curvature(r)


def lambda1_sphere(space: SpaceModel, r):
    return space.lambda1_sphere(r)


def sphere_volume(space: SpaceModel, r):
    return space.sphere_volume(r)


def ball_volume(space: SpaceModel, r):
    return space.ball_volume(r)


def radius_for_volume(space: SpaceModel, volume: float) -> float:
    """Radius R with ``ball_volume(space, R) = volume``."""
    if not volume > 0:
        raise DomainError("volume must be positive")

    def f(r):
        return space.ball_volume(r) / volume - 1.0

    if math.isfinite(space.r_max):
        hi = space.r_max * (1 - 1e-12)
        if f(hi) < 0:
            raise DomainError(f"volume {volume} exceeds the largest ball in the window of {space.label}")
    else:
        hi = 1.0
        while f(hi) < 0:
            hi *= 2
            if hi > 1e6:
                raise DomainError("volume not attained")
    lo = 0.0
    return find_root(f, RootSpec((lo, hi), tol=1e-15 * hi))


def curvature_check(model: WarpedModel, r_max: float, grid_size: int = 400, tol: float = 1e-9) -> VerificationReport:
    """Check the radial curvature bound ``-psi''/psi <= k`` on a uniform grid."""
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    r = np.linspace(r_max / grid_size, r_max, grid_size)
    psi = model.psi(r)
    if np.any(psi <= 0):
        raise InvalidModelError("warp is non-positive on the grid")
    K = -model.psi_double_prime(r) / psi
    excess = K - model.curvature_bound
    i = int(np.argmax(excess))
    rep = VerificationReport("curvature_check", meta={"model": model.label, "k": model.curvature_bound,
                                                      "r_max": r_max, "grid_size": grid_size})
    rep.add("K <= k", excess[i] <= tol, float(-excess[i]), worst_r=float(r[i]), worst_K=float(K[i]))
    return rep


# ---- serialization ---------------------------------------------------------------


def load_warp_table(path) -> tuple:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                continue  # header line
    if len(rows) < 4:
        raise InvalidModelError(f"{path}: need at least 4 numeric (r, psi) rows")
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1]


def space_from_json(obj: dict, base_dir: Optional[Path] = None) -> SpaceModel:
    kind = obj.get("kind")
    if kind == "rank1":
        return RankOneSpace(Field.parse(obj["field"]), int(obj["n"]), Sign(obj.get("sign", "noncompact")))
    if kind == "spaceform":
        return SpaceForm(float(obj.get("delta", 0.0)), int(obj.get("n", 2)))
    if kind == "warped":
        n = int(obj.get("n", 2))
        k = float(obj.get("k", 0.0))
        warp = obj.get("warp")
        if warp == "sinh_scaled":
            return WarpedModel.sinh_scaled(float(obj["scale"]), k, n)
        if warp == "table":
            if "table" in obj:
                t = np.asarray(obj["table"], dtype=float)
                return WarpedModel.from_table(t[:, 0], t[:, 1], k, n)
            path = Path(obj["path"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            r, psi = load_warp_table(path)
            return WarpedModel.from_table(r, psi, k, n, source=str(obj["path"]))
        raise ValueError(f"unknown warp {warp!r}")
    raise ValueError(f"unknown space kind {kind!r}")


def space_to_json(space: SpaceModel) -> dict:
    return space.to_dict()


_NAMED_FIELDS = {"RH": Field.REAL, "CH": Field.COMPLEX, "HH": Field.QUATERNION,
                 "CP": Field.COMPLEX, "HP": Field.QUATERNION}


def named_space(name: str, n: Optional[int] = None) -> SpaceModel:
    """Built-in spaces: H2, S2, Rn, Hn, Sn, RHn, CHn, HHn, CaH2, CPn, HPn, CaP2,
    warped-sinh<scale> (curvature bound -1 in dimension 2).

    A trailing 'n' takes its dimension from ``n``; a trailing digit fixes it.
    """
    s = name.strip()
    if s.lower().startswith("warped-sinh"):
        return WarpedModel.sinh_scaled(float(s[len("warped-sinh"):]), -1.0, 2)

    def dim(tail):
        if tail in ("n", ""):
            if n is None:
                raise ValueError(f"space {name!r} needs a dimension")
            return int(n)
        return int(tail)

    if s.startswith("Ca"):
        sign = Sign.NONCOMPACT if s[2] == "H" else Sign.COMPACT
        if s[2] not in "HP":
            raise ValueError(f"unknown space {name!r}")
        return RankOneSpace(Field.CAYLEY, dim(s[3:]), sign)
    if s[:2] in _NAMED_FIELDS:
        sign = Sign.NONCOMPACT if s[1] == "H" else Sign.COMPACT
        return RankOneSpace(_NAMED_FIELDS[s[:2]], dim(s[2:]), sign)
    if s[0] == "R":
        return SpaceForm(0.0, dim(s[1:]))
    if s[0] == "H":
        return RankOneSpace(Field.REAL, dim(s[1:]), Sign.NONCOMPACT)
    if s[0] == "S":
        return RankOneSpace(Field.REAL, dim(s[1:]), Sign.COMPACT)
    raise ValueError(f"unknown space {name!r}")
