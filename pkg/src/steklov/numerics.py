"""Shared numerical kernels: adaptive quadrature, root finding, a damped
Newton solver for small systems and a dense generalized symmetric
eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import BracketError, ConditioningError, ConvergenceError

_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(20)
# Both rules evaluated in one batch: first 10 nodes low order, next 20 high.
_NODES = np.concatenate([_GL_LO[0], _GL_HI[0]])
_W_LO = _GL_LO[1]
_W_HI = _GL_HI[1]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for :func:`integrate`.

    ``endpoint_singularity_hint`` is the exponent ``alpha`` of an integrable
    ``(x - a)**alpha`` behaviour at the lower limit.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-11
    max_depth: int = 30
    endpoint_singularity_hint: Optional[float] = None

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or (self.abs_tol == 0 and self.rel_tol == 0):
            raise ValueError("tolerances must be non-negative and not both zero")
        if not 1 <= self.max_depth <= 40:
            raise ValueError("max_depth must lie in [1, 40]")
        if self.endpoint_singularity_hint is not None and self.endpoint_singularity_hint <= -1:
            raise ValueError("singularity exponent must exceed -1 to be integrable")


@dataclass(frozen=True)
class RootSpec:
    bracket: tuple
    tol: float = 1e-14
    max_iter: int = 200

    def __post_init__(self):
        lo, hi = self.bracket
        if not lo < hi:
            raise ValueError("bracket must satisfy lo < hi")


DEFAULT_QUAD = QuadratureSpec()
# Radial integrals of positive densities; these feed the 1e-10 targets.
TIGHT_QUAD = QuadratureSpec(abs_tol=0.0, rel_tol=1e-14, max_depth=40)
# guards against rounding noise that no amount of bisection can resolve
MAX_PANELS = 1 << 16


def _panel(f, lo, hi):
    """Evaluate G10 and G20 on every panel [lo_i, hi_i] with one call to f."""
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    i_lo = half * (fx[:, :10] @ _W_LO)
    i_hi = half * (fx[:, 10:] @ _W_HI)
    return i_hi, np.abs(i_hi - i_lo)


def _substituted(f, a, b, alpha):
    # x = a + (b - a) u**p removes an (x - a)**alpha endpoint singularity
    p = 1.0 / (1.0 + alpha)
    L = b - a

    def h(u):
        return f(a + L * u**p) * (L * p * u ** (p - 1.0))

    return h


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Adaptive Gauss-Legendre (10/20 point pair) quadrature of a vectorized f.

    Panels are bisected level by level; a panel is accepted once its error
    estimate is below its width-proportional share of
    ``max(abs_tol, rel_tol * |I|)``.
    """
    if b < a:
        raise ValueError("require a <= b")
    if a == b:
        return 0.0
    if spec.endpoint_singularity_hint is not None and spec.endpoint_singularity_hint != 0:
        f = _substituted(f, a, b, spec.endpoint_singularity_hint)
        a, b = 0.0, 1.0
    total_width = b - a
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    done_val = 0.0
    done_err = 0.0
    for _ in range(spec.max_depth + 1):
        val, err = _panel(f, lo, hi)
        estimate = done_val + val.sum()
        tol = max(spec.abs_tol, spec.rel_tol * abs(estimate))
        ok = err <= tol * (hi - lo) / total_width
        done_val += val[ok].sum()
        done_err += err[ok].sum()
        if ok.all():
            return float(done_val)
        lo, hi = lo[~ok], hi[~ok]
        if lo.size > MAX_PANELS // 2:
            break
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    raise ConvergenceError(
        f"quadrature did not converge within depth {spec.max_depth} or {MAX_PANELS} panels",
        best=float(estimate),
        trace=[float(done_err + err.sum())],
    )


def cumulative_integral(f: Callable, x, spec: QuadratureSpec = TIGHT_QUAD, start: float = 0.0):
    """Return ``int_start^x_i f`` for every entry of x (x_i >= start).

    The sorted points are split into panels between consecutive values and
    all panels are refined together; each panel must meet
    ``max(abs_tol * width, rel_tol * |panel value|)``.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    if flat.size == 0:
        return np.zeros_like(x)
    if np.any(flat < start):
        raise ValueError("points must not precede the start of integration")
    knots, inverse = np.unique(flat, return_inverse=True)
    edges = np.concatenate([[start], knots])
    n_seg = len(knots)
    seg_val = np.zeros(n_seg)
    owner = np.arange(n_seg)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    keep = hi > lo
    lo, hi, owner = lo[keep], hi[keep], owner[keep]
    for _ in range(spec.max_depth + 1):
        if lo.size == 0:
            break
        val, err = _panel(f, lo, hi)
        tol = np.maximum(spec.abs_tol * (hi - lo), spec.rel_tol * np.abs(val))
        ok = err <= tol
        np.add.at(seg_val, owner[ok], val[ok])
        lo, hi, owner = lo[~ok], hi[~ok], owner[~ok]
        if lo.size > MAX_PANELS // 2:
            raise ConvergenceError("cumulative quadrature stalled on rounding noise", best=np.cumsum(seg_val))
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        owner = np.concatenate([owner, owner])
    else:
        if lo.size:
            raise ConvergenceError("cumulative quadrature did not converge", best=np.cumsum(seg_val))
    return np.cumsum(seg_val)[inverse].reshape(x.shape)


def integrate_periodic(f: Callable, rel_tol: float = 1e-12, n_start: int = 64, n_max: int = 1 << 14) -> float:
    """Integral over one period [0, 2 pi) by trapezoid doubling.

    Spectrally accurate for smooth periodic integrands.
    """
    n = n_start
    t = 2 * np.pi * np.arange(n) / n
    prev = 2 * np.pi * np.mean(f(t))
    while n < n_max:
        n *= 2
        t = 2 * np.pi * np.arange(n) / n
        cur = 2 * np.pi * np.mean(f(t))
        if abs(cur - prev) <= rel_tol * abs(cur):
            return float(cur)
        prev = cur
    raise ConvergenceError("periodic trapezoid rule did not converge", best=float(prev))


def find_root(f: Callable[[float], float], spec: RootSpec) -> float:
    """Brent's method on a checked sign-change bracket."""
    lo, hi = spec.bracket
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = {flo}, {fhi}")
    try:
        root = optimize.brentq(f, lo, hi, xtol=spec.tol, rtol=4 * np.finfo(float).eps, maxiter=spec.max_iter)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    return float(root)


def _fd_jacobian(F, x, fx, h=1e-7):
    n = x.size
    J = np.empty((fx.size, n))
    for j in range(n):
        step = h * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += step
        xm[j] -= step
        J[:, j] = (np.asarray(F(xp)) - np.asarray(F(xm))) / (2 * step)
    return J


def newton_system(F: Callable, x0, tol: float = 1e-12, max_iter: int = 50, damping: float = 1.0):
    """Damped Newton iteration with a central-difference Jacobian.

    The step is halved until the residual norm decreases. Returns
    ``(x, residual_norm, iterations)``.
    """
    x = np.array(x0, dtype=float)
    fx = np.asarray(F(x), dtype=float)
    res = float(np.linalg.norm(fx))
    trace = [res]
    for it in range(max_iter):
        if res <= tol:
            return x, res, it
        J = _fd_jacobian(F, x, fx)
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in Newton iteration", best=x, trace=trace) from exc
        t = damping
        for _ in range(40):
            trial = x + t * step
            try:
                ft = np.asarray(F(trial), dtype=float)
            except ArithmeticError:
                ft = None
            if ft is not None and np.all(np.isfinite(ft)) and np.linalg.norm(ft) < res:
                break
            t *= 0.5
        else:
            if res <= 10 * tol:
                return x, res, it
            raise ConvergenceError("Newton line search failed to reduce the residual", best=x, trace=trace)
        x, fx = trial, ft
        res = float(np.linalg.norm(fx))
        trace.append(res)
    if res <= tol:
        return x, res, max_iter
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations", best=x, trace=trace)


def sym_generalized_eig(A, B, count: Optional[int] = None, sym_tol: float = 1e-10):
    """Solve ``A v = nu B v`` for symmetric A and SPD B.

    Reduces to a standard symmetric problem with the Cholesky factor of B.
    Returns ascending eigenvalues and B-orthonormal eigenvectors (columns).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    scale = max(np.abs(A).max(), 1e-300)
    if np.abs(A - A.T).max() > sym_tol * scale:
        raise ValueError("A is not symmetric")
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError("B is not positive definite") from exc
    Linv_A = np.linalg.solve(L, A)
    C = np.linalg.solve(L, Linv_A.T).T
    C = 0.5 * (C + C.T)
    vals, W = np.linalg.eigh(C)
    V = np.linalg.solve(L.T, W)
    if count is not None:
        vals, V = vals[:count], V[:, :count]
    return vals, V
