"""Verification suites run by ``steklov verify``."""

from __future__ import annotations

import math

import numpy as np

from .domains import (StarDomain, compute_Ck, lemma2_check, trial_bound_curvature, trial_bound_rank1,
                      volume)
from .fourier import FourierSeries
from .radial import monotonicity_report
from .reports import VerificationReport
from .spaces import Field, RankOneSpace, Sign, SpaceForm, WarpedModel, curvature_check
from .steklov2d import WeightedPlanarDomain, dtn_spectrum, nu1_domain

EPSILONS = (0.05, 0.1, 0.2)


def noncompact_rank_one():
    out = [RankOneSpace(Field.REAL, n) for n in range(2, 9)]
    out += [RankOneSpace(Field.COMPLEX, n) for n in range(2, 5)]
    out += [RankOneSpace(Field.QUATERNION, n) for n in (2, 3)]
    out.append(RankOneSpace(Field.CAYLEY, 2))
    return out


def lemma3() -> VerificationReport:
    rep = VerificationReport("lemma3")
    for sp in noncompact_rank_one():
        rep.extend(monotonicity_report(sp), prefix=sp.label)
    sphere = RankOneSpace(Field.REAL, 2, Sign.COMPACT)
    rep.extend(monotonicity_report(sphere, r_max=3.0), prefix=sphere.label)
    return rep


def thm1(N: int = 256) -> VerificationReport:
    """Oracle nu_1 against the equal-volume ball, with the trial bound in between."""
    H = SpaceForm(1.0)
    rep = VerificationReport("thm1", meta={"ambient": H.label, "epsilons": list(EPSILONS)})
    gaps = []
    for eps in EPSILONS:
        dom = StarDomain.perturbed(H, 1.0, eps)
        tb = trial_bound_rank1(dom, oracle=True)
        gap = tb.ball_nu1 - tb.oracle_nu1
        gaps.append(gap)
        tag = f"eps={eps!r}"
        rep.add(f"{tag}: oracle <= ball", gap >= -1e-8, gap, oracle=tb.oracle_nu1, ball=tb.ball_nu1,
                R_vol=tb.R_vol)
        rep.add(f"{tag}: gap > 0", gap > 0, gap)
        rep.add(f"{tag}: oracle <= trial", tb.bound - tb.oracle_nu1 >= -1e-6, tb.bound - tb.oracle_nu1,
                trial=tb.bound)
        rep.add(f"{tag}: trial <= ball", tb.ball_nu1 - tb.bound >= -1e-8, tb.ball_nu1 - tb.bound)
    d = np.diff(gaps)
    rep.add("gap decreases with eps", bool(np.all(d > 0)), float(np.min(d)))
    for R in (0.5, 1.0, 2.0):
        tb = trial_bound_rank1(StarDomain.ball(H, R))
        err = abs(tb.bound - tb.ball_nu1) / tb.ball_nu1
        rep.add(f"ball R={R!r}: trial = nu1", err <= 1e-8, 1e-8 - err)
    return rep


def thm2() -> VerificationReport:
    W = WarpedModel.sinh_scaled(1.2, -1.0)
    rep = VerificationReport("thm2", meta={"ambient": W.label, "k": -1.0})
    rep.extend(curvature_check(W, 3.0), prefix="warp")
    for name, rho in (("ball", FourierSeries.constant(1.0)), ("cos2", FourierSeries.cosine(1.0, 0.15, 2))):
        dom = StarDomain(W, rho)
        bound, sub = trial_bound_curvature(dom, oracle=True)
        rep.extend(sub, prefix=name)
        vt = volume(StarDomain(SpaceForm(1.0), rho))
        rep.add(f"{name}: transplanted volume <= volume", vt <= sub.meta["volume"], sub.meta["volume"] - vt)
    same = WarpedModel.sinh_scaled(1.0, -1.0)
    for name, rho in (("ball", FourierSeries.constant(1.0)), ("cos2", FourierSeries.cosine(1.0, 0.15, 2))):
        ck = compute_Ck(StarDomain(same, rho)).C_k
        rep.add(f"psi = sinh r, {name}: C_k = 1", abs(ck - 1) <= 1e-10, 1e-10 - abs(ck - 1))
    return rep


def lemma2() -> VerificationReport:
    rep = VerificationReport("lemma2")
    for amb in (SpaceForm(1.0), SpaceForm(0.0)):
        ball = lemma2_check(StarDomain.ball(amb, 1.0))
        c = ball.checks[0]
        rep.add(f"{amb.label} ball: equality", c.detail["equality"], 1e-9 * c.detail["rhs"] - abs(c.margin))
        pert = lemma2_check(StarDomain.perturbed(amb, 1.0, 0.2)).checks[0]
        rep.add(f"{amb.label} eps=0.2: strict", pert.margin > 0, pert.margin)
    return rep


def oracle() -> VerificationReport:
    rep = VerificationReport("oracle")
    disk = dtn_spectrum(WeightedPlanarDomain(FourierSeries.constant(1.0)), modes=5)
    err = float(np.max(np.abs(disk.eigenvalues - [0, 1, 1, 2, 2])))
    rep.add("unit disk {0,1,1,2,2}", err <= 1e-8, 1e-8 - err)
    H = SpaceForm(1.0)
    for R in (0.5, 1.0, 2.0, 3.0):
        nu = nu1_domain(StarDomain.ball(H, R))
        err = abs(nu - 1 / math.sinh(R))
        rep.add(f"hyperbolic ball R={R!r}", err <= 1e-6, 1e-6 - err)
    for rho in (FourierSeries.cosine(1.0, 0.3, 2), FourierSeries.cosine(1.0, 0.2, 3)):
        dom = WeightedPlanarDomain(rho)
        sp = dtn_spectrum(dom, modes=4)
        lhs = 1 / sp.nu1 + 1 / sp.nu2
        A = dom.area()
        rep.add(f"Hersch-Payne mode {rho.highest_mode}", lhs >= A / math.pi - 1e-8, lhs - A / math.pi)
        big = dtn_spectrum(dom.scaled(2.0), modes=4)
        err = float(np.max(np.abs(big.eigenvalues[1:] * 2 - sp.eigenvalues[1:])))
        rep.add(f"scaling mode {rho.highest_mode}", err <= 1e-8, 1e-8 - err)
    return rep


SUITES = {"lemma3": lemma3, "thm1": thm1, "thm2": thm2, "lemma2": lemma2, "oracle": oracle}


def run_suite(name: str) -> VerificationReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn()
