"""Bifurcation curves and parameter-plane region membership.

Curves with closed residuals (the axis-pair discriminant, the coordinate
axes) are evaluated exactly; the interior-equilibrium curves are located by
one-dimensional root finding (bisection, then secant polish) on the exact
residual, with the lowest-order expression only supplying the bracket center.
Region labels use the numerically located boundaries so that membership and
curve location can never disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from . import classify as cl
from . import equilibria as eq
from . import model as m
from ._numerics import bisect_secant, expand_bracket
from .errors import BracketError, CaseError, ConvergenceError, SideConditionError, ValidationError
from .model import DegeneracyCase, ParamPoint, SystemModel


class CurveId(Enum):
    DELTA_PLUS = "Delta+"
    DELTA_MINUS = "Delta-"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"
    H = "H"
    H1 = "H1"
    X_PLUS = "X+"
    X_MINUS = "X-"
    Y_PLUS = "Y+"
    Y_MINUS = "Y-"


class RegionTag(Enum):
    R00 = "R00"
    R10_MINUS = "R10-"
    R10_PLUS = "R10+"
    R20_MINUS = "R20-"
    R20_PLUS = "R20+"
    Q = "Q"
    Q_COMPLEMENT = "Qc"
    ON_CURVE = "on"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class RegionLabel:
    tag: RegionTag
    curve: CurveId | None = None

    def __str__(self) -> str:
        if self.tag is RegionTag.ON_CURVE:
            return f"on:{self.curve.value}"
        return self.tag.value


@dataclass(frozen=True)
class CurveSample:
    mu: ParamPoint
    residual: float
    defining: CurveId


_AXES = (CurveId.X_PLUS, CurveId.X_MINUS, CurveId.Y_PLUS, CurveId.Y_MINUS)


def case_curves(model: SystemModel) -> tuple[CurveId, ...]:
    """Curves meaningful for this model's degeneracy case, in check order."""
    case = m.classify_case(model)
    if case is DegeneracyCase.CASE_A:
        ids = list(_AXES) + [CurveId.DELTA_PLUS, CurveId.DELTA_MINUS, CurveId.T2, CurveId.T3]
        if model.delta.constant_term < 0.0:
            ids.append(CurveId.H)
        return tuple(ids)
    if case is DegeneracyCase.CASE_B:
        ids = list(_AXES) + [CurveId.T2, CurveId.T4]
        if model.theta.constant_term < 0.0:
            ids.append(CurveId.H1)
        return tuple(ids)
    raise CaseError(f"no curve set for {case.value}")


def _require_curve_case(model: SystemModel, curve: CurveId) -> DegeneracyCase:
    case = eq.require_case(model, DegeneracyCase.CASE_A, DegeneracyCase.CASE_B)
    a_only = {CurveId.DELTA_PLUS, CurveId.DELTA_MINUS, CurveId.T3, CurveId.H}
    b_only = {CurveId.T4, CurveId.H1}
    if curve in a_only and case is not DegeneracyCase.CASE_A:
        raise CaseError(f"{curve.value} is defined only when theta(0) = 0")
    if curve in b_only and case is not DegeneracyCase.CASE_B:
        raise CaseError(f"{curve.value} is defined only when delta(0) = 0")
    return case


def _side_ok(model: SystemModel, curve: CurveId, mu1: float, mu2: float) -> bool:
    de0 = model.delta.constant_term
    th0 = model.theta.constant_term
    if curve is CurveId.DELTA_PLUS:
        return mu2 > 0.0
    if curve is CurveId.DELTA_MINUS:
        return mu2 < 0.0
    if curve is CurveId.T2:
        return mu1 > 0.0
    if curve is CurveId.T3:
        return de0 * mu2 > 0.0
    if curve is CurveId.T4:
        return th0 * mu1 > 0.0
    if curve is CurveId.H:
        return de0 < 0.0 and mu2 < 0.0
    if curve is CurveId.H1:
        return th0 < 0.0
    if curve is CurveId.X_PLUS:
        return mu1 > 0.0
    if curve is CurveId.X_MINUS:
        return mu1 < 0.0
    if curve is CurveId.Y_PLUS:
        return mu2 > 0.0
    if curve is CurveId.Y_MINUS:
        return mu2 < 0.0
    raise ValidationError(f"unknown curve {curve!r}")


def curve_residual(model: SystemModel, curve: CurveId, mu) -> float:
    """Exact defining function of a curve at mu (zero exactly on the curve)."""
    _require_curve_case(model, curve)
    mu1, mu2 = m.check_mu(model, mu)
    if not _side_ok(model, curve, mu1, mu2):
        raise SideConditionError(
            f"{curve.value} is not defined on this side of the parameter plane at {mu!r}")
    if curve in (CurveId.DELTA_PLUS, CurveId.DELTA_MINUS):
        return eq.discriminant(model, (mu1, mu2))
    if curve in (CurveId.X_PLUS, CurveId.X_MINUS):
        return mu2
    if curve in (CurveId.Y_PLUS, CurveId.Y_MINUS):
        return mu1
    e3 = eq.equilibrium_E3(model, (mu1, mu2))
    if curve is CurveId.T2:
        return e3.point.xi1
    if curve in (CurveId.T3, CurveId.T4):
        return e3.point.xi2
    # H / H1: the half-trace at the refined interior point
    j = m.jacobian(model, (mu1, mu2), e3.point)
    return 0.5 * (j[0][0] + j[1][1])


# which coordinate is the curve parameter: mu2 for the CASE_A parabolas,
# mu1 for the curves transversal to the mu1 axis
_PARAM_IS_MU2 = {CurveId.DELTA_PLUS, CurveId.DELTA_MINUS, CurveId.T3, CurveId.H}


def _lowest_terms_center(model: SystemModel, curve: CurveId, s: float) -> float:
    ga = model.gamma.constant_term
    if curve in (CurveId.DELTA_PLUS, CurveId.DELTA_MINUS):
        th2 = model.theta.coeff(0, 1)
        n0 = model.big_n.constant_term
        return th2 * th2 * s * s / (4.0 * n0)
    if curve is CurveId.T2:
        return s / ga
    if curve is CurveId.T3:
        return ga * eq.derived_constants(model).sigma1 * s * s
    if curve is CurveId.T4:
        return eq.derived_constants(model).sigma2 * s * s
    if curve is CurveId.H:
        return 2.0 * ga * eq.derived_constants(model).k3 * s * s
    if curve is CurveId.H1:
        return s / (ga - 1.0)
    raise ValidationError(f"{curve.value} has no free coordinate to solve for")


def _curve_free_coord(model: SystemModel, curve: CurveId, s: float) -> float:
    """Root of the curve residual in the free coordinate at parameter s."""
    if abs(s) >= model.radius:
        raise BracketError(f"curve parameter {s:g} leaves the validity radius")
    limit = math.sqrt(model.radius * model.radius - s * s)
    center = _lowest_terms_center(model, curve, s)
    if not (-limit <= center <= limit):
        raise BracketError(
            f"{curve.value} lowest-order location {center:g} leaves the validity radius")
    if curve in _PARAM_IS_MU2:
        f = lambda x: curve_residual(model, curve, (x, s))
    else:
        f = lambda x: curve_residual(model, curve, (s, x))
    half0 = max(0.25 * abs(center), 0.5 * abs(s) ** 3, 1e-9 * s * s, 1e-18)
    lo, hi = expand_bracket(f, center, half0, -limit, limit)
    return bisect_secant(f, lo, hi)


@lru_cache(maxsize=65536)
def _curve_free_coord_cached(model: SystemModel, curve: CurveId, s: float) -> float:
    return _curve_free_coord(model, curve, s)


def curve_point(model: SystemModel, curve: CurveId, s: float,
                tols: cl.Tolerances = cl.DEFAULT_TOLS) -> CurveSample:
    """Point on a named curve at parameter value s.

    The parameter is mu2 for the curves parameterized over the mu2 axis
    (the discriminant branches, T3, H) and mu1 otherwise; the axes are their
    own parameterization.
    """
    case = _require_curve_case(model, curve)
    s = float(s)
    if curve in (CurveId.X_PLUS, CurveId.X_MINUS):
        mu = ParamPoint(s, 0.0)
        resid = curve_residual(model, curve, mu)
        return CurveSample(mu, resid, curve)
    if curve in (CurveId.Y_PLUS, CurveId.Y_MINUS):
        mu = ParamPoint(0.0, s)
        resid = curve_residual(model, curve, mu)
        return CurveSample(mu, resid, curve)
    # validate the side condition in terms of the curve parameter
    probe = (0.0, s) if curve in _PARAM_IS_MU2 else (s, 0.0)
    if not _side_ok(model, curve, probe[0], probe[1]):
        raise SideConditionError(
            f"{curve.value} has no branch at parameter value {s:g}")
    free = _curve_free_coord_cached(model, curve, s)
    mu = ParamPoint(free, s) if curve in _PARAM_IS_MU2 else ParamPoint(s, free)
    resid = curve_residual(model, curve, mu)
    if abs(resid) > tols.curve:
        raise ConvergenceError(
            f"{curve.value} located with residual {resid:g} > {tols.curve:g}", resid)
    return CurveSample(mu, resid, curve)


# ---------------------------------------------------------------------------
# Region membership
# ---------------------------------------------------------------------------


def _on_curve_label(model: SystemModel, mu1: float, mu2: float,
                    case: DegeneracyCase, tol: float) -> RegionLabel | None:
    # axes first; the origin deterministically reports the mu1-axis
    if abs(mu2) <= tol:
        cid = CurveId.X_PLUS if mu1 >= 0.0 else CurveId.X_MINUS
        return RegionLabel(RegionTag.ON_CURVE, cid)
    if abs(mu1) <= tol:
        cid = CurveId.Y_PLUS if mu2 > 0.0 else CurveId.Y_MINUS
        return RegionLabel(RegionTag.ON_CURVE, cid)
    if case is DegeneracyCase.CASE_A:
        disc = eq.discriminant(model, (mu1, mu2))
        if abs(disc) <= tol:
            cid = CurveId.DELTA_PLUS if mu2 > 0.0 else CurveId.DELTA_MINUS
            return RegionLabel(RegionTag.ON_CURVE, cid)
    e3 = eq.equilibrium_E3(model, (mu1, mu2))
    if abs(e3.point.xi1) <= tol and mu1 > 0.0:
        return RegionLabel(RegionTag.ON_CURVE, CurveId.T2)
    de0 = model.delta.constant_term
    th0 = model.theta.constant_term
    if case is DegeneracyCase.CASE_A:
        if abs(e3.point.xi2) <= tol and de0 * mu2 > 0.0:
            return RegionLabel(RegionTag.ON_CURVE, CurveId.T3)
        if de0 < 0.0 and mu2 < 0.0:
            j = m.jacobian(model, (mu1, mu2), e3.point)
            if abs(0.5 * (j[0][0] + j[1][1])) <= tol:
                return RegionLabel(RegionTag.ON_CURVE, CurveId.H)
    else:
        if abs(e3.point.xi2) <= tol and th0 * mu1 > 0.0:
            return RegionLabel(RegionTag.ON_CURVE, CurveId.T4)
        if th0 < 0.0:
            j = m.jacobian(model, (mu1, mu2), e3.point)
            if abs(0.5 * (j[0][0] + j[1][1])) <= tol:
                return RegionLabel(RegionTag.ON_CURVE, CurveId.H1)
    return None


def _t3_boundary_mu1(model: SystemModel, mu2: float, sigma1: float) -> float:
    """mu1 of the numerically located T3 at this mu2; lowest terms as fallback."""
    try:
        return _curve_free_coord_cached(model, CurveId.T3, mu2)
    except (BracketError, ConvergenceError):
        return model.gamma.constant_term * sigma1 * mu2 * mu2


def region_of(model: SystemModel, mu, tols: cl.Tolerances = cl.DEFAULT_TOLS) -> RegionLabel:
    """Sign-predicate region label consistent with the located curves.

    Points farther than the validity radius get OUTSIDE; points within the
    on-curve tolerance of a defining residual get ON_CURVE.  The open-region
    taxonomy requires N(0) > 0 in the first regime, matching the sign
    convention the classification theory is stated for.
    """
    case = eq.require_case(model, DegeneracyCase.CASE_A, DegeneracyCase.CASE_B)
    mu1, mu2 = float(mu[0]), float(mu[1])
    if math.hypot(mu1, mu2) > model.radius:
        return RegionLabel(RegionTag.OUTSIDE)
    on = _on_curve_label(model, mu1, mu2, case, tols.on_curve)
    if on is not None:
        return on
    if case is DegeneracyCase.CASE_B:
        e3 = eq.equilibrium_E3(model, (mu1, mu2))
        if e3.point.xi1 > 0.0 and e3.point.xi2 > 0.0:
            return RegionLabel(RegionTag.Q)
        return RegionLabel(RegionTag.Q_COMPLEMENT)
    n0 = model.big_n.constant_term
    if n0 <= 0.0:
        raise ValidationError("region taxonomy is defined for N(0) > 0")
    dc = eq.derived_constants(model)
    de0 = model.delta.constant_term
    th2 = model.theta.coeff(0, 1)
    if mu1 < 0.0:
        # the T3 parabola enters mu1 < 0 only when sigma1 > 0
        if dc.sigma1 > 0.0 and de0 * mu2 > 0.0:
            if mu1 > _t3_boundary_mu1(model, mu2, dc.sigma1):
                return RegionLabel(RegionTag.R10_PLUS)
        return RegionLabel(RegionTag.R10_MINUS)
    disc = eq.discriminant(model, (mu1, mu2))
    if disc > 0.0 and th2 * mu2 > 0.0:
        if dc.sigma1 < 0.0:
            if mu1 > _t3_boundary_mu1(model, mu2, dc.sigma1):
                return RegionLabel(RegionTag.R20_PLUS)
            return RegionLabel(RegionTag.R20_MINUS)
        # sigma1 >= 0: T3 does not enter this quadrant; all of the band lies
        # on the positive side of its parabola
        return RegionLabel(RegionTag.R20_PLUS)
    return RegionLabel(RegionTag.R00)
