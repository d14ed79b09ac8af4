"""Equilibrium points of both degenerate regimes.

Closed lowest-order expressions seed a damped Newton iteration on the
reaction terms; every returned point carries its defining-equation residual.
Properness ties within 1e-10 of an axis break toward proper, since boundary
equilibria are legitimate phase-space points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import model as m
from ._numerics import newton1, newton2
from .errors import CaseError, ConvergenceError, ValidationError
from .model import DegeneracyCase, StatePoint, SystemModel

PROPER_TIE_TOL = 1e-10
NEWTON_TOL = 1e-12


class EquilibriumId(Enum):
    O = "O"
    E11 = "E11"
    E12 = "E12"
    E2 = "E2"
    E3 = "E3"
    E1 = "E1"


class EqStatus(Enum):
    PROPER = "proper"
    VIRTUAL = "virtual"
    ABSENT = "absent"


@dataclass(frozen=True)
class Equilibrium:
    id: EquilibriumId
    point: StatePoint
    status: EqStatus
    provenance: str  # "lowest-terms" or "newton"
    residual: float = 0.0

    @property
    def exists(self) -> bool:
        return self.status is not EqStatus.ABSENT


@dataclass(frozen=True)
class DerivedConstants:
    """Scalars recomputed from the model's constant and degree-1 coefficients."""

    sigma1: float | None = None
    sigma2: float | None = None
    k3: float | None = None
    two_n_minus_delta_theta2: float | None = None


def _status_for(point: StatePoint) -> EqStatus:
    if point.xi1 >= -PROPER_TIE_TOL and point.xi2 >= -PROPER_TIE_TOL:
        return EqStatus.PROPER
    return EqStatus.VIRTUAL


def require_case(model: SystemModel, *allowed: DegeneracyCase) -> DegeneracyCase:
    case = m.classify_case(model)
    if case not in allowed:
        names = " or ".join(c.value for c in allowed)
        raise CaseError(f"operation requires {names}; model is {case.value}")
    return case


def origin(model: SystemModel, mu) -> Equilibrium:
    m.check_mu(model, mu)
    return Equilibrium(EquilibriumId.O, StatePoint(0.0, 0.0), EqStatus.PROPER, "lowest-terms")


def discriminant(model: SystemModel, mu) -> float:
    """theta(mu)^2 - 4 N(mu) mu1, exact."""
    require_case(model, DegeneracyCase.CASE_A)
    mu1, mu2 = m.check_mu(model, mu)
    c = m._local(model, mu1, mu2)
    if c.n == 0.0:
        raise ValidationError("axis discriminant needs N(mu) != 0")
    return c.th * c.th - 4.0 * c.n * mu1


def axis1_equilibria(model: SystemModel, mu) -> tuple[Equilibrium, Equilibrium]:
    """Both roots of N(mu) x^2 - theta(mu) x + mu1 = 0 on the first axis.

    Roots are computed with the cancellation-safe quadratic formula (larger
    root first, the other via the product of roots) and then Newton-polished.
    A negative discriminant yields two ABSENT equilibria.
    """
    require_case(model, DegeneracyCase.CASE_A)
    mu1, mu2 = m.check_mu(model, mu)
    c = m._local(model, mu1, mu2)
    if c.n == 0.0:
        raise ValidationError("axis equilibria need N(mu) != 0")
    disc = c.th * c.th - 4.0 * c.n * mu1
    if disc < 0.0:
        absent = StatePoint(0.0, 0.0)
        return (
            Equilibrium(EquilibriumId.E11, absent, EqStatus.ABSENT, "lowest-terms"),
            Equilibrium(EquilibriumId.E12, absent, EqStatus.ABSENT, "lowest-terms"),
        )
    sq = math.sqrt(disc)
    if c.th >= 0.0:
        big = (c.th + sq) / (2.0 * c.n)
    else:
        big = (c.th - sq) / (2.0 * c.n)
    if big != 0.0:
        other = mu1 / (c.n * big)
    else:
        other = 0.0
    # paper-order: xi11 carries the +sqrt branch
    xi11 = big if c.th >= 0.0 else other
    xi12 = other if c.th >= 0.0 else big

    def polish(x0: float) -> tuple[float, float]:
        f = lambda x: mu1 - c.th * x + c.n * x * x
        df = lambda x: -c.th + 2.0 * c.n * x
        if disc == 0.0 or abs(df(x0)) < 1e-300:
            return x0, abs(f(x0))  # double root: Newton is singular there
        try:
            return newton1(f, df, x0, tol=NEWTON_TOL)
        except ConvergenceError:
            return x0, abs(f(x0))  # near-double root: closed form already optimal

    x11, r11 = polish(xi11)
    x12, r12 = polish(xi12)
    p11, p12 = StatePoint(x11, 0.0), StatePoint(x12, 0.0)
    return (
        Equilibrium(EquilibriumId.E11, p11, _status_for(p11), "newton", r11),
        Equilibrium(EquilibriumId.E12, p12, _status_for(p12), "newton", r12),
    )


def equilibrium_E2(model: SystemModel, mu) -> Equilibrium:
    """Root of mu2 + x2 + P(mu) x2^2 = 0 on the branch through 0."""
    mu1, mu2 = m.check_mu(model, mu)
    c = m._local(model, mu1, mu2)
    f = lambda x: mu2 + x + c.p * x * x
    df = lambda x: 1.0 + 2.0 * c.p * x
    try:
        x2, res = newton1(f, df, -mu2, tol=NEWTON_TOL)
    except ConvergenceError as exc:
        raise ConvergenceError(f"E2 Newton failed: {exc}", exc.residual)
    point = StatePoint(0.0, x2)
    return Equilibrium(EquilibriumId.E2, point, _status_for(point), "newton", res)


def derived_constants(model: SystemModel) -> DerivedConstants:
    """Case-specific scalars built from constant and degree-1 coefficients."""
    case = require_case(model, DegeneracyCase.CASE_A, DegeneracyCase.CASE_B)
    ga = model.gamma.constant_term
    de = model.delta.constant_term
    n0 = model.big_n.constant_term
    s0 = model.big_s.constant_term
    th2 = model.theta.coeff(0, 1)
    if case is DegeneracyCase.CASE_A:
        sigma1 = (de * th2 - n0) / (ga * de * de)
        two_n = 2.0 * n0 - de * th2
        k3 = -(n0 - de * th2 - ga * two_n) / (2.0 * ga * de * de)
        return DerivedConstants(sigma1=sigma1, k3=k3, two_n_minus_delta_theta2=two_n)
    th0 = model.theta.constant_term
    de1 = model.delta.coeff(1, 0)
    sigma2 = (th0 * de1 - s0) / (th0 * th0)
    return DerivedConstants(sigma2=sigma2)


def e3_seed(model: SystemModel, mu) -> StatePoint:
    """Second-order accurate starting point for the interior equilibrium."""
    case = require_case(model, DegeneracyCase.CASE_A, DegeneracyCase.CASE_B)
    mu1, mu2 = m.check_mu(model, mu)
    ga = model.gamma.constant_term
    dc = derived_constants(model)
    if case is DegeneracyCase.CASE_A:
        de = model.delta.constant_term
        x1 = -(mu1 - ga * mu2) / (ga * de)
        x2 = -(mu1 - ga * dc.sigma1 * mu2 * mu2) / ga
    else:
        th = model.theta.constant_term
        x1 = (mu1 - ga * mu2) / th
        x2 = -mu2 + dc.sigma2 * mu1 * mu1
    return StatePoint(x1, x2)


from functools import lru_cache


@lru_cache(maxsize=65536)
def _e3_refined(model: SystemModel, mu1: float, mu2: float) -> Equilibrium:
    seed = e3_seed(model, (mu1, mu2))

    def fun_jac(x1: float, x2: float):
        xi = (x1, x2)
        return m.inner_field(model, (mu1, mu2), xi), m.inner_jacobian(model, (mu1, mu2), xi)

    try:
        (x1, x2), res = newton2(fun_jac, (seed.xi1, seed.xi2), tol=NEWTON_TOL)
    except ConvergenceError as exc:
        raise ConvergenceError(f"E3 Newton failed at mu={mu1, mu2}: {exc}", exc.residual)
    point = StatePoint(x1, x2)
    return Equilibrium(EquilibriumId.E3, point, _status_for(point), "newton", res)


def equilibrium_E3(model: SystemModel, mu) -> Equilibrium:
    """Newton solution of the interior-equilibrium system g = 0.

    Results are memoized per (model, mu): sweeps touch the interior point
    several times per cell (region label, inventory, curve residuals).
    """
    require_case(model, DegeneracyCase.CASE_A, DegeneracyCase.CASE_B)
    mu1, mu2 = m.check_mu(model, mu)
    return _e3_refined(model, mu1, mu2)


def equilibrium_E1(model: SystemModel, mu) -> Equilibrium:
    """Root of mu1 - theta(mu) x + N(mu) x^2 = 0 nearest 0 (second regime)."""
    require_case(model, DegeneracyCase.CASE_B)
    mu1, mu2 = m.check_mu(model, mu)
    c = m._local(model, mu1, mu2)
    th0 = model.theta.constant_term
    f = lambda x: mu1 - c.th * x + c.n * x * x
    df = lambda x: -c.th + 2.0 * c.n * x
    try:
        x1, res = newton1(f, df, mu1 / th0, tol=NEWTON_TOL)
    except ConvergenceError as exc:
        raise ConvergenceError(f"E1 Newton failed: {exc}", exc.residual)
    point = StatePoint(x1, 0.0)
    return Equilibrium(EquilibriumId.E1, point, _status_for(point), "newton", res)


def case_ids(case: DegeneracyCase) -> tuple[EquilibriumId, ...]:
    """Equilibrium inventory order used by reports."""
    if case is DegeneracyCase.CASE_A:
        return (EquilibriumId.O, EquilibriumId.E11, EquilibriumId.E12,
                EquilibriumId.E2, EquilibriumId.E3)
    if case is DegeneracyCase.CASE_B:
        return (EquilibriumId.O, EquilibriumId.E1, EquilibriumId.E2, EquilibriumId.E3)
    raise CaseError(f"no equilibrium inventory for {case.value}")


def all_equilibria(model: SystemModel, mu) -> list[Equilibrium]:
    """Full case inventory at one parameter point, in report order."""
    case = require_case(model, DegeneracyCase.CASE_A, DegeneracyCase.CASE_B)
    out = [origin(model, mu)]
    if case is DegeneracyCase.CASE_A:
        e11, e12 = axis1_equilibria(model, mu)
        out.extend([e11, e12])
    else:
        out.append(equilibrium_E1(model, mu))
    out.append(equilibrium_E2(model, mu))
    out.append(equilibrium_E3(model, mu))
    return out
