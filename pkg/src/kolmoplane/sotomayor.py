"""Numerical bifurcation-type certificates at curve points.

The three classical degeneracy scalars for a planar family along a chosen
bifurcation parameter are

    C1 = w . f_mu(x0, mu0)
    C2 = w . [Df_mu(x0, mu0) v]
    C3 = w . [D^2 f(x0, mu0)(v, v)]

with v, w unit right/left null vectors of the (singular) Jacobian.  A
saddle-node is certified by C1 != 0 and C3 != 0, a transcritical crossing by
C1 = 0 with C2, C3 != 0.  Null vectors come from the adjugate of the shifted
Jacobian, normalized with the largest-magnitude component positive; verdicts
and the signs of C1*C3 / C2*C3 are invariant under that normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import classify as cl
from . import equilibria as eq
from . import model as m
from ._numerics import frob2, norm2
from .errors import DoubleZeroError, NotOnHopfCurveError, NotSingularError
from .model import SystemModel

Vec2 = tuple[float, float]


@dataclass(frozen=True)
class SotomayorReport:
    zero_eigenvalue: float
    v: Vec2
    w: Vec2
    c1: float
    c2: float
    c3: float
    verdict: str  # "saddle-node" | "transcritical" | "inconclusive"


@dataclass(frozen=True)
class HopfReport:
    omega: float
    dp_dbif: float
    l1: float


def _sign_fix(v: Vec2) -> Vec2:
    n = norm2(v)
    if n == 0.0:
        return v
    x, y = v[0] / n, v[1] / n
    if (abs(x) >= abs(y) and x < 0.0) or (abs(y) > abs(x) and y < 0.0):
        x, y = -x, -y
    return x, y


def null_vectors(j, lam: float) -> tuple[Vec2, Vec2]:
    """Unit right/left null vectors of J - lam*I via its adjugate."""
    a = j[0][0] - lam
    b = j[0][1]
    c = j[1][0]
    d = j[1][1] - lam
    cols = ((d, -c), (-b, a))
    rows = ((d, -b), (-c, a))
    v = max(cols, key=norm2)
    w = max(rows, key=norm2)
    return _sign_fix(v), _sign_fix(w)


def sotomayor_check(model: SystemModel, mu0, xi0, bif_param: int,
                    tols: cl.Tolerances = cl.DEFAULT_TOLS) -> SotomayorReport:
    """Certificate scalars at a near-singular point (xi0, mu0).

    ``bif_param`` selects which parameter coordinate (1 or 2) plays the role
    of the unfolding parameter.  The Jacobian must have exactly one eigenvalue
    within the singular tolerance of zero.
    """
    j = m.jacobian(model, mu0, xi0)
    report = cl.eigen2(j)
    scale = max(1.0, frob2(j))
    tol_zero = tols.singular * scale
    if report.kind != "real":
        raise NotSingularError("complex eigenvalues: no zero eigenvalue to unfold")
    lam_small, lam_big = ((report.value1, report.value2)
                          if abs(report.value1) <= abs(report.value2)
                          else (report.value2, report.value1))
    if abs(lam_small) > tol_zero:
        raise NotSingularError(
            f"smallest |eigenvalue| = {abs(lam_small):g} exceeds {tol_zero:g}")
    if abs(lam_big) <= tol_zero:
        raise DoubleZeroError("both eigenvalues are near zero at this point")
    v, w = null_vectors(j, lam_small)
    fmu = m.d_mu(model, mu0, xi0, bif_param)
    dfmu = m.d_mu_state_jacobian(model, mu0, xi0, bif_param)
    d2 = m.second_directional(model, mu0, xi0, v)
    c1 = w[0] * fmu[0] + w[1] * fmu[1]
    c2 = (w[0] * (dfmu[0][0] * v[0] + dfmu[0][1] * v[1])
          + w[1] * (dfmu[1][0] * v[0] + dfmu[1][1] * v[1]))
    c3 = w[0] * d2[0] + w[1] * d2[1]
    tol_c = tols.singular * scale
    if abs(c1) > tol_c and abs(c3) > tol_c:
        verdict = "saddle-node"
    elif abs(c1) <= tol_c and abs(c2) > tol_c and abs(c3) > tol_c:
        verdict = "transcritical"
    else:
        verdict = "inconclusive"
    return SotomayorReport(lam_small, v, w, c1, c2, c3, verdict)


def hopf_check(model: SystemModel, mu0,
               tols: cl.Tolerances = cl.DEFAULT_TOLS) -> HopfReport:
    """Hopf data at a point of the located trace-zero curve.

    Verifies the eigenvalues at the refined interior equilibrium are a
    near-pure-imaginary pair, then reports the frequency, the exact
    transversality derivative d(Re lambda)/d(mu1), and the first Lyapunov
    coefficient.
    """
    e3 = eq.equilibrium_E3(model, mu0)
    j = m.jacobian(model, mu0, e3.point)
    report = cl.eigen2(j)
    scale = max(1.0, frob2(j))
    if report.kind != "complex" or abs(report.p) > tols.hopf_p * scale:
        raise NotOnHopfCurveError(
            f"eigenvalues at mu={mu0!r} are not a near-imaginary pair")
    omega = math.sqrt(report.det - report.p * report.p)
    dp = cl.dp_dmu1_at_E3(model, mu0, tols)
    l1 = cl.lyapunov1_numeric(model, mu0, tols)
    return HopfReport(omega=omega, dp_dbif=dp, l1=l1)
