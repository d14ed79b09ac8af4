"""Eigen-analysis of 2x2 Jacobians and stability classification.

Closed-form eigenvalues with a stable discriminant; triangular matrices take
an exact fast path so origin/axis equilibria report their diagonal entries
bit-exactly.  Hyperbolicity tolerances scale with the Jacobian norm so that
classification near a bifurcation curve degrades to NON_HYPERBOLIC instead of
flipping arbitrarily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import equilibria as eq
from . import model as m
from ._numerics import frob2, solve2
from .errors import NonFiniteError, NotOnHopfCurveError
from .model import SystemModel

Mat2 = tuple[tuple[float, float], tuple[float, float]]

TOL_DET = 1e-9
TOL_P = 1e-9


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by classification and curve location."""

    det: float = TOL_DET
    p: float = TOL_P
    newton: float = 1e-12
    curve: float = 1e-10
    on_curve: float = 1e-10
    singular: float = 1e-8
    hopf_p: float = 1e-8

    def describe(self) -> str:
        return (f"tol_det={self.det:g} tol_p={self.p:g} tol_newton={self.newton:g} "
                f"tol_curve={self.curve:g} tol_singular={self.singular:g} "
                f"tol_hopf_p={self.hopf_p:g}")


DEFAULT_TOLS = Tolerances()


@dataclass(frozen=True)
class EigenReport:
    """Eigenvalues of a 2x2 matrix.

    ``kind`` is "real" (value1 >= value2 are the eigenvalues) or "complex"
    (value1 = common real part, value2 = positive imaginary part).  ``p`` is
    half the trace and ``big_l`` the determinant, the two characteristic
    quantities the classification theory is phrased in.
    """

    trace: float
    det: float
    kind: str
    value1: float
    value2: float

    @property
    def p(self) -> float:
        return 0.5 * self.trace

    @property
    def big_l(self) -> float:
        return self.det

    def eigenvalues(self) -> tuple[complex, complex]:
        if self.kind == "real":
            return complex(self.value1), complex(self.value2)
        return complex(self.value1, self.value2), complex(self.value1, -self.value2)


class StabilityKind(Enum):
    SADDLE = "saddle"
    ATTRACTOR_NODE = "attractor-node"
    ATTRACTOR_FOCUS = "attractor-focus"
    REPELLER_NODE = "repeller-node"
    REPELLER_FOCUS = "repeller-focus"
    NON_HYPERBOLIC = "non-hyperbolic"


@dataclass(frozen=True)
class StabilityClass:
    kind: StabilityKind
    zero_count: int = 0  # only for NON_HYPERBOLIC: eigenvalues with ~zero real part
    nonzero_sign: int = 0  # sign of the remaining eigenvalue (0 if none)

    @property
    def is_attractor(self) -> bool:
        return self.kind in (StabilityKind.ATTRACTOR_NODE, StabilityKind.ATTRACTOR_FOCUS)

    @property
    def is_repeller(self) -> bool:
        return self.kind in (StabilityKind.REPELLER_NODE, StabilityKind.REPELLER_FOCUS)

    @property
    def is_saddle(self) -> bool:
        return self.kind is StabilityKind.SADDLE

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind is not StabilityKind.NON_HYPERBOLIC

    def code(self) -> str:
        """One-letter class code: s / a / r / u."""
        if self.is_saddle:
            return "s"
        if self.is_attractor:
            return "a"
        if self.is_repeller:
            return "r"
        return "u"


def eigen2(j: Mat2) -> EigenReport:
    """Eigenvalues via trace/determinant with stable discriminant handling."""
    (a, b), (c, d) = j
    for v in (a, b, c, d):
        if not math.isfinite(v):
            raise NonFiniteError(f"non-finite Jacobian entry {v!r}")
    t = a + d
    det = a * d - b * c
    if b == 0.0 or c == 0.0:
        lo, hi = (a, d) if a <= d else (d, a)
        return EigenReport(t, det, "real", hi, lo)
    disc = (a - d) * (a - d) + 4.0 * b * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        if t >= 0.0:
            big = 0.5 * (t + sq)
        else:
            big = 0.5 * (t - sq)
        other = det / big if big != 0.0 else 0.0
        hi, lo = (big, other) if big >= other else (other, big)
        return EigenReport(t, det, "real", hi, lo)
    omega = 0.5 * math.sqrt(-disc)
    return EigenReport(t, det, "complex", 0.5 * t, omega)


def stability_from_eigen(report: EigenReport, tols: Tolerances = DEFAULT_TOLS,
                         scale: float = 1.0) -> StabilityClass:
    """Classify from trace/determinant with norm-scaled tolerances."""
    s = max(1.0, scale)
    tol_det = tols.det * s * s
    tol_p = tols.p * s
    det, p = report.det, report.p
    if abs(det) <= tol_det:
        if abs(report.trace) <= tol_p:
            return StabilityClass(StabilityKind.NON_HYPERBOLIC, 2, 0)
        return StabilityClass(StabilityKind.NON_HYPERBOLIC, 1,
                              1 if report.trace > 0.0 else -1)
    if det < 0.0:
        return StabilityClass(StabilityKind.SADDLE)
    if abs(p) <= tol_p:
        return StabilityClass(StabilityKind.NON_HYPERBOLIC, 2, 0)
    # node vs focus by the sign of p^2 - det at the same relative tolerance;
    # ties report node (no downstream statement depends on the distinction)
    disc = p * p - det
    focus = disc < -tol_det
    if p < 0.0:
        kind = StabilityKind.ATTRACTOR_FOCUS if focus else StabilityKind.ATTRACTOR_NODE
    else:
        kind = StabilityKind.REPELLER_FOCUS if focus else StabilityKind.REPELLER_NODE
    return StabilityClass(kind)


def classify_matrix(j: Mat2, tols: Tolerances = DEFAULT_TOLS) -> tuple[EigenReport, StabilityClass]:
    report = eigen2(j)
    return report, stability_from_eigen(report, tols, frob2(j))


def classify_equilibrium(model: SystemModel, mu, equilibrium: eq.Equilibrium,
                         tols: Tolerances = DEFAULT_TOLS) -> tuple[EigenReport, StabilityClass]:
    """Eigen report and stability class of the Jacobian at a refined equilibrium."""
    j = m.jacobian(model, mu, equilibrium.point)
    return classify_matrix(j, tols)


def axis_eigenvalues(model: SystemModel, mu, xi1: float) -> tuple[float, float]:
    """Closed-form eigenvalues at an axis point (xi1, 0).

    The Jacobian there is triangular, so the eigenvalues are
    3N x^2 - 2 theta x + mu1 (tangential) and S x^2 - delta x + mu2
    (transverse), with all coefficients evaluated at mu.
    """
    mu1, mu2 = m.check_mu(model, mu)
    c = m._local(model, mu1, mu2)
    lam1 = 3.0 * c.n * xi1 * xi1 - 2.0 * c.th * xi1 + mu1
    lam2 = c.s * xi1 * xi1 - c.de * xi1 + mu2
    return lam1, lam2


def char_quantities_E3(model: SystemModel, mu,
                       tols: Tolerances = DEFAULT_TOLS) -> tuple[float, float]:
    """(p, L) = (trace/2, det) of the Jacobian at the refined interior point.

    Cross-checks p against its reaction-term expression
    (x2 - theta x1 + 2N x1^2 - M x1 x2 + 2P x2^2)/2, an identity that holds
    exactly on the equilibrium; a mismatch means Newton did not converge.
    """
    e3 = eq.equilibrium_E3(model, mu)
    j = m.jacobian(model, mu, e3.point)
    report = eigen2(j)
    p = report.p
    mu1, mu2 = m.check_mu(model, mu)
    c = m._local(model, mu1, mu2)
    x1, x2 = e3.point
    p_closed = 0.5 * (x2 - c.th * x1 + 2.0 * c.n * x1 * x1
                      - c.m * x1 * x2 + 2.0 * c.p * x2 * x2)
    scale = max(1.0, frob2(j))
    if abs(p - p_closed) > 1e-9 * scale:
        raise NotOnHopfCurveError(
            f"trace identity violated at mu={mu!r}: {p!r} vs {p_closed!r}")
    return p, report.det


# ---------------------------------------------------------------------------
# First Lyapunov coefficient (numeric, exact derivatives)
# ---------------------------------------------------------------------------


def _lyapunov1_from_jet(omega: float,
                        h1: tuple[float, float, float],
                        h2: tuple[float, float, float],
                        c1: tuple[float, float, float, float],
                        c2: tuple[float, float, float, float]) -> float:
    """First Lyapunov quantity of x' = -w y + f, y' = w x + g at the origin.

    ``h*`` are Hessian triples (xx, xy, yy) and ``c*`` third-derivative
    quadruples (xxx, xxy, xyy, yyy) of f and g.  Negative means a stable
    (supercritical) small cycle.
    """
    fxx, fxy, fyy = h1
    gxx, gxy, gyy = h2
    fxxx, fxxy, fxyy, fyyy = c1
    gxxx, gxxy, gxyy, gyyy = c2
    cubic = fxxx + fxyy + gxxy + gyyy
    quad = (fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy)
    return cubic / 16.0 + quad / (16.0 * omega)


def _transform_jet(t: Mat2, tinv: Mat2,
                   h: tuple[tuple[float, float, float], tuple[float, float, float]],
                   c: tuple[tuple[float, float, float, float], tuple[float, float, float, float]]):
    """Push Hessians/third tensors through the linear change x = T z."""

    def hess_entry(k: int, a: int, b: int) -> float:
        hk = h[k]
        total = 0.0
        for p_i in (0, 1):
            for q_i in (0, 1):
                idx = p_i + q_i  # (0,0)->xx, mixed->xy, (1,1)->yy
                total += hk[idx] * t[p_i][a] * t[q_i][b]
        return total

    def cube_entry(k: int, a: int, b: int, d: int) -> float:
        ck = c[k]
        total = 0.0
        for p_i in (0, 1):
            for q_i in (0, 1):
                for r_i in (0, 1):
                    idx = p_i + q_i + r_i  # number of y-derivatives
                    total += ck[idx] * t[p_i][a] * t[q_i][b] * t[r_i][d]
        return total

    new_h = []
    new_c = []
    for i in (0, 1):
        row = tinv[i]
        hxx = row[0] * hess_entry(0, 0, 0) + row[1] * hess_entry(1, 0, 0)
        hxy = row[0] * hess_entry(0, 0, 1) + row[1] * hess_entry(1, 0, 1)
        hyy = row[0] * hess_entry(0, 1, 1) + row[1] * hess_entry(1, 1, 1)
        new_h.append((hxx, hxy, hyy))
        cxxx = row[0] * cube_entry(0, 0, 0, 0) + row[1] * cube_entry(1, 0, 0, 0)
        cxxy = row[0] * cube_entry(0, 0, 0, 1) + row[1] * cube_entry(1, 0, 0, 1)
        cxyy = row[0] * cube_entry(0, 0, 1, 1) + row[1] * cube_entry(1, 0, 1, 1)
        cyyy = row[0] * cube_entry(0, 1, 1, 1) + row[1] * cube_entry(1, 1, 1, 1)
        new_c.append((cxxx, cxxy, cxyy, cyyy))
    return (new_h[0], new_h[1]), (new_c[0], new_c[1])


def rotation_frame(j: Mat2, omega: float) -> tuple[Mat2, Mat2]:
    """Basis T with T^-1 J T = [[0, -w], [w, 0]] for a near-center Jacobian."""
    (a, b), (c, d) = j
    if abs(b) >= abs(c):
        t = ((b, 0.0), (-a, -omega))
    else:
        t = ((-d, -omega), (c, 0.0))
    det_t = t[0][0] * t[1][1] - t[0][1] * t[1][0]
    if det_t == 0.0:
        raise NotOnHopfCurveError("degenerate eigenbasis for rotation frame")
    tinv = ((t[1][1] / det_t, -t[0][1] / det_t),
            (-t[1][0] / det_t, t[0][0] / det_t))
    return t, tinv


def lyapunov1_numeric(model: SystemModel, mu_hopf,
                      tols: Tolerances = DEFAULT_TOLS) -> float:
    """Signed first Lyapunov coefficient at the interior equilibrium.

    Requires the caller to land on the numerically located Hopf locus:
    |trace/2| must not exceed the hopf tolerance (scaled).  The polynomial
    field gives exact second/third derivatives, so no differencing is done.
    """
    e3 = eq.equilibrium_E3(model, mu_hopf)
    j = m.jacobian(model, mu_hopf, e3.point)
    report = eigen2(j)
    scale = max(1.0, frob2(j))
    if abs(report.p) > tols.hopf_p * scale:
        raise NotOnHopfCurveError(
            f"|Re lambda| = {abs(report.p):g} too large for a Hopf point")
    if report.kind != "complex" or report.det <= 0.0:
        raise NotOnHopfCurveError("eigenvalues are not a complex pair")
    omega = math.sqrt(report.det - report.p * report.p)
    t, tinv = rotation_frame(j, omega)
    h = m.second_partials(model, mu_hopf, e3.point)
    c3 = m.third_partials(model, mu_hopf)
    th, tc = _transform_jet(t, tinv, h, c3)
    return _lyapunov1_from_jet(omega, th[0], th[1], tc[0], tc[1])


def dp_dmu1_at_E3(model: SystemModel, mu, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Exact total derivative of p = trace/2 along mu1, following E3(mu).

    Uses implicit differentiation of the interior-equilibrium system:
    dE3/dmu1 = -(Dg)^-1 g_mu1, then chains through the trace's state and
    parameter gradients.
    """
    e3 = eq.equilibrium_E3(model, mu)
    x1, x2 = e3.point
    mu1, mu2 = m.check_mu(model, mu)
    c = m._local(model, mu1, mu2)
    g_jac = m.inner_jacobian(model, mu, e3.point)
    dth, dga, dde, dm, dn, ds, dp_ = c.d1
    g_mu1 = (1.0 - dth * x1 + dga * x2 - dm * x1 * x2 + dn * x1 * x1,
             -dde * x1 + ds * x1 * x1 + dp_ * x2 * x2)
    dx1, dx2 = solve2(g_jac, (-g_mu1[0], -g_mu1[1]))
    # trace = f1_x1 + f2_x2; state gradient of the trace:
    (h1xx, h1xy, _), (h2xx, h2xy, h2yy) = m.second_partials(model, mu, e3.point)
    dtr_dx1 = h1xx + h2xy
    dtr_dx2 = h1xy + h2yy
    # parameter gradient of the trace = trace of the mixed-derivative matrix
    dj = m.d_mu_state_jacobian(model, mu, e3.point, 1)
    dtr_dmu1 = dj[0][0] + dj[1][1]
    return 0.5 * (dtr_dmu1 + dtr_dx1 * dx1 + dtr_dx2 * dx2)
