"""Planar Kolmogorov family with polynomial coefficients.

The family under study is

    dx1/dt = x1 * (mu1 - theta(mu)*x1 + gamma(mu)*x2 - M(mu)*x1*x2 + N(mu)*x1^2)
    dx2/dt = x2 * (mu2 - delta(mu)*x1 +       x2     + S(mu)*x1^2  + P(mu)*x2^2)

where the seven coefficient functions are exact truncated polynomials in the
two parameters ``mu = (mu1, mu2)``.  Both coordinate axes are invariant (each
right-hand side carries its own state factor), which is what makes the family
"Kolmogorov": it models two interacting populations restricted to the closed
first quadrant.

A :class:`SystemModel` is an *exact* polynomial family, not a jet with an
open-ended remainder: every formula downstream (equilibria, eigenvalues,
bifurcation certificates) is evaluated with exact polynomial arithmetic and
exact derivatives, so nothing in the package ever takes a finite difference.

The degenerate regimes handled by the analysis modules are selected by the
constant terms of ``theta`` and ``delta``:

* ``CASE_A``: theta(0) == 0 and delta(0) != 0
* ``CASE_B``: theta(0) != 0 and delta(0) == 0

with ``gamma(0) < 0`` required throughout.  The zero tests are exact tests on
the stored coefficients: the user states the degeneracy by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property, lru_cache
from typing import Mapping, NamedTuple

from .errors import DomainError, IoError, NonFiniteError, ValidationError

Vec2 = tuple[float, float]
Mat2 = tuple[tuple[float, float], tuple[float, float]]


class ParamPoint(NamedTuple):
    """A point in the two-dimensional parameter plane."""

    mu1: float
    mu2: float

    def norm(self) -> float:
        return math.hypot(self.mu1, self.mu2)


class StatePoint(NamedTuple):
    """A point in state space.  Properness (both coordinates >= 0) is a
    queried predicate, not an invariant: virtual equilibria are representable."""

    xi1: float
    xi2: float

    def is_proper(self, tol: float = 1e-10) -> bool:
        return self.xi1 >= -tol and self.xi2 >= -tol


class DegeneracyCase(Enum):
    CASE_A = "CaseA"
    CASE_B = "CaseB"
    NON_DEGENERATE = "NonDegenerate"
    DOUBLY_DEGENERATE = "DoublyDegenerate"


@dataclass(frozen=True)
class BivariatePoly:
    """Polynomial in (mu1, mu2), stored sparsely as ((i, j, c), ...).

    Evaluation is a nested Horner scheme (in mu1, then mu2) over a dense
    coefficient table; no truncation happens after construction.
    """

    coeffs: tuple[tuple[int, int, float], ...]
    max_degree: int = 3

    def __post_init__(self) -> None:
        seen = set()
        for i, j, c in self.coeffs:
            if i < 0 or j < 0 or i + j > self.max_degree:
                raise ValidationError(f"monomial ({i},{j}) exceeds max_degree {self.max_degree}")
            if (i, j) in seen:
                raise ValidationError(f"duplicate monomial ({i},{j})")
            if not math.isfinite(c):
                raise NonFiniteError(f"non-finite coefficient at ({i},{j})")
            seen.add((i, j))

    @staticmethod
    def from_dict(d: Mapping[tuple[int, int], float], max_degree: int = 3) -> "BivariatePoly":
        entries = tuple(sorted((i, j, float(c)) for (i, j), c in d.items() if c != 0.0))
        deg = max([i + j for i, j, _ in entries], default=0)
        return BivariatePoly(entries, max_degree=max(max_degree, deg))

    @staticmethod
    def constant(c: float, max_degree: int = 3) -> "BivariatePoly":
        return BivariatePoly.from_dict({(0, 0): c}, max_degree)

    def coeff(self, i: int, j: int) -> float:
        for ii, jj, c in self.coeffs:
            if ii == i and jj == j:
                return c
        return 0.0

    @cached_property
    def _rows(self) -> tuple[tuple[float, ...], ...]:
        if not self.coeffs:
            return ((0.0,),)
        imax = max(i for i, _, _ in self.coeffs)
        jmax = max(j for _, j, _ in self.coeffs)
        table = [[0.0] * (jmax + 1) for _ in range(imax + 1)]
        for i, j, c in self.coeffs:
            table[i][j] = c
        return tuple(tuple(r) for r in table)

    @cached_property
    def _const_only(self) -> bool:
        return all(i == 0 and j == 0 for i, j, _ in self.coeffs)

    def __call__(self, mu1: float, mu2: float) -> float:
        if self._const_only:
            return self.coeffs[0][2] if self.coeffs else 0.0
        acc = 0.0
        for row in reversed(self._rows):
            rv = 0.0
            for c in reversed(row):
                rv = rv * mu2 + c
            acc = acc * mu1 + rv
        return acc

    def partial(self, which: int) -> "BivariatePoly":
        """Exact partial derivative with respect to mu1 (which=1) or mu2 (which=2)."""
        if which == 1:
            d = {(i - 1, j): i * c for i, j, c in self.coeffs if i > 0}
        elif which == 2:
            d = {(i, j - 1): j * c for i, j, c in self.coeffs if j > 0}
        else:
            raise ValidationError("which must be 1 or 2")
        return BivariatePoly.from_dict(d, self.max_degree)

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(i, j): c for i, j, c in self.coeffs}

    @property
    def constant_term(self) -> float:
        return self.coeff(0, 0)


@dataclass(frozen=True)
class SystemModel:
    """The seven coefficient polynomials of the family plus a validity radius.

    ``radius`` bounds |mu| for every analysis operation: local statements only
    hold for parameters sufficiently close to the origin, and 0.1 keeps the
    quadratic corrections of the coefficient polynomials at the ~10% level.
    """

    theta: BivariatePoly
    gamma: BivariatePoly
    delta: BivariatePoly
    big_m: BivariatePoly
    big_n: BivariatePoly
    big_s: BivariatePoly
    big_p: BivariatePoly
    radius: float = 0.1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValidationError("radius must be positive and finite")
        if not self.gamma.constant_term < 0.0:
            raise ValidationError(
                f"gamma(0,0) must be negative, got {self.gamma.constant_term!r}"
            )

    def polys(self) -> dict[str, BivariatePoly]:
        return {
            "theta": self.theta,
            "gamma": self.gamma,
            "delta": self.delta,
            "M": self.big_m,
            "N": self.big_n,
            "S": self.big_s,
            "P": self.big_p,
        }

    def with_radius(self, radius: float) -> "SystemModel":
        return replace(self, radius=radius)


def make_model(
    theta: Mapping[tuple[int, int], float] | float = 0.0,
    gamma: Mapping[tuple[int, int], float] | float = -1.0,
    delta: Mapping[tuple[int, int], float] | float = 0.0,
    m: Mapping[tuple[int, int], float] | float = 0.0,
    n: Mapping[tuple[int, int], float] | float = 0.0,
    s: Mapping[tuple[int, int], float] | float = 0.0,
    p: Mapping[tuple[int, int], float] | float = 0.0,
    radius: float = 0.1,
    max_degree: int = 3,
) -> SystemModel:
    """Convenience constructor: scalars become constant polynomials."""

    def poly(v) -> BivariatePoly:
        if isinstance(v, Mapping):
            return BivariatePoly.from_dict(v, max_degree)
        return BivariatePoly.constant(float(v), max_degree)

    return SystemModel(
        theta=poly(theta), gamma=poly(gamma), delta=poly(delta),
        big_m=poly(m), big_n=poly(n), big_s=poly(s), big_p=poly(p),
        radius=radius,
    )


class LocalCoeffs(NamedTuple):
    """Coefficient values (and their mu-gradients) frozen at one parameter point."""

    th: float
    ga: float
    de: float
    m: float
    n: float
    s: float
    p: float
    d1: tuple[float, float, float, float, float, float, float]  # d/dmu1 of the seven
    d2: tuple[float, float, float, float, float, float, float]  # d/dmu2 of the seven


@lru_cache(maxsize=32768)
def _local(model: SystemModel, mu1: float, mu2: float) -> LocalCoeffs:
    ps = (model.theta, model.gamma, model.delta, model.big_m, model.big_n,
          model.big_s, model.big_p)
    vals = tuple(q(mu1, mu2) for q in ps)
    d1 = tuple(q.partial(1)(mu1, mu2) for q in ps)
    d2 = tuple(q.partial(2)(mu1, mu2) for q in ps)
    return LocalCoeffs(*vals, d1, d2)


def check_mu(model: SystemModel, mu: Vec2) -> Vec2:
    mu1, mu2 = float(mu[0]), float(mu[1])
    if not (math.isfinite(mu1) and math.isfinite(mu2)):
        raise NonFiniteError(f"non-finite parameter point {mu!r}")
    # tiny relative slack so points computed to land exactly on the radius pass
    if math.hypot(mu1, mu2) > model.radius * (1.0 + 1e-12):
        raise DomainError(
            f"|mu| = {math.hypot(mu1, mu2):g} exceeds the validity radius {model.radius:g}"
        )
    return mu1, mu2


def _check_xi(xi: Vec2) -> Vec2:
    x1, x2 = float(xi[0]), float(xi[1])
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise NonFiniteError(f"non-finite state point {xi!r}")
    return x1, x2


def inner_field(model: SystemModel, mu: Vec2, xi: Vec2) -> Vec2:
    """The reaction terms (g1, g2) with f_i = xi_i * g_i.

    Interior equilibria are the roots of g = 0; solving g instead of f keeps
    Newton well-conditioned near the axes.
    """
    mu1, mu2 = check_mu(model, mu)
    x1, x2 = _check_xi(xi)
    c = _local(model, mu1, mu2)
    g1 = mu1 - c.th * x1 + c.ga * x2 - c.m * x1 * x2 + c.n * x1 * x1
    g2 = mu2 - c.de * x1 + x2 + c.s * x1 * x1 + c.p * x2 * x2
    return g1, g2


def inner_jacobian(model: SystemModel, mu: Vec2, xi: Vec2) -> Mat2:
    """Exact state Jacobian of the reaction terms g."""
    mu1, mu2 = check_mu(model, mu)
    x1, x2 = _check_xi(xi)
    c = _local(model, mu1, mu2)
    return (
        (-c.th - c.m * x2 + 2.0 * c.n * x1, c.ga - c.m * x1),
        (-c.de + 2.0 * c.s * x1, 1.0 + 2.0 * c.p * x2),
    )


def eval_field(model: SystemModel, mu: Vec2, xi: Vec2) -> Vec2:
    """Right-hand side (f1, f2) of the family at (mu, xi)."""
    x1, x2 = _check_xi(xi)
    g1, g2 = inner_field(model, mu, xi)
    f1, f2 = x1 * g1, x2 * g2
    if not (math.isfinite(f1) and math.isfinite(f2)):
        raise NonFiniteError("field evaluation overflowed")
    return f1, f2


def jacobian(model: SystemModel, mu: Vec2, xi: Vec2) -> Mat2:
    """Exact state Jacobian of the field; diag(mu1, mu2) at the origin."""
    mu1, mu2 = check_mu(model, mu)
    x1, x2 = _check_xi(xi)
    c = _local(model, mu1, mu2)
    g1 = mu1 - c.th * x1 + c.ga * x2 - c.m * x1 * x2 + c.n * x1 * x1
    g2 = mu2 - c.de * x1 + x2 + c.s * x1 * x1 + c.p * x2 * x2
    j11 = g1 + x1 * (-c.th - c.m * x2 + 2.0 * c.n * x1)
    j12 = x1 * (c.ga - c.m * x1)
    j21 = x2 * (-c.de + 2.0 * c.s * x1)
    j22 = g2 + x2 * (1.0 + 2.0 * c.p * x2)
    for v in (j11, j12, j21, j22):
        if not math.isfinite(v):
            raise NonFiniteError("Jacobian evaluation overflowed")
    return ((j11, j12), (j21, j22))


def second_partials(model: SystemModel, mu: Vec2, xi: Vec2) -> tuple[
    tuple[float, float, float], tuple[float, float, float]
]:
    """Hessians of (f1, f2) as (h11, h12, h22) triples."""
    mu1, mu2 = check_mu(model, mu)
    x1, x2 = _check_xi(xi)
    c = _local(model, mu1, mu2)
    h1 = (-2.0 * c.th + 6.0 * c.n * x1 - 2.0 * c.m * x2, c.ga - 2.0 * c.m * x1, 0.0)
    h2 = (2.0 * c.s * x2, -c.de + 2.0 * c.s * x1, 2.0 + 6.0 * c.p * x2)
    return h1, h2


def third_partials(model: SystemModel, mu: Vec2) -> tuple[
    tuple[float, float, float, float], tuple[float, float, float, float]
]:
    """Third derivatives of (f1, f2) as (c111, c112, c122, c222); constant in xi."""
    mu1, mu2 = check_mu(model, mu)
    c = _local(model, mu1, mu2)
    return (6.0 * c.n, -2.0 * c.m, 0.0, 0.0), (0.0, 2.0 * c.s, 0.0, 6.0 * c.p)


def second_directional(model: SystemModel, mu: Vec2, xi: Vec2, v: Vec2) -> Vec2:
    """Exact bilinear form D^2 f(xi, mu)(v, v)."""
    v1, v2 = float(v[0]), float(v[1])
    (a11, a12, a22), (b11, b12, b22) = second_partials(model, mu, xi)
    return (
        a11 * v1 * v1 + 2.0 * a12 * v1 * v2 + a22 * v2 * v2,
        b11 * v1 * v1 + 2.0 * b12 * v1 * v2 + b22 * v2 * v2,
    )


def d_mu(model: SystemModel, mu: Vec2, xi: Vec2, which: int) -> Vec2:
    """Exact parameter derivative of the field with respect to mu_which."""
    mu1, mu2 = check_mu(model, mu)
    x1, x2 = _check_xi(xi)
    c = _local(model, mu1, mu2)
    if which == 1:
        dth, dga, dde, dm, dn, ds, dp = c.d1
        lin1, lin2 = 1.0, 0.0
    elif which == 2:
        dth, dga, dde, dm, dn, ds, dp = c.d2
        lin1, lin2 = 0.0, 1.0
    else:
        raise ValidationError("which must be 1 or 2")
    df1 = x1 * (lin1 - dth * x1 + dga * x2 - dm * x1 * x2 + dn * x1 * x1)
    df2 = x2 * (lin2 - dde * x1 + ds * x1 * x1 + dp * x2 * x2)
    return df1, df2


def d_mu_state_jacobian(model: SystemModel, mu: Vec2, xi: Vec2, which: int) -> Mat2:
    """State Jacobian of d_mu(model, mu, xi, which): exact mixed derivatives."""
    mu1, mu2 = check_mu(model, mu)
    x1, x2 = _check_xi(xi)
    c = _local(model, mu1, mu2)
    if which == 1:
        dth, dga, dde, dm, dn, ds, dp = c.d1
        lin1, lin2 = 1.0, 0.0
    elif which == 2:
        dth, dga, dde, dm, dn, ds, dp = c.d2
        lin1, lin2 = 0.0, 1.0
    else:
        raise ValidationError("which must be 1 or 2")
    j11 = lin1 - 2.0 * dth * x1 + dga * x2 - 2.0 * dm * x1 * x2 + 3.0 * dn * x1 * x1
    j12 = x1 * (dga - dm * x1)
    j21 = x2 * (-dde + 2.0 * ds * x1)
    j22 = lin2 - dde * x1 + ds * x1 * x1 + 3.0 * dp * x2 * x2
    return ((j11, j12), (j21, j22))


def classify_case(model: SystemModel) -> DegeneracyCase:
    """Degeneracy tag from exact zero tests on theta(0) and delta(0)."""
    if not model.gamma.constant_term < 0.0:
        raise ValidationError("gamma(0,0) must be negative")
    th0 = model.theta.constant_term
    de0 = model.delta.constant_term
    if th0 == 0.0 and de0 == 0.0:
        return DegeneracyCase.DOUBLY_DEGENERATE
    if th0 == 0.0:
        return DegeneracyCase.CASE_A
    if de0 == 0.0:
        return DegeneracyCase.CASE_B
    return DegeneracyCase.NON_DEGENERATE


# ---------------------------------------------------------------------------
# Model description files (JSON): one object per coefficient, monomial keys
# "i,j" -> value, plus "radius".  Round-trips are bit exact because Python's
# float repr is shortest-round-trip.
# ---------------------------------------------------------------------------

_FILE_KEYS = ("theta", "gamma", "delta", "M", "N", "S", "P")


def model_to_json(model: SystemModel) -> str:
    doc: dict = {"radius": model.radius}
    degree = 0
    for key, poly in model.polys().items():
        doc[key] = {f"{i},{j}": c for i, j, c in poly.coeffs}
        degree = max(degree, poly.max_degree)
    doc["max_degree"] = degree
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def model_from_json(text: str) -> SystemModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"model file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ValidationError("model file must contain a JSON object")
    degree = int(doc.get("max_degree", 3))
    polys = {}
    for key in _FILE_KEYS:
        raw = doc.get(key, {})
        if not isinstance(raw, dict):
            raise ValidationError(f"coefficient {key!r} must map 'i,j' keys to numbers")
        entries: dict[tuple[int, int], float] = {}
        for mono, val in raw.items():
            try:
                i_s, j_s = mono.split(",")
                ij = (int(i_s), int(j_s))
            except (ValueError, AttributeError):
                raise ValidationError(f"bad monomial key {mono!r} in {key!r}")
            entries[ij] = float(val)
        polys[key] = BivariatePoly.from_dict(entries, degree)
    radius = float(doc.get("radius", 0.1))
    return SystemModel(
        theta=polys["theta"], gamma=polys["gamma"], delta=polys["delta"],
        big_m=polys["M"], big_n=polys["N"], big_s=polys["S"], big_p=polys["P"],
        radius=radius,
    )


def load_model(path) -> SystemModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read model file {path}: {exc}")
    return model_from_json(text)


def save_model(model: SystemModel, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(model_to_json(model))
    except OSError as exc:
        raise IoError(f"cannot write model file {path}: {exc}")
