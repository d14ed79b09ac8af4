"""Trajectories, nullclines, and first-quadrant phase portraits.

The integrator is a hand-rolled Dormand-Prince 5(4) embedded pair with
proportional step control; the local polynomial field is mild inside the
validity radius, so no stiffness handling is needed.  Because each component
of the field carries its own state factor, a coordinate that is exactly zero
stays exactly zero through every Runge-Kutta stage: the axes are invariant in
floating point, not only in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import equilibria as eq
from . import model as m
from .errors import CaseError, StepUnderflowError, ValidationError
from .model import StatePoint, SystemModel

Window = tuple[float, float, float, float]  # x0, x1, y0, y1

# Dormand-Prince 5(4) tableau (the 5th-order solution is propagated)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


@dataclass(frozen=True)
class IntegrationOptions:
    rtol: float = 1e-8
    atol: float = 1e-10
    escape_radius: float = 1.0
    min_step: float = 1e-14
    field_tol: float = 1e-10
    eq_dist_tol: float = 1e-6
    equilibria: tuple[eq.Equilibrium, ...] | None = None


@dataclass(frozen=True)
class Terminal:
    kind: str  # "time-limit" | "escaped" | "converged" | "hit-axis"
    equilibrium: eq.EquilibriumId | None = None


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[tuple[float, StatePoint], ...]
    terminal: Terminal

    @property
    def end(self) -> StatePoint:
        return self.samples[-1][1]


def _known_equilibria(model: SystemModel, mu,
                      opts: IntegrationOptions) -> tuple[eq.Equilibrium, ...]:
    if opts.equilibria is not None:
        return opts.equilibria
    try:
        return tuple(e for e in eq.all_equilibria(model, mu) if e.exists)
    except CaseError:
        return ()


def integrate(model: SystemModel, mu, xi0, t_max: float,
              opts: IntegrationOptions | None = None) -> Trajectory:
    """Adaptive-step solution from xi0 with terminal-cause detection.

    Terminal causes: reaching ``t_max``; leaving ``escape_radius``;
    convergence (field max-norm below ``field_tol`` within ``eq_dist_tol`` of
    a known equilibrium); or an interior seed underflowing onto an axis.
    """
    if not t_max > 0.0:
        raise ValidationError("t_max must be positive")
    opts = opts or IntegrationOptions()
    knowns = _known_equilibria(model, mu, opts)
    x, y = float(xi0[0]), float(xi0[1])
    interior_seed = x > 1e-12 and y > 1e-12

    def rhs(px: float, py: float) -> tuple[float, float]:
        return m.eval_field(model, mu, (px, py))

    def terminal_at(px: float, py: float) -> Terminal | None:
        fx, fy = rhs(px, py)
        if max(abs(fx), abs(fy)) <= opts.field_tol:
            for e in knowns:
                if math.hypot(px - e.point.xi1, py - e.point.xi2) <= opts.eq_dist_tol:
                    return Terminal("converged", e.id)
        if math.hypot(px, py) > opts.escape_radius:
            return Terminal("escaped")
        if interior_seed and (px <= 1e-12 or py <= 1e-12):
            return Terminal("hit-axis")
        return None

    t = 0.0
    samples = [(t, StatePoint(x, y))]
    term = terminal_at(x, y)
    if term is not None:
        return Trajectory(tuple(samples), term)

    fx, fy = rhs(x, y)
    speed = math.hypot(fx, fy)
    h = min(t_max, 0.01 * (math.hypot(x, y) + 1.0) / speed) if speed > 0.0 else 0.01 * t_max

    while t < t_max:
        h = min(h, t_max - t)
        if h < opts.min_step:
            raise StepUnderflowError(f"step size {h:g} fell below {opts.min_step:g} at t={t:g}")
        kx = [0.0] * 7
        ky = [0.0] * 7
        kx[0], ky[0] = rhs(x, y)
        for i in range(1, 7):
            ax = x
            ay = y
            row = _A[i]
            for j, a in enumerate(row):
                if a != 0.0:
                    ax += h * a * kx[j]
                    ay += h * a * ky[j]
            kx[i], ky[i] = rhs(ax, ay)
        xn = x + h * sum(b * k for b, k in zip(_B, kx))
        yn = y + h * sum(b * k for b, k in zip(_B, ky))
        ex = h * sum(e * k for e, k in zip(_E, kx))
        ey = h * sum(e * k for e, k in zip(_E, ky))
        sc = opts.atol + opts.rtol * max(math.hypot(x, y), math.hypot(xn, yn))
        err = max(abs(ex), abs(ey)) / sc
        if err <= 1.0:
            t += h
            x, y = xn, yn
            samples.append((t, StatePoint(x, y)))
            term = terminal_at(x, y)
            if term is not None:
                return Trajectory(tuple(samples), term)
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = max(0.2, 0.9 * err ** -0.2)
        h *= factor
    return Trajectory(tuple(samples), Terminal("time-limit"))


# ---------------------------------------------------------------------------
# Nullclines by marching squares on the reaction terms
# ---------------------------------------------------------------------------

Polyline = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class NullclineSet:
    f1: tuple[Polyline, ...]
    f2: tuple[Polyline, ...]


def _axis_segments(window: Window, component: int) -> list[Polyline]:
    x0, x1, y0, y1 = window
    segs: list[Polyline] = []
    if component == 1 and x0 <= 0.0 <= x1 and y1 > y0:
        segs.append(((0.0, y0), (0.0, y1)))
    if component == 2 and y0 <= 0.0 <= y1 and x1 > x0:
        segs.append(((x0, 0.0), (x1, 0.0)))
    return segs


def _marching_squares(g, window: Window, resolution: int) -> list[Polyline]:
    x0, x1, y0, y1 = window
    nx = ny = resolution
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    xs = [x0 + i * dx for i in range(nx + 1)]
    ys = [y0 + j * dy for j in range(ny + 1)]
    vals = [[g(xs[i], ys[j]) for j in range(ny + 1)] for i in range(nx + 1)]

    def polish(ax: float, ay: float, bx: float, by: float,
               fa: float, fb: float) -> tuple[float, float]:
        # secant for the root of g along the grid edge
        ta, tb, ga_, gb_ = 0.0, 1.0, fa, fb
        t = ta - ga_ * (tb - ta) / (gb_ - ga_)
        for _ in range(30):
            px = ax + t * (bx - ax)
            py = ay + t * (by - ay)
            gv = g(px, py)
            if abs(gv) <= 1e-9:
                break
            if (gv > 0.0) == (ga_ > 0.0):
                ta, ga_ = t, gv
            else:
                tb, gb_ = t, gv
            if gb_ == ga_:
                break
            t = ta - ga_ * (tb - ta) / (gb_ - ga_)
            t = min(max(t, 0.0), 1.0)
        return ax + t * (bx - ax), ay + t * (by - ay)

    hcross: dict[tuple[int, int], tuple[float, float]] = {}
    vcross: dict[tuple[int, int], tuple[float, float]] = {}

    def h_edge(i: int, j: int) -> tuple[float, float] | None:
        fa, fb = vals[i][j], vals[i + 1][j]
        if (fa > 0.0) == (fb > 0.0):
            return None
        key = (i, j)
        if key not in hcross:
            hcross[key] = polish(xs[i], ys[j], xs[i + 1], ys[j], fa, fb)
        return hcross[key]

    def v_edge(i: int, j: int) -> tuple[float, float] | None:
        fa, fb = vals[i][j], vals[i][j + 1]
        if (fa > 0.0) == (fb > 0.0):
            return None
        key = (i, j)
        if key not in vcross:
            vcross[key] = polish(xs[i], ys[j], xs[i], ys[j + 1], fa, fb)
        return vcross[key]

    segments: list[tuple[tuple[float, float], tuple[float, float]]] = []
    for i in range(nx):
        for j in range(ny):
            pts = []
            for p in (h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)):
                if p is not None:
                    pts.append(p)
            if len(pts) == 2:
                segments.append((pts[0], pts[1]))
            elif len(pts) == 4:
                # saddle cell: pair crossings by the sign at the cell center
                center = g(xs[i] + 0.5 * dx, ys[j] + 0.5 * dy)
                corner = vals[i][j]
                b, r, tp, le = pts
                if (center > 0.0) == (corner > 0.0):
                    segments.append((b, r))
                    segments.append((tp, le))
                else:
                    segments.append((b, le))
                    segments.append((tp, r))

    # chain shared-endpoint segments into polylines
    adjacency: dict[tuple[float, float], list[int]] = {}
    for idx, (a, b) in enumerate(segments):
        adjacency.setdefault(a, []).append(idx)
        adjacency.setdefault(b, []).append(idx)
    used = [False] * len(segments)
    polylines: list[Polyline] = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        a, b = segments[start]
        chain = [a, b]
        for head in (1, 0):
            while True:
                tip = chain[-1] if head else chain[0]
                nxt = None
                for idx in adjacency.get(tip, ()):
                    if not used[idx]:
                        nxt = idx
                        break
                if nxt is None:
                    break
                used[nxt] = True
                sa, sb = segments[nxt]
                other = sb if sa == tip else sa
                if head:
                    chain.append(other)
                else:
                    chain.insert(0, other)
        polylines.append(tuple(chain))
    return polylines


def nullclines(model: SystemModel, mu, window: Window, resolution: int = 64) -> NullclineSet:
    """Zero-level polylines of both field components inside a window.

    The coordinate axes are factors of the field and are emitted analytically;
    the interior branches (zeros of the reaction terms) come from marching
    squares with a secant polish, so each emitted vertex satisfies
    |component| <= 1e-6.
    """
    if resolution < 16:
        raise ValidationError("nullcline resolution must be at least 16")
    x0, x1, y0, y1 = window
    if x1 < x0 or y1 < y0:
        raise ValidationError("window must have non-negative extent")
    f1_lines = _axis_segments(window, 1)
    f2_lines = _axis_segments(window, 2)
    if x1 > x0 and y1 > y0:
        g1 = lambda px, py: m.inner_field(model, mu, (px, py))[0]
        g2 = lambda px, py: m.inner_field(model, mu, (px, py))[1]
        f1_lines.extend(_marching_squares(g1, window, resolution))
        f2_lines.extend(_marching_squares(g2, window, resolution))
    return NullclineSet(tuple(f1_lines), tuple(f2_lines))


# ---------------------------------------------------------------------------
# Portraits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PortraitSpec:
    window: Window
    seeds_per_side: int = 4
    t_max: float = 2000.0
    escape_radius: float = 1.0
    nullcline_resolution: int = 48
    rtol: float = 1e-8
    atol: float = 1e-10

    def __post_init__(self) -> None:
        x0, x1, y0, y1 = self.window
        if x0 < 0.0 or y0 < 0.0 or x1 < x0 or y1 < y0:
            raise ValidationError("portrait window must lie in the first quadrant")
        if self.seeds_per_side < 1:
            raise ValidationError("seeds_per_side must be at least 1")


@dataclass(frozen=True)
class PhasePortrait:
    trajectories: tuple[Trajectory, ...]
    nullclines: NullclineSet
    equilibria: tuple[eq.Equilibrium, ...]


def _seed_points(spec: PortraitSpec, equilibria) -> list[tuple[float, float]]:
    x0, x1, y0, y1 = spec.window
    if x1 == x0 or y1 == y0:
        return []
    n = spec.seeds_per_side
    seeds: list[tuple[float, float]] = []
    for k in range(n):
        f = (k + 0.5) / n
        seeds.append((x0 + f * (x1 - x0), y0))
        seeds.append((x0 + f * (x1 - x0), y1))
        seeds.append((x0, y0 + f * (y1 - y0)))
        seeds.append((x1, y0 + f * (y1 - y0)))
    ring = 0.02 * math.hypot(x1 - x0, y1 - y0)
    for e in equilibria:
        if e.status is not eq.EqStatus.PROPER:
            continue
        cx, cy = e.point
        for k in range(8):
            ang = 2.0 * math.pi * k / 8.0
            px, py = cx + ring * math.cos(ang), cy + ring * math.sin(ang)
            if px >= 0.0 and py >= 0.0:
                seeds.append((px, py))
    return seeds


def phase_portrait(model: SystemModel, mu, spec: PortraitSpec) -> PhasePortrait:
    """Deterministic first-quadrant portrait: boundary and ring seeds."""
    equilibria = tuple(e for e in eq.all_equilibria(model, mu) if e.exists)
    x0, x1, y0, y1 = spec.window
    if x1 == x0 or y1 == y0:
        return PhasePortrait((), NullclineSet((), ()), equilibria)
    opts = IntegrationOptions(rtol=spec.rtol, atol=spec.atol,
                              escape_radius=spec.escape_radius,
                              equilibria=equilibria)
    trajectories = tuple(
        integrate(model, mu, seed, spec.t_max, opts)
        for seed in _seed_points(spec, equilibria)
    )
    ncl = nullclines(model, mu, spec.window, spec.nullcline_resolution)
    return PhasePortrait(trajectories, ncl, equilibria)
