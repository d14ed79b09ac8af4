"""Parameter-plane sweeps, class-tuple checks, and artifact emission.

A sweep evaluates the full equilibrium inventory on a grid of cell centers.
Each cell yields a *class tuple*: one code per equilibrium id, in inventory
order, with ``s`` saddle, ``a`` attractor, ``r`` repeller, ``u``
non-hyperbolic and ``-`` absent or virtual.  ``CASE_A_TUPLES`` is the full
inventory of hyperbolic tuples attainable across the theta(0)=0 sign
families; sweeps over those families must stay inside it.

Emission is deterministic to the byte: floats are rendered with Python's
shortest round-trip repr (CSV) or a fixed-width format (SVG), rows follow the
grid order, and no timestamps or environment data enter the output.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import classify as cl
from . import curves as cv
from . import equilibria as eq
from . import model as m
from . import portrait as pt
from .errors import IoError, KolmoplaneError, ValidationError
from .model import DegeneracyCase, ParamPoint, SystemModel

Window = tuple[float, float, float, float]


@dataclass(frozen=True)
class CellEntry:
    id: eq.EquilibriumId
    status: eq.EqStatus
    point: m.StatePoint
    eigen: cl.EigenReport | None
    stability: cl.StabilityClass | None


@dataclass(frozen=True)
class SweepCell:
    mu: ParamPoint
    region: cv.RegionLabel | None
    inventory: tuple[CellEntry, ...]
    error: str | None = None


@dataclass(frozen=True)
class SweepGrid:
    case: DegeneracyCase
    ids: tuple[eq.EquilibriumId, ...]
    window: Window
    resolution: int
    cells: tuple[SweepCell, ...]  # row-major: mu2 rows, mu1 within a row

    def cell(self, ix: int, iy: int) -> SweepCell:
        return self.cells[iy * self.resolution + ix]


def grid_centers(window: Window, resolution: int) -> tuple[list[float], list[float]]:
    x0, x1, y0, y1 = window
    xs = [x0 + (i + 0.5) * (x1 - x0) / resolution for i in range(resolution)]
    ys = [y0 + (j + 0.5) * (y1 - y0) / resolution for j in range(resolution)]
    return xs, ys


def analyze_cell(model: SystemModel, mu, tols: cl.Tolerances = cl.DEFAULT_TOLS) -> SweepCell:
    """Region label plus the classified equilibrium inventory at one point."""
    mu = ParamPoint(float(mu[0]), float(mu[1]))
    try:
        region = cv.region_of(model, mu, tols)
        entries = []
        for e in eq.all_equilibria(model, mu):
            if e.status is eq.EqStatus.ABSENT:
                entries.append(CellEntry(e.id, e.status, e.point, None, None))
                continue
            report, stability = cl.classify_equilibrium(model, mu, e, tols)
            entries.append(CellEntry(e.id, e.status, e.point, report, stability))
        return SweepCell(mu, region, tuple(entries))
    except KolmoplaneError as exc:
        return SweepCell(mu, None, (), error=f"{type(exc).__name__}: {exc}")


def _sweep_row(args) -> list[SweepCell]:
    model, window, resolution, iy, tols = args
    xs, ys = grid_centers(window, resolution)
    return [analyze_cell(model, (x, ys[iy]), tols) for x in xs]


def sweep(model: SystemModel, window: Window, resolution: int,
          workers: int = 1, tols: cl.Tolerances = cl.DEFAULT_TOLS) -> SweepGrid:
    """Grid of analyzed cells over a parameter window.

    The window must lie inside the validity disk.  Rows are computed
    independently (optionally by a process pool); assembly order is fixed, so
    the result is identical for any worker count.
    """
    if not (1 <= resolution <= 2048):
        raise ValidationError("resolution must be between 1 and 2048")
    x0, x1, y0, y1 = window
    corner = max(math.hypot(a, b) for a in (x0, x1) for b in (y0, y1))
    if corner > model.radius * (1.0 + 1e-12):
        raise ValidationError(
            f"window corner at |mu| = {corner:g} leaves the validity disk {model.radius:g}")
    case = eq.require_case(model, DegeneracyCase.CASE_A, DegeneracyCase.CASE_B)
    ids = eq.case_ids(case)
    tasks = [(model, window, resolution, iy, tols) for iy in range(resolution)]
    if workers > 1 and resolution > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_sweep_row, tasks, chunksize=4))
    else:
        rows = [_sweep_row(t) for t in tasks]
    cells = tuple(cell for row in rows for cell in row)
    return SweepGrid(case, ids, window, resolution, cells)


# ---------------------------------------------------------------------------
# Class tuples
# ---------------------------------------------------------------------------


def class_tuple(cell: SweepCell) -> tuple[str, ...]:
    """One code per inventory entry: s/a/r/u, or '-' for absent and virtual."""
    if cell.error is not None:
        raise ValidationError(f"cell at {cell.mu} carries an error: {cell.error}")
    codes = []
    for entry in cell.inventory:
        if entry.status is not eq.EqStatus.PROPER or entry.stability is None:
            codes.append("-")
        else:
            codes.append(entry.stability.code())
    return tuple(codes)


#: Hyperbolic class tuples (O, E11, E12, E2, E3) attainable across the
#: theta(0)=0 diagram families; the reachability test exercises all of them.
CASE_A_TUPLES: frozenset[tuple[str, str, str, str, str]] = frozenset({
    ("s", "-", "-", "s", "-"),
    ("s", "-", "-", "r", "s"),
    ("r", "-", "-", "-", "s"),
    ("r", "r", "s", "-", "s"),
    ("r", "s", "s", "-", "-"),
    ("s", "s", "-", "-", "-"),
    ("a", "s", "-", "s", "-"),
    ("r", "s", "a", "-", "s"),
    ("r", "-", "-", "-", "-"),
    ("s", "r", "-", "-", "-"),
    ("a", "r", "-", "s", "-"),
    ("s", "r", "a", "s", "-"),
    ("s", "s", "a", "s", "r"),
    ("s", "-", "-", "s", "r"),
    ("s", "-", "-", "r", "-"),
    ("s", "r", "s", "s", "a"),
    ("s", "r", "s", "s", "r"),
    ("s", "-", "-", "s", "a"),
    ("s", "r", "-", "-", "s"),
    ("s", "s", "a", "s", "-"),
    ("r", "r", "s", "-", "-"),
    ("a", "s", "-", "s", "r"),
})


def admissible_case_a(t: tuple[str, ...]) -> bool:
    """A five-code tuple is admissible if tabulated or touched by a 'u'."""
    return "u" in t or t in CASE_A_TUPLES


def admissible_case_b(t: tuple[str, ...]) -> bool:
    """Embed the four-point inventory (O, E1, E2, E3) into the five-column
    table, matching E1 against either axis slot with the other slot empty."""
    if "u" in t:
        return True
    o, e1, e2, e3 = t
    return ((o, e1, "-", e2, e3) in CASE_A_TUPLES
            or (o, "-", e1, e2, e3) in CASE_A_TUPLES)


def observed_tuples(grid: SweepGrid) -> set[tuple[str, ...]]:
    out = set()
    for cell in grid.cells:
        if cell.error is None:
            out.add(class_tuple(cell))
    return out


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

_EOL = "\r\n"

_REGION_FILL = {
    "R00": "#d9d9d9",
    "R10-": "#aec7e8",
    "R10+": "#6baed6",
    "R20-": "#fdd0a2",
    "R20+": "#fdae6b",
    "Q": "#c7e9c0",
    "Qc": "#e5f5e0",
    "outside": "#ffffff",
}

_CURVE_STROKE = {
    "Delta+": "#d62728",
    "Delta-": "#d62728",
    "T2": "#2ca02c",
    "T3": "#9467bd",
    "T4": "#9467bd",
    "H": "#1f77b4",
    "H1": "#1f77b4",
    "X+": "#555555",
    "X-": "#555555",
    "Y+": "#555555",
    "Y-": "#555555",
}


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(x)


def grid_to_csv(grid: SweepGrid) -> str:
    cols = ["mu1", "mu2", "region"]
    for eid in grid.ids:
        name = eid.value
        cols += [f"{name}_status", f"{name}_class", f"{name}_xi1", f"{name}_xi2",
                 f"{name}_eig1_re", f"{name}_eig1_im", f"{name}_eig2_re", f"{name}_eig2_im"]
    cols.append("error")
    lines = [",".join(cols)]
    for cell in grid.cells:
        row = [_fmt(cell.mu.mu1), _fmt(cell.mu.mu2),
               str(cell.region) if cell.region is not None else ""]
        entries = {e.id: e for e in cell.inventory}
        for eid in grid.ids:
            e = entries.get(eid)
            if e is None:
                row += [""] * 8
                continue
            row.append(e.status.value)
            row.append(e.stability.code() if e.stability is not None else "-")
            row += [_fmt(e.point.xi1), _fmt(e.point.xi2)]
            if e.eigen is None:
                row += ["", "", "", ""]
            elif e.eigen.kind == "real":
                row += [_fmt(e.eigen.value1), _fmt(0.0), _fmt(e.eigen.value2), _fmt(0.0)]
            else:
                row += [_fmt(e.eigen.value1), _fmt(e.eigen.value2),
                        _fmt(e.eigen.value1), _fmt(-e.eigen.value2)]
        row.append(cell.error or "")
        lines.append(",".join(row))
    return _EOL.join(lines) + _EOL


def portrait_to_csv(portrait: pt.PhasePortrait) -> str:
    lines = ["trajectory,t,xi1,xi2,terminal"]
    for k, tr in enumerate(portrait.trajectories):
        for t, point in tr.samples:
            lines.append(",".join([
                str(k), _fmt(t), _fmt(point.xi1), _fmt(point.xi2), tr.terminal.kind]))
    return _EOL.join(lines) + _EOL


def _svg_header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]


def grid_to_svg(grid: SweepGrid, model: SystemModel | None = None,
                size: int = 640, curve_samples: int = 96) -> str:
    """Region coloring by label with located-curve overlays."""
    x0, x1, y0, y1 = grid.window
    res = grid.resolution
    pad = 10.0
    span = size - 2.0 * pad

    def sx(x: float) -> float:
        return pad + (x - x0) / (x1 - x0) * span

    def sy(y: float) -> float:
        return pad + (y1 - y) / (y1 - y0) * span

    out = _svg_header(size, size)
    out.append(f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>')
    cw = span / res
    for iy in range(res):
        for ix in range(res):
            cell = grid.cell(ix, iy)
            if cell.error is not None:
                fill = "#000000"
            elif cell.region is None:
                fill = "#ffffff"
            else:
                fill = _REGION_FILL.get(str(cell.region), "#999999")
            cx = pad + ix * cw
            cyy = pad + (res - 1 - iy) * cw
            out.append(f'<rect x="{cx:.3f}" y="{cyy:.3f}" width="{cw:.3f}" '
                       f'height="{cw:.3f}" fill="{fill}"/>')
    if model is not None:
        for cid in cv.case_curves(model):
            pts = []
            for k in range(curve_samples + 1):
                if cid in (cv.CurveId.X_PLUS, cv.CurveId.X_MINUS,
                           cv.CurveId.Y_PLUS, cv.CurveId.Y_MINUS):
                    continue
                if cid in cv._PARAM_IS_MU2:
                    s = y0 + k * (y1 - y0) / curve_samples
                else:
                    s = x0 + k * (x1 - x0) / curve_samples
                try:
                    sample = cv.curve_point(model, cid, s)
                except KolmoplaneError:
                    continue
                mx, my = sample.mu
                if x0 <= mx <= x1 and y0 <= my <= y1:
                    pts.append((sx(mx), sy(my)))
            if len(pts) >= 2:
                path = " ".join(f"{px:.3f},{py:.3f}" for px, py in pts)
                stroke = _CURVE_STROKE.get(cid.value, "#000000")
                out.append(f'<polyline points="{path}" fill="none" '
                           f'stroke="{stroke}" stroke-width="1.5"/>')
        # axes inside the window
        if x0 <= 0.0 <= x1:
            out.append(f'<line x1="{sx(0.0):.3f}" y1="{sy(y0):.3f}" '
                       f'x2="{sx(0.0):.3f}" y2="{sy(y1):.3f}" '
                       f'stroke="#555555" stroke-width="1.0"/>')
        if y0 <= 0.0 <= y1:
            out.append(f'<line x1="{sx(x0):.3f}" y1="{sy(0.0):.3f}" '
                       f'x2="{sx(x1):.3f}" y2="{sy(0.0):.3f}" '
                       f'stroke="#555555" stroke-width="1.0"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def portrait_to_svg(portrait: pt.PhasePortrait, window: Window, size: int = 640) -> str:
    x0, x1, y0, y1 = window
    pad = 10.0
    span = size - 2.0 * pad

    def sx(x: float) -> float:
        return pad + (x - x0) / (x1 - x0) * span if x1 > x0 else pad

    def sy(y: float) -> float:
        return pad + (y1 - y) / (y1 - y0) * span if y1 > y0 else pad

    out = _svg_header(size, size)
    out.append(f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>')
    for lines, color in ((portrait.nullclines.f1, "#2ca02c"),
                         (portrait.nullclines.f2, "#9467bd")):
        for line in lines:
            if len(line) < 2:
                continue
            path = " ".join(f"{sx(px):.3f},{sy(py):.3f}" for px, py in line)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" '
                       f'stroke-width="1.0" stroke-dasharray="4 3"/>')
    for tr in portrait.trajectories:
        if len(tr.samples) < 2:
            continue
        path = " ".join(f"{sx(p.xi1):.3f},{sy(p.xi2):.3f}" for _, p in tr.samples)
        out.append(f'<polyline points="{path}" fill="none" stroke="#1f77b4" '
                   f'stroke-width="0.8"/>')
    for e in portrait.equilibria:
        fill = "#000000" if e.status is eq.EqStatus.PROPER else "#bbbbbb"
        out.append(f'<circle cx="{sx(e.point.xi1):.3f}" cy="{sy(e.point.xi2):.3f}" '
                   f'r="3.5" fill="{fill}" stroke="#ffffff" stroke-width="1.0"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def grid_to_text(grid: SweepGrid) -> str:
    lines = [
        f"sweep: case={grid.case.value} window={grid.window} resolution={grid.resolution}",
        f"inventory: {' '.join(i.value for i in grid.ids)}",
    ]
    region_counts: dict[str, int] = {}
    tuple_counts: dict[tuple[str, ...], int] = {}
    errors = 0
    for cell in grid.cells:
        if cell.error is not None:
            errors += 1
            continue
        region_counts[str(cell.region)] = region_counts.get(str(cell.region), 0) + 1
        t = class_tuple(cell)
        tuple_counts[t] = tuple_counts.get(t, 0) + 1
    lines.append(f"cells: {len(grid.cells)}  errors: {errors}")
    lines.append("regions:")
    for name in sorted(region_counts):
        lines.append(f"  {name:10s} {region_counts[name]}")
    lines.append("class tuples:")
    for t in sorted(tuple_counts):
        lines.append(f"  ({','.join(t)})  {tuple_counts[t]}")
    return "\n".join(lines) + "\n"


def portrait_to_text(portrait: pt.PhasePortrait) -> str:
    lines = [f"portrait: {len(portrait.trajectories)} trajectories"]
    for e in portrait.equilibria:
        lines.append(f"  {e.id.value}: ({e.point.xi1!r}, {e.point.xi2!r}) {e.status.value}")
    kinds: dict[str, int] = {}
    for tr in portrait.trajectories:
        kinds[tr.terminal.kind] = kinds.get(tr.terminal.kind, 0) + 1
    for kind in sorted(kinds):
        lines.append(f"  terminal {kind}: {kinds[kind]}")
    return "\n".join(lines) + "\n"


def emit(obj, fmt: str, model: SystemModel | None = None,
         window: Window | None = None) -> str:
    """Render a sweep grid or portrait to csv, svg, or text."""
    if isinstance(obj, SweepGrid):
        if fmt == "csv":
            return grid_to_csv(obj)
        if fmt == "svg":
            return grid_to_svg(obj, model)
        if fmt == "text":
            return grid_to_text(obj)
    if isinstance(obj, pt.PhasePortrait):
        if fmt == "csv":
            return portrait_to_csv(obj)
        if fmt == "svg":
            if window is None:
                raise ValidationError("portrait svg needs the state window")
            return portrait_to_svg(obj, window)
        if fmt == "text":
            return portrait_to_text(obj)
    raise ValidationError(f"cannot emit {type(obj).__name__} as {fmt!r}")


def write_text(path, content: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(content)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}")
