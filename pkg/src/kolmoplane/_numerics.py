"""Scalar and 2x2 numerical kernels.

Everything here works on plain floats; the systems solved are tiny and hot,
so avoiding array allocation matters for sweep throughput.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import BracketError, ConvergenceError

Vec2 = tuple[float, float]
Mat2 = tuple[tuple[float, float], tuple[float, float]]


def solve2(m: Mat2, b: Vec2) -> Vec2:
    """Solve a 2x2 linear system by elimination with partial pivoting."""
    (a11, a12), (a21, a22) = m
    b1, b2 = b
    if abs(a11) < abs(a21):
        a11, a12, b1, a21, a22, b2 = a21, a22, b2, a11, a12, b1
    if a11 == 0.0:
        raise ZeroDivisionError("singular 2x2 system")
    f = a21 / a11
    r22 = a22 - f * a12
    r2 = b2 - f * b1
    if r22 == 0.0:
        raise ZeroDivisionError("singular 2x2 system")
    x2 = r2 / r22
    x1 = (b1 - a12 * x2) / a11
    return x1, x2


def newton1(
    f: Callable[[float], float],
    df: Callable[[float], float],
    x0: float,
    *,
    tol: float = 1e-12,
    max_iter: int = 50,
    max_halvings: int = 20,
) -> tuple[float, float]:
    """Damped scalar Newton iteration.

    Returns ``(root, |f(root)|)``.  The step is halved (up to
    ``max_halvings`` times) whenever it fails to reduce the residual.
    """
    x = x0
    r = abs(f(x))
    if r <= tol:
        return x, r
    for _ in range(max_iter):
        d = df(x)
        if d == 0.0:
            raise ConvergenceError("zero derivative in Newton step", r)
        step = f(x) / d
        scale = 1.0
        for _ in range(max_halvings + 1):
            xn = x - scale * step
            rn = abs(f(xn))
            if rn < r or rn <= tol:
                break
            scale *= 0.5
        x, r = xn, rn
        if r <= tol:
            return x, r
    if r <= 100.0 * tol:  # stagnated at rounding level
        return x, r
    raise ConvergenceError(f"scalar Newton did not reach {tol:g} (residual {r:g})", r)


def newton2(
    fun_jac: Callable[[float, float], tuple[Vec2, Mat2]],
    x0: Vec2,
    *,
    tol: float = 1e-12,
    max_iter: int = 50,
    max_halvings: int = 20,
) -> tuple[Vec2, float]:
    """Damped Newton for a planar system; returns ``((x, y), residual)``.

    The residual is the max norm of the system value.  Seeds are expected to
    be second-order accurate already, so plain steps almost always succeed;
    halving only guards points near curve intersections.
    """
    x, y = x0
    fv, jm = fun_jac(x, y)
    r = max(abs(fv[0]), abs(fv[1]))
    if r <= tol:
        return (x, y), r
    for _ in range(max_iter):
        try:
            dx, dy = solve2(jm, fv)
        except ZeroDivisionError as exc:
            raise ConvergenceError(f"singular Jacobian in Newton step: {exc}", r)
        scale = 1.0
        for _ in range(max_halvings + 1):
            xn, yn = x - scale * dx, y - scale * dy
            fn, jn = fun_jac(xn, yn)
            rn = max(abs(fn[0]), abs(fn[1]))
            if rn < r or rn <= tol:
                break
            scale *= 0.5
        x, y, fv, jm, r = xn, yn, fn, jn, rn
        if r <= tol:
            return (x, y), r
    if r <= 100.0 * tol:
        return (x, y), r
    raise ConvergenceError(f"planar Newton did not reach {tol:g} (residual {r:g})", r)


def bisect_secant(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    max_bisect: int = 80,
    polish: int = 4,
) -> float:
    """Root of ``f`` on a sign-changing bracket: bisection, then secant polish."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"no sign change on [{lo:g}, {hi:g}]")
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    x0, f0 = (lo, flo) if abs(flo) <= abs(fhi) else (hi, fhi)
    x1, f1 = (hi, fhi) if x0 == lo else (lo, flo)
    best_x, best_f = x0, f0
    for _ in range(polish):
        if f1 == f0:
            break
        xn = x0 - f0 * (x1 - x0) / (f1 - f0)
        fn = f(xn)
        if abs(fn) < abs(best_f):
            best_x, best_f = xn, fn
        x0, f0, x1, f1 = xn, fn, x0, f0
        if fn == 0.0:
            break
    return best_x


def expand_bracket(
    f: Callable[[float], float],
    center: float,
    half_width: float,
    lo_limit: float,
    hi_limit: float,
    *,
    max_doublings: int = 48,
) -> tuple[float, float]:
    """Grow a symmetric bracket around ``center`` until ``f`` changes sign.

    The bracket never leaves ``[lo_limit, hi_limit]``; raises
    :class:`BracketError` if no sign change is found inside the limits.
    """
    if not (lo_limit <= center <= hi_limit):
        raise BracketError(f"bracket center {center:g} outside [{lo_limit:g}, {hi_limit:g}]")
    w = max(half_width, 1e-300)
    for _ in range(max_doublings):
        lo = max(center - w, lo_limit)
        hi = min(center + w, hi_limit)
        flo, fhi = f(lo), f(hi)
        if flo == 0.0 or fhi == 0.0 or (flo > 0.0) != (fhi > 0.0):
            return lo, hi
        fc = f(center)
        if (fc > 0.0) != (flo > 0.0):
            return lo, center
        if (fc > 0.0) != (fhi > 0.0):
            return center, hi
        if lo == lo_limit and hi == hi_limit:
            break
        w *= 2.0
    raise BracketError(
        f"no sign change around {center:g} within [{lo_limit:g}, {hi_limit:g}]"
    )


def norm2(v: Vec2) -> float:
    return math.hypot(v[0], v[1])


def frob2(m: Mat2) -> float:
    (a, b), (c, d) = m
    return math.sqrt(a * a + b * b + c * c + d * d)
