"""Adaptive Gauss-Kronrod quadrature and bracketed root finding.

Both are small and self-contained so that every bound function has a fixed,
inspectable numerical path with explicit error control.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

# 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (positive half, then 0)
_XK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
# Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the center
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


class QuadratureError(ArithmeticError):
    pass


class RootError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    intervals: int


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    k = _WK[7] * fc
    g = _WG[3] * fc
    for i in range(7):
        dx = h * _XK[i]
        s = f(c - dx) + f(c + dx)
        k += _WK[i] * s
        if i % 2 == 1:
            g += _WG[i // 2] * s
    return k * h, abs((k - g) * h)


def integrate(f, a: float, b: float, abs_tol: float = 1e-12, rel_tol: float = 0.0, max_intervals: int = 2000) -> QuadResult:
    """Integral of ``f`` over ``[a, b]`` by globally adaptive G7-K15.

    Bisects the interval with the largest error estimate until the summed
    estimate is at most ``max(abs_tol, rel_tol * |value|)``. Orientation is
    respected (``b < a`` gives the negated integral).
    """
    if not abs_tol > 0 and not rel_tol > 0:
        raise ValueError("need a positive tolerance")
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    v, e = _gk15(f, a, b)
    heap = [(-e, a, b, v)]
    total_v, total_e = v, e
    count = 1
    while total_e > max(abs_tol, rel_tol * abs(total_v)):
        if count >= max_intervals:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] after {count} intervals (error estimate {total_e:.3e})"
            )
        ne, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        count += 1
        # recompute sums from the heap to avoid drift
        total_v = math.fsum(item[3] for item in heap)
        total_e = math.fsum(-item[0] for item in heap)
    return QuadResult(sign * total_v, total_e, count)


def find_root(f, lo: float, hi: float, xtol: float = 1e-14, ftol: float = 0.0, max_iter: int = 200) -> float:
    """Root of ``f`` in ``[lo, hi]`` where ``f`` changes sign.

    Bisection shrinks the bracket until secant steps stay inside it, then
    secant steps (safeguarded by the bracket) finish the job.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise RootError(f"f does not change sign on [{lo}, {hi}] (f = {flo:.6g}, {fhi:.6g})")
    for _ in range(max_iter):
        if hi - lo <= xtol * max(1.0, abs(lo)):
            break
        # secant guess, fall back to the midpoint when it leaves the inner bracket
        x = hi - fhi * (hi - lo) / (fhi - flo)
        margin = 0.05 * (hi - lo)
        if not (lo + margin < x < hi - margin):
            x = 0.5 * (lo + hi)
        fx = f(x)
        if fx == 0 or abs(fx) <= ftol:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
    else:
        raise RootError(f"root not isolated within {max_iter} iterations (bracket [{lo}, {hi}])")
    return lo if abs(flo) <= abs(fhi) else hi
