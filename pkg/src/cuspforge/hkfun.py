"""Scalar bound functions of the tube radius R and the crossing count c.

``I(R)`` is the number of crossings per twist region that guarantees a tube
radius of at least ``R`` throughout the cone deformation. ``C(R)`` and
``fbar(R)`` bound the change in cusp shape once ``R`` is known, and
``f(c) = fbar(I_inv(c))`` expresses that bound directly in terms of ``c``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

from .quadrature import QuadratureError, RootError, find_root, integrate

HK_CONSTANT = 3.3957
TWO_PI_SQ = (2 * math.pi) ** 2
R_MIN = 0.531  # smallest tube radius for which the integrand bound holds
R_BOUND_MIN = 0.56  # smallest R at which C, fbar are used
I_INV_BRACKET = (0.56, 3.0)
DEHN_SLOPE_THRESHOLD = 7.515
KNOT_C_MIN = 116


class HypothesisError(ValueError):
    """An input lies outside the range where a bound is valid."""


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "gauss-kronrod-7-15"
    abs_tol: float = 1e-12
    max_intervals: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("quadrature tolerance must be positive")
        if self.max_intervals < 1:
            raise ValueError("max_intervals must be at least 1")
        if self.method != "gauss-kronrod-7-15":
            raise ValueError(f"unknown quadrature method {self.method!r}")


DEFAULT_QUAD = QuadratureConfig()


def upsilon(R: float) -> float:
    return HK_CONSTANT * math.tanh(R) / (2.0 * math.cosh(2.0 * R))


def g(R: float) -> float:
    t2 = math.tanh(R) ** 2
    return HK_CONSTANT * t2 * t2 / (1.0 + t2)


def F(w: float) -> float:
    if not 0.0 < w <= 1.0:
        raise ValueError(f"F is defined on (0, 1], got {w}")
    w2 = w * w
    return -(1.0 + 4.0 * w + 6.0 * w2 + w2 * w2) / ((w + 1.0) * (1.0 + w2) ** 2)


def log_integral(R: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Integral of F from 1 down to tanh R (a positive number)."""
    res = integrate(F, 1.0, math.tanh(R), abs_tol=quad.abs_tol, max_intervals=quad.max_intervals)
    return res.value


def I(R: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    if not R >= R_MIN:
        raise HypothesisError(f"I(R) needs R >= {R_MIN}, got {R}")
    # 1 - tanh R loses digits for large R; use 2 / (exp(2R) + 1)
    one_minus_t = 2.0 / (math.exp(2.0 * R) + 1.0)
    return 2.0 * TWO_PI_SQ / (HK_CONSTANT * one_minus_t) * math.exp(log_integral(R, quad))


def _inner(R: float, quad: QuadratureConfig, factor: float) -> float:
    return I(R, quad) - factor * TWO_PI_SQ * math.tanh(R) / g(R)


def C(R1: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    if not R1 >= R_BOUND_MIN:
        raise HypothesisError(f"C(R1) needs R1 >= {R_BOUND_MIN}, got {R1}")
    inner = _inner(R1, quad, 1.0)
    if not inner > 0:
        raise HypothesisError(f"C undefined at R1 = {R1}: inner term {inner:.6g} is not positive")
    return 1.0 / (4.0 * inner * inner * g(R1))


def factor_two_margin(R1: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``I(R1) - 2 (2 pi)^2 tanh R1 / g(R1)``, the stricter side condition.

    ``C`` uses the coefficient ``(2 pi)^2``; this diagnostic reports whether
    the variant with twice that coefficient is also nonnegative.
    """
    return _inner(R1, quad, 2.0)


def fbar(R: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    return TWO_PI_SQ * math.sqrt(C(R, quad)) / (-math.expm1(-2.0 * R) * math.sqrt(2.0))


def I_inv(c: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Tube radius R with I(R) = c.

    Searched on [0.56, 3.0]; for c beyond I(3.0) the upper end is doubled
    until it brackets the root.
    """
    lo, hi = I_INV_BRACKET
    i_lo = I(lo, quad)
    if not c >= i_lo:
        raise HypothesisError(f"I_inv needs c >= I({lo}) = {i_lo:.6f}, got {c}")
    while I(hi, quad) < c:
        if hi > 200:
            raise HypothesisError(f"c = {c} is beyond the supported range")
        lo, hi = hi, 2 * hi
    try:
        return find_root(lambda r: I(r, quad) - c, lo, hi, xtol=1e-15)
    except RootError as exc:  # pragma: no cover - bracket is checked above
        raise QuadratureError(str(exc)) from exc


def f(c: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    if not c >= KNOT_C_MIN:
        raise HypothesisError(f"f(c) needs c >= {KNOT_C_MIN} crossings, got {c}")
    return fbar(I_inv(c, quad), quad)


def R_star(quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Root of fbar(R) = 1; below it the shape bound is vacuous."""
    return find_root(lambda r: fbar(r, quad) - 1.0, 0.6, 0.8, xtol=1e-15)


@dataclass(frozen=True)
class HkConstants:
    I_at_056: float
    R_star: float
    I_at_R_star: float
    c_threshold_at_R_star: int
    fbar_at_1: float
    I_at_1: float
    c_threshold_at_1: int
    f_at_145: float
    dehn_n_threshold: int
    factor_two_margin_at_056: float

    def to_dict(self) -> dict:
        return asdict(self)


def dehn_n_threshold(c: int = 145, quad: QuadratureConfig = DEFAULT_QUAD) -> int:
    """Least n with sqrt(n) (1 - f(c)) >= 7.515."""
    one_minus = 1.0 - f(c, quad)
    n = max(1, math.ceil((DEHN_SLOPE_THRESHOLD / one_minus) ** 2) - 1)
    while math.sqrt(n) * one_minus < DEHN_SLOPE_THRESHOLD:
        n += 1
    return n


def constants(quad: QuadratureConfig = DEFAULT_QUAD) -> HkConstants:
    rs = R_star(quad)
    i_rs = I(rs, quad)
    i_1 = I(1.0, quad)
    return HkConstants(
        I_at_056=I(0.56, quad),
        R_star=rs,
        I_at_R_star=i_rs,
        c_threshold_at_R_star=math.ceil(i_rs),
        fbar_at_1=fbar(1.0, quad),
        I_at_1=i_1,
        c_threshold_at_1=math.ceil(i_1),
        f_at_145=f(145, quad),
        dehn_n_threshold=dehn_n_threshold(145, quad),
        factor_two_margin_at_056=factor_two_margin(0.56, quad),
    )


FUNCTIONS = {
    "upsilon": upsilon,
    "g": g,
    "I": I,
    "C": C,
    "fbar": fbar,
    "factor_two_margin": factor_two_margin,
}


def table(names: list[str], start: float, stop: float, step: float, quad: QuadratureConfig = DEFAULT_QUAD) -> list[dict]:
    """Rows ``{"R": R, name: value, ...}`` for R from start to stop inclusive."""
    if not step > 0:
        raise ValueError("step must be positive")
    unknown = [nm for nm in names if nm not in FUNCTIONS]
    if unknown:
        raise ValueError(f"unknown function(s): {', '.join(unknown)}; choose from {', '.join(FUNCTIONS)}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    rows = []
    for k in range(max(count, 0)):
        R = round(start + k * step, 12)
        row = {"R": R}
        for nm in names:
            fn = FUNCTIONS[nm]
            row[nm] = fn(R) if nm in ("upsilon", "g") else fn(R, quad)
        rows.append(row)
    return rows


def table_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0])
    w.writerow(keys)
    for row in rows:
        w.writerow([repr(row[k]) if isinstance(row[k], float) else row[k] for k in keys])
    return buf.getvalue()
