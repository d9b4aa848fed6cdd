"""Cusp height bounds, rate bounds and Dehn filling checks.

Heights are normalized so the meridian has length 1. Direct calls raise
:class:`HypothesisError` outside their hypotheses; ``knot_cusp_bounds``
instead returns an inapplicable report, since it sits on the CLI path.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from . import hkfun
from .hkfun import TWO_PI_SQ, HypothesisError

TWO_BRIDGE_C_MIN = 24
TWO_BRIDGE_R1 = 1.0
MERIDIAN_R_MIN = math.log(2.0 / math.sqrt(3.0))


@dataclass(frozen=True)
class BoundReport:
    n: int
    c_min: int
    R1: float | None
    f_c: float | None
    H_lo: float | None
    H_hi: float | None
    applicable: bool
    kind: str = "knot"
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.applicable and not (0 < self.H_lo <= self.H_hi):
            raise ValueError("applicable report needs 0 < H_lo <= H_hi")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class HeightEnvelope:
    h0: float
    n: int
    R1: float
    delta: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.h0 - self.delta, self.h0 + self.delta)

    def to_dict(self) -> dict:
        return {**asdict(self), "interval": list(self.interval)}


def knot_cusp_bounds(n: int, c: int) -> BoundReport:
    if n < 2:
        raise HypothesisError(f"need at least 2 twist regions, got n = {n}")
    if c < hkfun.KNOT_C_MIN:
        note = f"needs at least {hkfun.KNOT_C_MIN} crossings per twist region, got {c}"
        return BoundReport(n, c, None, None, None, None, False, notes=[note])
    R1 = hkfun.I_inv(c)
    fc = hkfun.fbar(R1)
    lo = n * (1.0 - fc) ** 2
    hi = n * (math.sqrt(n - 1) + fc) ** 2
    return BoundReport(n, c, R1, fc, lo, hi, True)


def two_bridge_bounds(n: int, c: int) -> BoundReport:
    if n < 2:
        raise HypothesisError(f"need at least 2 twist regions, got n = {n}")
    if c < TWO_BRIDGE_C_MIN:
        raise HypothesisError(f"2-bridge bound needs at least {TWO_BRIDGE_C_MIN} crossings per twist region, got {c}")
    fb = hkfun.fbar(TWO_BRIDGE_R1)
    env = height_envelope(math.sqrt(2 * (n - 1)), n, TWO_BRIDGE_R1)
    lo, hi = env.interval
    return BoundReport(n, c, TWO_BRIDGE_R1, fb, lo * lo, hi * hi, True, kind="two-bridge")


def height_envelope(h0: float, n: int, R1: float) -> HeightEnvelope:
    """Range of the normalized cusp height after filling, given its value h0 before."""
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    delta = TWO_PI_SQ * math.sqrt(n * hkfun.C(R1)) / (-math.expm1(-2.0 * R1) * math.sqrt(2.0))
    return HeightEnvelope(h0, n, R1, delta)


def rate_bounds(L: float, n: int, R1: float, area: float) -> float:
    """Bound on the rate of change of a normalized length L."""
    if not (L > 0 and n >= 1 and area > 0):
        raise ValueError("rate_bounds needs L > 0, n >= 1 and area > 0")
    return L * math.sqrt(n * hkfun.C(R1) / (2.0 * area))


def teich_speed(a: float, b: float) -> float:
    return math.hypot(a, b)


def cusp_boundary_term(a: float, b: float, area: float) -> float:
    if not area > 0:
        raise ValueError("area must be positive")
    return 2.0 * (a * a + b * b) * area


def meridian_lower(R: float) -> float:
    """Lower bound on the meridian length for tube radius R."""
    if not R >= MERIDIAN_R_MIN:
        raise HypothesisError(f"meridian bound needs R >= log(2/sqrt 3) = {MERIDIAN_R_MIN:.6f}, got {R}")
    return -math.expm1(-2.0 * R)


def quad_width(H: float, L: float) -> float:
    """Width of the quadrilateral at height H over a segment of length L."""
    if not (H > 0 and L > 0):
        raise ValueError("quad_width needs H > 0 and L > 0")
    return 2.0 * math.exp(-H) * math.sinh(0.5 * L)


def dehn_filling_check(n: int, c: int) -> bool:
    """True when every non-trivial filling of the knot is guaranteed hyperbolic."""
    if n < 2:
        raise HypothesisError(f"need at least 2 twist regions, got n = {n}")
    if c < hkfun.KNOT_C_MIN:
        return False
    return math.sqrt(n) * (1.0 - hkfun.f(c)) >= hkfun.DEHN_SLOPE_THRESHOLD
