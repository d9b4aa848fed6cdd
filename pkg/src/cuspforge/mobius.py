"""Generalized circles and Möbius maps of the Riemann sphere.

A generalized circle is stored by its Hermitian matrix ``C`` so that the
point ``z`` lies on it iff ``[z, 1]^* C [z, 1] = 0``. For a circle with
center ``c`` and radius ``r`` this is ``[[1, -c], [-conj(c), |c|^2 - r^2]]``;
lines have a zero top-left entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CIRCLE = "circle"
LINE = "line"


@dataclass(frozen=True)
class GeneralizedCircle:
    """Either ``circle(center, radius)`` or ``line(normal, offset)``.

    A line is the set of points ``z`` with ``<z, normal> = offset`` where
    ``normal`` is a unit complex number read as a plane vector.
    """

    kind: str
    center: complex = 0j
    radius: float = 0.0
    normal: complex = 1 + 0j
    offset: float = 0.0

    def __post_init__(self):
        if self.kind == CIRCLE and not self.radius > 0:
            raise ValueError(f"circle radius must be positive, got {self.radius}")
        if self.kind == LINE and not math.isclose(abs(self.normal), 1.0, rel_tol=1e-12):
            raise ValueError("line normal must have unit length")

    @classmethod
    def circle(cls, center: complex, radius: float) -> GeneralizedCircle:
        return cls(CIRCLE, center=complex(center), radius=float(radius))

    @classmethod
    def line(cls, normal: complex, offset: float) -> GeneralizedCircle:
        normal = complex(normal)
        return cls(LINE, normal=normal / abs(normal), offset=float(offset))

    @property
    def is_line(self) -> bool:
        return self.kind == LINE

    def hermitian(self) -> np.ndarray:
        if self.is_line:
            # 2 Re(conj(B) z) + D = 0 with B = normal / 2
            b = self.normal / 2
            return np.array([[0, b], [np.conj(b), -self.offset]], dtype=complex)
        c = self.center
        return np.array([[1, -c], [-np.conj(c), abs(c) ** 2 - self.radius**2]], dtype=complex)

    @classmethod
    def from_hermitian(cls, C: np.ndarray, line_tol: float = 1e-12) -> GeneralizedCircle:
        """Inverse of :meth:`hermitian`; ``|A| <= line_tol * scale`` counts as a line."""
        A = C[0, 0].real
        B = C[0, 1]
        D = C[1, 1].real
        scale = max(abs(B), abs(D), 1e-300)
        if abs(A) <= line_tol * scale:
            nb = abs(B)
            return cls.line(B / nb, -D / (2 * nb))
        c = -B / A
        r2 = abs(c) ** 2 - D / A
        if r2 <= 0:
            raise ValueError("Hermitian form does not describe a real circle")
        return cls.circle(c, math.sqrt(r2))

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        if self.is_line:
            return abs((z * self.normal.conjugate()).real - self.offset) <= tol
        return abs(abs(z - self.center) - self.radius) <= tol


def line_distance(l1: GeneralizedCircle, l2: GeneralizedCircle, parallel_tol: float = 1e-7) -> float:
    """Distance between two parallel lines."""
    if not (l1.is_line and l2.is_line):
        raise ValueError("line_distance needs two lines")
    cross = (l1.normal.conjugate() * l2.normal).imag
    if abs(cross) > parallel_tol:
        raise ValueError(f"lines are not parallel (sin angle = {cross:.3g})")
    dot = (l1.normal.conjugate() * l2.normal).real
    return abs(l1.offset - math.copysign(1.0, dot) * l2.offset)


def lines_orthogonal(l1: GeneralizedCircle, l2: GeneralizedCircle, tol: float = 1e-7) -> bool:
    return abs((l1.normal.conjugate() * l2.normal).real) <= tol


class Mobius:
    """``z -> (a z + b) / (c z + d)``."""

    def __init__(self, m):
        self.m = np.array(m, dtype=complex)
        if self.m.shape != (2, 2):
            raise ValueError("Möbius matrix must be 2x2")
        if abs(np.linalg.det(self.m)) == 0:
            raise ValueError("singular Möbius matrix")

    @classmethod
    def invert_at(cls, t: complex) -> Mobius:
        """``z -> 1 / (z - t)``, which sends ``t`` to infinity."""
        return cls([[0, 1], [1, -t]])

    def __call__(self, z):
        (a, b), (c, d) = self.m
        if z == np.inf:
            return a / c if c != 0 else np.inf
        den = c * z + d
        if den == 0:
            return np.inf
        return (a * z + b) / den

    def inverse(self) -> Mobius:
        (a, b), (c, d) = self.m
        return Mobius([[d, -b], [-c, a]])

    def compose(self, other: Mobius) -> Mobius:
        return Mobius(self.m @ other.m)

    def image(self, circ: GeneralizedCircle, through_pole: bool = False) -> GeneralizedCircle:
        """Image of a generalized circle.

        ``through_pole`` declares that ``circ`` passes through the point sent
        to infinity, forcing a line even when round-off says otherwise.
        """
        inv = np.linalg.inv(self.m)
        C2 = inv.conj().T @ circ.hermitian() @ inv
        C2 = (C2 + C2.conj().T) / 2
        if through_pole:
            C2[0, 0] = 0
        return GeneralizedCircle.from_hermitian(C2)


def tangency_point(c1: complex, r1: float, c2: complex, r2: float) -> complex:
    """Contact point of two externally tangent circles (weighted along the center line)."""
    return (r2 * c1 + r1 * c2) / (r1 + r2)


def circumcircle(p: complex, q: complex, r: complex, degenerate_tol: float = 1e-12) -> GeneralizedCircle:
    """Circle through three points; raises ``ValueError`` when they are collinear."""
    a = q - p
    b = r - p
    den = 2 * (a.real * b.imag - a.imag * b.real)
    scale = max(abs(a), abs(b)) ** 2
    if abs(den) <= degenerate_tol * scale:
        raise ValueError("degenerate face: tangency points are collinear")
    ux = (b.imag * abs(a) ** 2 - a.imag * abs(b) ** 2) / den
    uy = (a.real * abs(b) ** 2 - b.real * abs(a) ** 2) / den
    center = p + complex(ux, uy)
    return GeneralizedCircle.circle(center, abs(center - p))
