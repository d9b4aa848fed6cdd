"""Circle packings realising a nerve, and the cusp geometry they determine.

The packing is rendered in the plane with one designated face (the gauge
face) as the unbounded interstice: its three circles are unit circles in a
fixed equilateral configuration and every other circle lies in the bounded
interstice between them. Interior radii are found from angle-sum targets
(2*pi at interior vertices), first by uniform-neighbour relaxation and then
by a damped Newton polish in log-radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .diagram import CROSSING_CIRCLE, STRAND, AndreevViolation, NerveTriangulation, TwistDiagram, nerve
from .mobius import GeneralizedCircle, Mobius, circumcircle, line_distance, lines_orthogonal, tangency_point

TOL_MIN = 1e-14
TOL_MAX = 1e-6
DEFAULT_TOL = 1e-12
MAX_RADIUS_RATIO = 1e8
MERIDIAN_LENGTH = 2.0


class PackingError(RuntimeError):
    """Solver failure: non-convergence, degeneracy, or an invalid nerve."""

    def __init__(self, message: str, worst_residual: float | None = None):
        self.worst_residual = worst_residual
        super().__init__(message)


@dataclass(frozen=True)
class CirclePacking:
    nerve: NerveTriangulation
    centers: np.ndarray  # complex, one per nerve vertex
    radii: np.ndarray
    angle_defects: np.ndarray  # per vertex
    tangency_defects: np.ndarray  # per nerve edge, |dist - (r_i + r_j)|
    overlap_defect: float  # max over non-adjacent pairs of (r_i + r_j - dist), clipped at 0
    tolerance: float
    gauge_face: int
    sweeps: int = 0
    newton_steps: int = 0

    @property
    def circles(self) -> list[GeneralizedCircle]:
        return [GeneralizedCircle.circle(c, r) for c, r in zip(self.centers, self.radii)]

    @property
    def max_residual(self) -> float:
        return float(max(self.angle_defects.max(), self.tangency_defects.max(), self.overlap_defect))

    def residual_summary(self) -> dict:
        return {
            "max_angle_defect": float(self.angle_defects.max()),
            "max_tangency_defect": float(self.tangency_defects.max()),
            "max_overlap": float(self.overlap_defect),
            "tolerance": self.tolerance,
            "gauge_face": int(self.gauge_face),
            "relaxation_sweeps": int(self.sweeps),
            "newton_steps": int(self.newton_steps),
            "radius_ratio": float(self.radii.max() / self.radii.min()),
        }


@dataclass(frozen=True)
class RectangleShape:
    """Cusp rectangle at a tangency, scaled so the shaded side is 1."""

    edge_id: str
    white: float
    shaded: float = 1.0

    @property
    def modulus(self) -> float:
        return self.white / self.shaded

    def to_dict(self) -> dict:
        return {"edge": self.edge_id, "white": self.white, "shaded": self.shaded, "modulus": self.modulus}


@dataclass
class CuspReport:
    n: int
    crossing_circles: list[dict]
    strand_rectangles: list[RectangleShape]
    height_raw: float
    meridian: float
    normalized_height: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def h0(self) -> float:
        return self.normalized_height

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "crossing_circles": [
                {**c, "rectangle": c["rectangle"].to_dict()} for c in self.crossing_circles
            ],
            "strand_rectangles": [r.to_dict() for r in self.strand_rectangles],
            "height_raw": self.height_raw,
            "meridian": self.meridian,
            "normalized_height": self.normalized_height,
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


def _check_andreev(nv: NerveTriangulation) -> None:
    seen = set()
    for k, (a, b) in enumerate(nv.edges):
        if a == b:
            raise AndreevViolation("self-loop", "nerve edge has equal endpoints", nv.edge_ids[k])
        key = (min(a, b), max(a, b))
        if key in seen:
            raise AndreevViolation("doubled edge", "two nerve edges join the same vertices", nv.edge_ids[k])
        seen.add(key)


def _gauge_centers(nv: NerveTriangulation, gauge_face: int) -> dict[int, complex]:
    # gauge face is the unbounded interstice, so it runs clockwise in the plane
    rho = 2.0 / math.sqrt(3.0)
    a, b, c = (int(x) for x in nv.faces[gauge_face])
    return {
        a: rho * complex(math.cos(math.pi / 2), math.sin(math.pi / 2)),
        b: rho * complex(math.cos(math.pi / 2 - 2 * math.pi / 3), math.sin(math.pi / 2 - 2 * math.pi / 3)),
        c: rho * complex(math.cos(math.pi / 2 - 4 * math.pi / 3), math.sin(math.pi / 2 - 4 * math.pi / 3)),
    }


def _corner_angle(rv: float, ra: float, rb: float) -> float:
    return 2.0 * math.atan(math.sqrt(ra * rb / (rv * (rv + ra + rb))))


def _layout(nv: NerveTriangulation, radii: np.ndarray, gauge_face: int) -> np.ndarray:
    placed = _gauge_centers(nv, gauge_face)
    faces = [tuple(int(x) for x in f) for i, f in enumerate(nv.faces) if i != gauge_face]
    pending = list(range(len(faces)))
    while pending:
        rest = []
        for fi in pending:
            f = faces[fi]
            missing = [x for x in f if x not in placed]
            if not missing:
                continue
            if len(missing) > 1:
                rest.append(fi)
                continue
            k = f.index(missing[0])
            z, x, y = f[k], f[(k + 1) % 3], f[(k + 2) % 3]
            # (x, y, z) is counterclockwise: z sits left of x -> y
            theta = _corner_angle(radii[x], radii[y], radii[z])
            direction = (placed[y] - placed[x]) / abs(placed[y] - placed[x])
            placed[z] = placed[x] + (radii[x] + radii[z]) * direction * complex(math.cos(theta), math.sin(theta))
        if len(rest) == len(pending):
            raise PackingError("layout stalled: nerve is not connected through faces")
        pending = rest
    return np.array([placed[i] for i in range(nv.num_vertices)], dtype=complex)


def _residuals(nv: NerveTriangulation, centers: np.ndarray, radii: np.ndarray, gauge_face: int):
    faces = np.delete(nv.faces, gauge_face, axis=0)
    sums = kernels.angle_sums(radii, faces)
    target = np.full(nv.num_vertices, 2 * math.pi)
    target[nv.faces[gauge_face]] = math.pi / 3
    angle_defects = np.abs(sums - target)
    i, j = nv.edges[:, 0], nv.edges[:, 1]
    tangency = np.abs(np.abs(centers[i] - centers[j]) - (radii[i] + radii[j]))
    dist = np.abs(centers[:, None] - centers[None, :])
    gap = radii[:, None] + radii[None, :] - dist
    adjacent = np.eye(nv.num_vertices, dtype=bool)
    adjacent[i, j] = adjacent[j, i] = True
    overlap = float(np.clip(gap[~adjacent], 0.0, None).max()) if (~adjacent).any() else 0.0
    return angle_defects, tangency, overlap


def solve_packing(
    nv: NerveTriangulation,
    tol: float = DEFAULT_TOL,
    gauge_face: int = 0,
    max_sweeps: int = 20000,
    max_newton: int = 60,
) -> CirclePacking:
    """Tangency packing whose nerve is ``nv``.

    The three circles of ``gauge_face`` are fixed unit circles; the result is
    deterministic for a fixed nerve, tolerance and gauge. Raises
    :class:`PackingError` when residuals cannot be brought below ``tol``.
    """
    if not (TOL_MIN <= tol <= TOL_MAX):
        raise ValueError(f"tol must lie in [{TOL_MIN}, {TOL_MAX}], got {tol}")
    if not 0 <= gauge_face < nv.num_faces:
        raise ValueError(f"gauge face {gauge_face} out of range")
    _check_andreev(nv)
    nvert = nv.num_vertices
    faces = np.ascontiguousarray(np.delete(nv.faces, gauge_face, axis=0))
    boundary = np.zeros(nvert, dtype=bool)
    boundary[nv.faces[gauge_face]] = True
    free = ~boundary
    degree = np.bincount(faces.ravel(), minlength=nvert).astype(np.int64)
    target = np.where(free, 2 * math.pi, math.pi / 3)
    radii = np.where(free, 0.25, 1.0)

    radii, sweeps, _ = kernels.relax_radii(radii, faces, degree, free, target, max_sweeps, 1e-7)

    idx = np.flatnonzero(free)
    steps = 0
    resid = kernels.angle_sums(radii, faces)[idx] - 2 * math.pi
    norm = float(np.abs(resid).max()) if idx.size else 0.0
    floor = 0.1 * tol
    while idx.size and norm > floor and steps < max_newton:
        jac = kernels.angle_jacobian(radii, faces)[np.ix_(idx, idx)]
        delta = np.linalg.solve(jac, -resid)
        lam = 1.0
        improved = False
        while lam > 1e-6:
            trial = radii.copy()
            trial[idx] *= np.exp(lam * delta)
            tres = kernels.angle_sums(trial, faces)[idx] - 2 * math.pi
            tnorm = float(np.abs(tres).max())
            if tnorm < norm:
                improved = True
                break
            lam *= 0.5
        steps += 1
        if not improved:
            break  # round-off floor
        radii, resid, norm = trial, tres, tnorm

    ratio = radii.max() / radii.min()
    if not np.isfinite(ratio) or ratio > MAX_RADIUS_RATIO:
        raise PackingError(f"degenerate packing: radius ratio {ratio:.3g} exceeds {MAX_RADIUS_RATIO:.0e}")
    centers = _layout(nv, radii, gauge_face)
    angle_defects, tangency, overlap = _residuals(nv, centers, radii, gauge_face)
    packing = CirclePacking(
        nerve=nv,
        centers=centers,
        radii=radii,
        angle_defects=angle_defects,
        tangency_defects=tangency,
        overlap_defect=overlap,
        tolerance=tol,
        gauge_face=gauge_face,
        sweeps=int(sweeps),
        newton_steps=steps,
    )
    worst = packing.max_residual
    if not worst <= tol:
        raise PackingError(f"packing did not converge: worst residual {worst:.3e} > tol {tol:.1e}", worst)
    return packing


# ---------------------------------------------------------------------------
# geometry read off a packing
# ---------------------------------------------------------------------------


def _tangency(p: CirclePacking, i: int, j: int) -> complex:
    return tangency_point(p.centers[i], p.radii[i], p.centers[j], p.radii[j])


def dual_circle(p: CirclePacking, face: int) -> GeneralizedCircle:
    """Circle through the three tangency points of a face's circles.

    It is orthogonal to all three circles. Raises ``ValueError`` for a
    degenerate (collinear) face.
    """
    a, b, c = (int(x) for x in p.nerve.faces[face])
    return circumcircle(_tangency(p, a, b), _tangency(p, b, c), _tangency(p, c, a))


def _edge_lines(p: CirclePacking, e: int):
    nv = p.nerve
    P, Q = (int(x) for x in nv.edges[e])
    t = _tangency(p, P, Q)
    inv = Mobius.invert_at(t)
    circles = p.circles
    white = [inv.image(circles[P], through_pole=True), inv.image(circles[Q], through_pole=True)]
    shaded = [inv.image(dual_circle(p, int(f)), through_pole=True) for f in nv.edge_faces[e]]
    return inv, white, shaded


def rectangle_at(p: CirclePacking, e: int | str) -> RectangleShape:
    """Rectangle seen after sending the tangency point of edge ``e`` to infinity.

    The two circles of the edge become parallel (white) lines and the dual
    circles of the two adjacent faces become parallel (shaded) lines
    orthogonal to them. With the shaded side scaled to 1 the white side is
    the ratio of the shaded-line spacing to the white-line spacing.
    """
    nv = p.nerve
    if isinstance(e, str):
        e = nv.edge_ids.index(e)
    if not 0 <= e < nv.num_edges:
        raise IndexError(f"no nerve edge {e}")
    if not p.max_residual <= p.tolerance:
        raise PackingError("packing is not solved to its tolerance", p.max_residual)
    _, white, shaded = _edge_lines(p, e)
    if not (lines_orthogonal(white[0], shaded[0]) and lines_orthogonal(white[1], shaded[1])):
        raise PackingError(f"white and shaded lines at edge {nv.edge_ids[e]!r} are not orthogonal")
    s = line_distance(white[0], white[1])
    w = line_distance(shaded[0], shaded[1])
    return RectangleShape(nv.edge_ids[e], w / s, 1.0)


def slope_norm_length(w: float, s: float, c: float) -> float:
    """Normalized length of the slope one white step plus ``c`` shaded steps.

    The crossing-circle torus is two ``w`` by ``s`` rectangles, so its area
    is ``2 w s``.
    """
    if not (w > 0 and s > 0 and c > 0):
        raise ValueError("slope_norm_length needs positive w, s and c")
    return math.sqrt((w * w + c * c * s * s) / (2.0 * w * s))


def cusp_report(d: TwistDiagram, p: CirclePacking) -> CuspReport:
    """Rectangles, crossing-circle slope lengths and the strand-cusp height.

    The height runs along the white side of every strand rectangle; the
    meridian crosses two shaded sides, so has length 2 and the normalized
    height is ``sqrt(H / 2)``. Out-of-range values are flagged in
    ``diagnostics`` rather than raised.
    """
    nv = p.nerve
    if tuple(e.id for e in d.edges) != nv.edge_ids:
        raise ValueError("packing was not solved for this diagram's nerve")
    if not p.max_residual <= p.tolerance:
        raise PackingError("packing residuals exceed tolerance", p.max_residual)
    n = nv.n
    eps = max(10 * p.tolerance, 1e-9)
    crossing, strand = [], []
    flags = []
    for k in range(nv.num_edges):
        rect = rectangle_at(p, k)
        if not (1 - eps <= rect.white <= (n - 1) + eps):
            flags.append(f"white side {rect.white:.12g} at {rect.edge_id!r} outside [1, {n - 1}]")
        if nv.classification[k] == CROSSING_CIRCLE:
            c = nv.crossings[k]
            L = slope_norm_length(rect.white, 1.0, c)
            if L < math.sqrt(c) - eps:
                flags.append(f"slope length {L:.12g} at {rect.edge_id!r} below sqrt({c})")
            crossing.append(
                {
                    "edge": rect.edge_id,
                    "crossings": c,
                    "parity": nv.parity[k],
                    "rectangle": rect,
                    "slope_norm_length": L,
                }
            )
        else:
            assert nv.classification[k] == STRAND
            strand.append(rect)
    H = float(sum(r.white for r in strand))
    h0 = math.sqrt(H / MERIDIAN_LENGTH)
    lo, hi = math.sqrt(n), math.sqrt(n * (n - 1))
    in_range = lo - eps <= h0 <= hi + eps
    if not in_range:
        flags.append(f"normalized height {h0:.12g} outside [{lo:.12g}, {hi:.12g}]")
    diagnostics = {
        "residuals": p.residual_summary(),
        "height_interval": [lo, hi],
        "height_in_interval": in_range,
        "flags": flags,
    }
    return CuspReport(n, crossing, strand, H, MERIDIAN_LENGTH, h0, diagnostics)


def pack_diagram(d: TwistDiagram, tol: float = DEFAULT_TOL, gauge_face: int = 0) -> tuple[CirclePacking, CuspReport]:
    p = solve_packing(nerve(d), tol=tol, gauge_face=gauge_face)
    return p, cusp_report(d, p)
