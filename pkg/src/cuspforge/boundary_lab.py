"""Quadratic boundary terms on the simplex and the points they guarantee.

A :class:`QuadraticBoundarySystem` fixes ``n`` areas, three scalar
coefficients ``a < 0 < b, c`` and two ``n x n`` matrices ``X, Y``. For a rate
vector ``s`` it gives one boundary term per component::

    b_j(s) = area_j * (c s_j^2 + a (p_j^2 + q_j^2) + b s_j p_j),
    p_j = sum_k s_k X[k, j],  q_j = sum_k s_k Y[k, j].

Everything is searched on the simplex ``T = {s >= 0, sum s = n}``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize

from . import kernels

QBS_FORMAT = "cusp-forge-qbs/1"
GRID_RES = 64
GRID_BUDGET = 250_000
LEMMA41 = "lemma41"
LEMMA42 = "lemma42"


class BoundaryLabError(ValueError):
    pass


class SearchFailure(RuntimeError):
    """A search ran out of budget. Never evidence against the existence result it targets."""

    def __init__(self, message: str, best: FeasiblePoint | None = None, severity: str = "diagnostic"):
        self.best = best
        self.severity = severity
        super().__init__(message)


@dataclass(frozen=True)
class QuadraticBoundarySystem:
    areas: np.ndarray
    coeff_a: float
    coeff_b: float
    coeff_c: float
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        areas = np.asarray(self.areas, dtype=float)
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        n = areas.shape[0]
        if areas.ndim != 1 or n < 1:
            raise BoundaryLabError("areas must be a non-empty vector")
        if X.shape != (n, n) or Y.shape != (n, n):
            raise BoundaryLabError(f"X and Y must be {n}x{n}")
        if not (areas > 0).all():
            raise BoundaryLabError("areas must be positive")
        if not self.coeff_a < 0:
            raise BoundaryLabError(f"coeff_a must be negative, got {self.coeff_a}")
        if not (self.coeff_b > 0 and self.coeff_c > 0):
            raise BoundaryLabError("coeff_b and coeff_c must be positive")
        object.__setattr__(self, "areas", areas)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        for arr in (areas, X, Y):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.areas.shape[0]

    def sum_matrix(self) -> np.ndarray:
        """Symmetric M with sum_j b_j(s) = s^T M s."""
        D = np.diag(self.areas)
        XD = self.X @ D
        return (
            self.coeff_c * D
            + self.coeff_a * (self.X @ D @ self.X.T + self.Y @ D @ self.Y.T)
            + 0.5 * self.coeff_b * (XD + XD.T)
        )

    def _kernel_args(self):
        return (
            np.ascontiguousarray(self.areas),
            float(self.coeff_a),
            float(self.coeff_b),
            float(self.coeff_c),
            np.ascontiguousarray(self.X),
            np.ascontiguousarray(self.Y),
        )

    def jittered(self, rng: np.random.Generator, size: float = 1e-9) -> QuadraticBoundarySystem:
        return QuadraticBoundarySystem(
            self.areas,
            self.coeff_a,
            self.coeff_b,
            self.coeff_c,
            self.X + size * rng.uniform(-1, 1, self.X.shape),
            self.Y + size * rng.uniform(-1, 1, self.Y.shape),
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "areas": self.areas.tolist(),
            "coeff_a": self.coeff_a,
            "coeff_b": self.coeff_b,
            "coeff_c": self.coeff_c,
            "X": self.X.tolist(),
            "Y": self.Y.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> QuadraticBoundarySystem:
        try:
            sys = cls(d["areas"], float(d["coeff_a"]), float(d["coeff_b"]), float(d["coeff_c"]), d["X"], d["Y"])
        except KeyError as exc:
            raise BoundaryLabError(f"system record is missing field {exc.args[0]!r}") from None
        if "n" in d and int(d["n"]) != sys.n:
            raise BoundaryLabError(f"n = {d['n']} does not match {sys.n} areas")
        return sys


@dataclass(frozen=True)
class FeasiblePoint:
    s: np.ndarray
    b_values: np.ndarray
    kind: str
    tolerance: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def min_b(self) -> float:
        return float(self.b_values.min())

    def satisfies(self, tol: float | None = None) -> bool:
        tol = self.tolerance if tol is None else tol
        if not (self.b_values >= -tol).all():
            return False
        if self.kind == LEMMA42:
            high = self.s > self.s.min() + tol
            return bool((self.b_values[high] <= tol).all())
        return True

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "s": self.s.tolist(),
            "b_values": self.b_values.tolist(),
            "min_b": self.min_b,
            "tolerance": self.tolerance,
            "diagnostics": self.diagnostics,
        }


def eval_b(sys: QuadraticBoundarySystem, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.shape != (sys.n,):
        raise BoundaryLabError(f"s must have {sys.n} entries, got shape {s.shape}")
    p = np.einsum("k,kj->j", s, sys.X)
    q = np.einsum("k,kj->j", s, sys.Y)
    return sys.areas * (sys.coeff_c * s * s + sys.coeff_a * (p * p + q * q) + sys.coeff_b * s * p)


def grid_resolution(n: int, res: int = GRID_RES, budget: int = GRID_BUDGET) -> int:
    """Largest resolution <= res whose simplex grid has at most ``budget`` points."""
    while res > 1 and math.comb(res + n - 1, n - 1) > budget:
        res -= 1
    return res


def simplex_minimum(sys: QuadraticBoundarySystem) -> tuple[float, np.ndarray]:
    """Exact minimum of sum_j b_j over T.

    The minimum of a quadratic form on a simplex is a stationary point in
    the relative interior of some face, so it is found by solving the
    Lagrange system on every support.
    """
    n = sys.n
    if n > 14:
        raise BoundaryLabError("exact simplex minimum is limited to n <= 14")
    M = sys.sum_matrix()
    best, best_s = math.inf, None
    for k in range(1, n + 1):
        for S in itertools.combinations(range(n), k):
            idx = list(S)
            A = np.zeros((k + 1, k + 1))
            A[:k, :k] = 2 * M[np.ix_(idx, idx)]
            A[:k, k] = A[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = n
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.abs(A @ sol - rhs).max() > 1e-9 * max(1.0, np.abs(A).max()):
                continue  # singular and inconsistent: the minimum lies on a smaller face
            x = sol[:k]
            if (x < -1e-12).any():
                continue
            s = np.zeros(n)
            s[idx] = np.clip(x, 0, None)
            s *= n / s.sum()
            val = float(s @ M @ s)
            if val < best:
                best, best_s = val, s
    return best, best_s


def validity_check(sys: QuadraticBoundarySystem, res: int = GRID_RES) -> bool:
    """True iff sum_j b_j > 0 on all of T.

    A grid scan at the requested resolution (capped by a point budget) is
    refined by the exact minimum over every face of T.
    """
    r = grid_resolution(sys.n, res)
    grid_min = kernels.simplex_scan(r, *sys._kernel_args())[0]
    if not grid_min > 0:
        return False
    exact, _ = simplex_minimum(sys)
    return exact > 0


def random_system(n: int, rng: np.random.Generator, max_tries: int = 10_000) -> QuadraticBoundarySystem:
    """Random valid system; parameters are rejection-sampled until valid."""
    for _ in range(max_tries):
        sys = QuadraticBoundarySystem(
            rng.uniform(0.5, 2.0, n),
            float(rng.uniform(-0.5, -0.05)),
            float(rng.uniform(0.1, 1.0)),
            float(rng.uniform(0.5, 2.0)),
            rng.uniform(-0.5, 0.5, (n, n)),
            rng.uniform(-0.5, 0.5, (n, n)),
        )
        if validity_check(sys):
            return sys
    raise BoundaryLabError(f"no valid system found in {max_tries} draws")


def _simplex_constraints(n: int):
    return {"type": "eq", "fun": lambda z: z[:n].sum() - n, "jac": lambda z: np.r_[np.ones(n), 0.0]}


def feasible_point(sys: QuadraticBoundarySystem, tol: float = 1e-9, res: int = GRID_RES) -> FeasiblePoint:
    """Point of T with every b_j >= -tol.

    Maximizes min_j b_j: a grid scan picks the start, then a constrained
    local ascent on (s, t) with b_j(s) >= t refines it.
    """
    n = sys.n
    if n > 8:
        raise BoundaryLabError("feasible_point supports n <= 8")
    r = grid_resolution(n, res)
    _, _, grid_best, start, count = kernels.simplex_scan(r, *sys._kernel_args())
    start = np.array(start, dtype=float)
    z0 = np.r_[start, grid_best]
    cons = [
        _simplex_constraints(n),
        {"type": "ineq", "fun": lambda z: eval_b(sys, z[:n]) - z[n]},
    ]
    opt = minimize(
        lambda z: -z[n],
        z0,
        jac=lambda z: np.r_[np.zeros(n), -1.0],
        method="SLSQP",
        bounds=[(0.0, float(n))] * n + [(None, None)],
        constraints=cons,
        options={"ftol": 1e-15, "maxiter": 500},
    )
    candidates = [start]
    if np.all(np.isfinite(opt.x)):
        s = np.clip(opt.x[:n], 0.0, None)
        candidates.append(s * (n / s.sum()))
    values = [eval_b(sys, s) for s in candidates]
    k = int(np.argmax([v.min() for v in values]))
    point = FeasiblePoint(
        candidates[k],
        values[k],
        LEMMA41,
        tol,
        {
            "grid_resolution": r,
            "grid_points": int(count),
            "grid_min_b": float(grid_best),
            "refined": k == 1,
            "optimizer_message": str(opt.message),
        },
    )
    if not point.satisfies():
        raise SearchFailure(
            f"no point with all b_j >= -{tol:g} found (best min b_j = {point.min_b:.3e}); "
            "on a valid system this contradicts the existence result",
            point,
            severity="high",
        )
    return point


def _solve_support(sys: QuadraticBoundarySystem, J: list[int], starts: np.ndarray, tol: float):
    """Points with b_j = 0 on J and every other coordinate at the common minimum."""
    n = sys.n

    def build(d):
        m = (n - d.sum()) / n
        s = np.full(n, m)
        s[J] = m + d
        return s

    def resid(d):
        return eval_b(sys, build(d))[J]

    for d0 in starts:
        try:
            sol = least_squares(resid, d0, bounds=(0.0, float(n)), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        except ValueError:
            continue
        s = build(sol.x)
        if s.min() < -1e-12:
            continue
        s = np.clip(s, 0.0, None)
        b = eval_b(sys, s)
        yield s, b


def kerckhoff_point(
    sys: QuadraticBoundarySystem,
    tol: float = 1e-6,
    starts: int = 8,
    seed: int = 0,
    jitter: bool = True,
) -> FeasiblePoint:
    """Point of T with all b_j >= 0 and b_j = 0 wherever s_j is above the minimum.

    Candidate zero-sets J are tried from small to large; on each, the
    coordinates outside J share the minimum value and the system b_J = 0 is
    solved by bounded least squares from several seeded starts. When every
    candidate fails, the search is repeated once on a system jittered by
    1e-9 to restore transversality.
    """
    n = sys.n
    if n > 4:
        raise BoundaryLabError("kerckhoff_point supports n <= 4")
    rng = np.random.default_rng(seed)
    attempts = 0
    best = None
    for J in (list(c) for k in range(n) for c in itertools.combinations(range(n), k)):
        if not J:
            s = np.ones(n)
            found = [(s, eval_b(sys, s))]
        else:
            d0 = np.vstack([np.full(len(J), 0.5), rng.uniform(0.0, n / len(J), (starts - 1, len(J)))])
            found = _solve_support(sys, J, d0, tol)
        for s, b in found:
            attempts += 1
            cand = FeasiblePoint(s, b, LEMMA42, tol, {"zero_set": J, "attempts": attempts, "jittered": False})
            if cand.satisfies():
                return cand
            if best is None or cand.min_b > best.min_b:
                best = cand
    if jitter:
        try:
            p = kerckhoff_point(sys.jittered(np.random.default_rng(seed + 1)), tol, starts, seed + 1, jitter=False)
        except SearchFailure:
            pass
        else:
            b = eval_b(sys, p.s)
            cand = FeasiblePoint(p.s, b, LEMMA42, tol, {**p.diagnostics, "jittered": True})
            if cand.satisfies():
                return cand
    raise SearchFailure(f"no kerckhoff point found after {attempts} candidates; this does not refute existence", best)


def rescale_min_one(p: FeasiblePoint) -> FeasiblePoint:
    """Scale s so its smallest entry is 1; b scales by the square of the factor."""
    m = float(p.s.min())
    if not m > 0:
        raise BoundaryLabError("cannot rescale: smallest coordinate is zero (not expected on a valid system)")
    return FeasiblePoint(p.s / m, p.b_values / (m * m), p.kind, p.tolerance, {**p.diagnostics, "rescaled_by": 1.0 / m})


N2_SCAN_STEP = 1e-6


def count_zeros_n2(sys: QuadraticBoundarySystem, step: float = N2_SCAN_STEP) -> int:
    """Sign changes of b_1 along the edge of T from (2, 0) to (0, 2)."""
    if sys.n != 2:
        raise BoundaryLabError("count_zeros_n2 needs n = 2")
    t1, t2 = np.array([2.0, 0.0]), np.array([0.0, 2.0])
    b_start, b_end = eval_b(sys, t1)[0], eval_b(sys, t2)[0]
    if not (b_start > 0 and b_end < 0):
        raise BoundaryLabError(f"endpoint signs fail: b_1(t1) = {b_start:.6g} must be > 0, b_1(t2) = {b_end:.6g} must be < 0")
    steps = int(round(1.0 / step))
    changes = kernels.segment_sign_changes(t1, t2, steps, 0, *sys._kernel_args())
    return int(len(changes))


def load_systems(text: str) -> list[QuadraticBoundarySystem]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BoundaryLabError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("format") != QBS_FORMAT:
        raise BoundaryLabError(f'expected "format": "{QBS_FORMAT}"')
    return [QuadraticBoundarySystem.from_dict(r) for r in doc.get("systems", [])]


def dump_systems(systems: list[QuadraticBoundarySystem], seeds: list[int] | None = None) -> str:
    recs = []
    for i, s in enumerate(systems):
        r = s.to_dict()
        if seeds is not None:
            r["seed"] = seeds[i]
        recs.append(r)
    return json.dumps({"format": QBS_FORMAT, "systems": recs}, indent=1) + "\n"
