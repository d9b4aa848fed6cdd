import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_bridge_packing
from cuspforge.diagram import AndreevViolation, NerveTriangulation, gen_two_bridge, nerve, random_diagram
from cuspforge.mobius import GeneralizedCircle
from cuspforge.packing import (
    CirclePacking,
    PackingError,
    cusp_report,
    dual_circle,
    rectangle_at,
    slope_norm_length,
    solve_packing,
)


def expected_white(nv, k):
    """Closed-form 2-bridge moduli: squares except A/D with a C circle (2) and A-D (n - 1)."""
    labs = {nv.labels[int(i)] for i in nv.edges[k]}
    if labs == {"A", "D"}:
        return nv.n - 1
    if labs & {"A", "D"} and any(x.startswith("C") for x in labs):
        return 2.0
    return 1.0


# --- solve_packing -------------------------------------------------------------


def test_tetrahedral_packing_all_squares():
    d, p = two_bridge_packing(2)
    assert p.max_residual <= 1e-12
    for k in range(6):
        assert rectangle_at(p, k).white == pytest.approx(1.0, abs=1e-12)
    # four pairwise tangent circles
    for i in range(4):
        for j in range(i + 1, 4):
            assert abs(p.centers[i] - p.centers[j]) == pytest.approx(p.radii[i] + p.radii[j], abs=1e-12)


def test_tetrahedral_dual_circles_congruent():
    _, p = two_bridge_packing(2)
    # the gauge is symmetric, so the three bounded dual circles share a radius
    radii = [dual_circle(p, f).radius for f in range(4) if f != p.gauge_face]
    assert max(radii) == pytest.approx(min(radii), rel=1e-12)


def test_dual_circle_orthogonal_to_face_circles():
    _, p = two_bridge_packing(5)
    for f in range(p.nerve.num_faces):
        dc = dual_circle(p, f)
        for v in p.nerve.faces[f]:
            dist2 = abs(dc.center - p.centers[v]) ** 2
            assert dist2 == pytest.approx(dc.radius**2 + p.radii[v] ** 2, rel=1e-10)


def test_two_bridge_n5_chain_between_A_and_D():
    d, p = two_bridge_packing(5)
    nv = p.nerve
    chain = ["B1", "C1", "C2", "C3", "B2"]
    for x in chain:
        i = nv.index(x)
        for y in ("A", "D"):
            j = nv.index(y)
            assert abs(p.centers[i] - p.centers[j]) == pytest.approx(p.radii[i] + p.radii[j], abs=1e-12)


def test_doubled_edge_nerve_rejected():
    nv = nerve(gen_two_bridge(3, [24] * 3))
    bad_edges = nv.edges.copy()
    bad_edges[1] = bad_edges[0]
    bad = NerveTriangulation(
        nv.labels, bad_edges, nv.edge_ids, nv.classification, nv.crossings, nv.parity,
        nv.faces, nv.face_ids, nv.face_edges, nv.edge_faces,
    )
    with pytest.raises(AndreevViolation):
        solve_packing(bad)


def test_tolerance_range_enforced():
    nv = nerve(gen_two_bridge(3, [24] * 3))
    for tol in (1e-15, 1e-5, 0.0):
        with pytest.raises(ValueError):
            solve_packing(nv, tol=tol)


def test_nonconvergence_reports_worst_residual():
    nv = nerve(gen_two_bridge(6, [24] * 6))
    with pytest.raises(PackingError) as exc:
        solve_packing(nv, tol=1e-14, max_sweeps=1, max_newton=0)
    assert exc.value.worst_residual > 1e-14


def test_deterministic():
    nv = nerve(gen_two_bridge(5, [24] * 5))
    a = solve_packing(nv)
    b = solve_packing(nv)
    np.testing.assert_array_equal(a.radii, b.radii)
    np.testing.assert_array_equal(a.centers, b.centers)


def test_gauge_circles_fixed():
    _, p = two_bridge_packing(4)
    g = p.nerve.faces[p.gauge_face]
    np.testing.assert_allclose(p.radii[g], 1.0)
    assert isinstance(p.circles[0], GeneralizedCircle)


def test_convergence_stability():
    d = gen_two_bridge(6, [24] * 6)
    nv = nerve(d)
    base = cusp_report(d, solve_packing(nv, tol=1e-10)).h0
    tight = cusp_report(d, solve_packing(nv, tol=5e-11)).h0
    longer = cusp_report(d, solve_packing(nv, tol=1e-10, max_sweeps=40000, max_newton=120)).h0
    assert abs(base - tight) < 10 * 1e-10
    assert abs(base - longer) < 10 * 1e-10


# --- rectangles -----------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 9))
def test_two_bridge_moduli_closed_form(n):
    _, p = two_bridge_packing(n)
    for k in range(p.nerve.num_edges):
        assert rectangle_at(p, k).white == pytest.approx(expected_white(p.nerve, k), abs=1e-9)


def test_rectangle_by_edge_id_and_closed_form_white_spacing():
    _, p = two_bridge_packing(5)
    nv = p.nerve
    r = rectangle_at(p, "D|A")
    assert r.white == pytest.approx(4.0, abs=1e-9)
    assert r.shaded == 1.0 and r.modulus == r.white
    with pytest.raises((IndexError, ValueError)):
        rectangle_at(p, 99)


def test_rectangle_requires_solved_packing():
    _, p = two_bridge_packing(3)
    unsolved = CirclePacking(
        p.nerve, p.centers, p.radii * 1.01, p.angle_defects + 1.0, p.tangency_defects, 0.0, p.tolerance, 0
    )
    with pytest.raises(PackingError):
        rectangle_at(unsolved, 0)


def test_slope_norm_length_values():
    assert slope_norm_length(1, 1, 1) == pytest.approx(1.0)
    assert slope_norm_length(2, 1, 3) == pytest.approx(1.8027756377319946, abs=1e-15)
    for c in (1, 6, 24, 145):
        assert slope_norm_length(c, 1, c) == pytest.approx(math.sqrt(c), rel=1e-15)
    with pytest.raises(ValueError):
        slope_norm_length(0, 1, 3)


@given(st.integers(1, 500), st.floats(1.0, 600.0))
def test_slope_norm_length_minimum(c, w):
    assert slope_norm_length(w, 1.0, c) >= math.sqrt(c) * (1 - 1e-15)


def test_slope_norm_length_grid_minimum_at_w_equals_c():
    c = 17
    ws = np.linspace(1, 60, 5901)
    vals = [slope_norm_length(w, 1.0, c) for w in ws]
    assert ws[int(np.argmin(vals))] == pytest.approx(c)


# --- cusp report ----------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 9))
def test_two_bridge_height(n):
    d, p = two_bridge_packing(n)
    rep = cusp_report(d, p)
    assert rep.height_raw == pytest.approx(4 * n - 4, abs=1e-9)
    assert rep.h0 == pytest.approx(math.sqrt(2 * (n - 1)), abs=1e-10)
    assert rep.meridian == 2.0
    assert len(rep.crossing_circles) == n and len(rep.strand_rectangles) == 2 * n
    assert rep.diagnostics["height_in_interval"] and rep.diagnostics["flags"] == []


def test_two_bridge_n2_height_four():
    d, p = two_bridge_packing(2)
    rep = cusp_report(d, p)
    assert rep.height_raw == pytest.approx(4.0, abs=1e-12)
    assert rep.h0 == pytest.approx(math.sqrt(2), abs=1e-12)


def test_cusp_report_rejects_foreign_packing():
    d3, _ = two_bridge_packing(3)
    _, p4 = two_bridge_packing(4)
    with pytest.raises(ValueError):
        cusp_report(d3, p4)


def test_report_serializes():
    d, p = two_bridge_packing(3)
    doc = cusp_report(d, p).to_dict()
    assert doc["height_raw"] == pytest.approx(8.0)
    assert {"residuals", "height_interval", "flags"} <= set(doc["diagnostics"])


# --- properties over random diagrams ------------------------------------------------


@settings(max_examples=25)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_random_packing_invariants(n, seed):
    d = random_diagram(n, np.random.default_rng(seed))
    nv = nerve(d)
    p = solve_packing(nv, tol=1e-10)
    assert p.angle_defects.max() <= 1e-10
    assert p.tangency_defects.max() <= 1e-10
    assert p.overlap_defect <= 1e-10
    rep = cusp_report(d, p)
    for r in rep.strand_rectangles + [c["rectangle"] for c in rep.crossing_circles]:
        assert 1 - 1e-8 <= r.white <= n - 1 + 1e-8
    assert math.sqrt(n) - 1e-6 <= rep.h0 <= math.sqrt(n * (n - 1)) + 1e-6
    for c in rep.crossing_circles:
        assert c["slope_norm_length"] >= math.sqrt(c["crossings"]) - 1e-8
    other = solve_packing(nv, tol=1e-10, gauge_face=nv.num_faces - 1)
    for k in range(nv.num_edges):
        assert abs(rectangle_at(p, k).white - rectangle_at(other, k).white) < 1e-8
