import functools
import json

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cuspforge.diagram import gen_two_bridge, load_diagram, nerve
from cuspforge.packing import solve_packing

settings.register_profile("cuspforge", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("cuspforge")


@functools.lru_cache(maxsize=None)
def two_bridge_packing(n, c=24, tol=1e-12, gauge=0):
    d = gen_two_bridge(n, [c] * n)
    return d, solve_packing(nerve(d), tol=tol, gauge_face=gauge)


def _diagram_text(rotations, edges):
    doc = {
        "format": "cusp-forge-diagram/1",
        "vertices": [{"id": v, "rotation": list(r)} for v, r in rotations.items()],
        "edges": [
            {"id": e, "ends": list(ends), "kind": kind, **({"crossings": 7, "parity": "odd"} if kind == "twist" else {})}
            for e, (ends, kind) in edges.items()
        ],
    }
    return json.dumps(doc, indent=1)


# 4-cycle with two doubled sides; both twist edges end up dual to the same pair of regions
DOUBLED_TEXT = _diagram_text(
    {"v0": "abf", "v1": "aeb", "v2": "cde", "v3": "cfd"},
    {
        "a": (("v0", "v1"), "plain"),
        "b": (("v0", "v1"), "plain"),
        "e": (("v1", "v2"), "twist"),
        "c": (("v2", "v3"), "plain"),
        "d": (("v2", "v3"), "plain"),
        "f": (("v3", "v0"), "twist"),
    },
)

# v0 carries a loop, so the bridge e1 has one region on both sides
LOOP_TEXT = _diagram_text(
    {"v0": ["e0", "e0", "e1"], "v1": ["e1", "e2", "e3"], "v2": ["e2", "e4", "e5"], "v3": ["e3", "e5", "e4"]},
    {
        "e0": (("v0", "v0"), "plain"),
        "e1": (("v0", "v1"), "twist"),
        "e2": (("v1", "v2"), "plain"),
        "e3": (("v1", "v3"), "plain"),
        "e4": (("v2", "v3"), "twist"),
        "e5": (("v2", "v3"), "plain"),
    },
)


@pytest.fixture
def doubled_diagram():
    return load_diagram(DOUBLED_TEXT)


@pytest.fixture
def loop_diagram():
    return load_diagram(LOOP_TEXT)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# criterion number -> (PASS | FAIL, title, reason), filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title, reason = ACCEPTANCE[number]
        line = f"{status} criterion {number:2d}: {title}"
        terminalreporter.write_line(line + (f" ({reason})" if reason else ""))
