"""Twist-region diagrams (trivalent graphs with a rotation system) and their nerves.

A diagram is the trivalent planar graph obtained by collapsing every twist
region of a knot diagram to a single marked edge. Its planar embedding is
given as a rotation system: each vertex lists its three edge ids in
counterclockwise order. The dual of the embedded graph is the triangulation
of the sphere that the circle packing must realise.

Darts are numbered ``2 * e + side``; side 0 runs ``ends[0] -> ends[1]``.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

DIAGRAM_FORMAT = "cusp-forge-diagram/1"
CROSSING_WARN_THRESHOLD = 116

TWIST = "twist"
PLAIN = "plain"
CROSSING_CIRCLE = "crossing_circle"
STRAND = "strand"


class DiagramError(ValueError):
    """Malformed or invalid diagram.

    ``kind`` is a short machine-readable tag, ``element`` the offending id
    (if any) and ``line`` the 1-based line of the input text (if known).
    """

    def __init__(self, kind: str, message: str, element: str | None = None, line: int | None = None):
        self.kind = kind
        self.element = element
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if element is not None:
            where.append(f"element {element!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{kind}: {message}{suffix}")


class AndreevViolation(DiagramError):
    """The dual triangulation has a self-loop or a doubled edge."""


@dataclass(frozen=True)
class Vertex:
    id: str
    rotation: tuple[str, ...]


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, str]
    kind: str = PLAIN
    crossings: int | None = None
    parity: str | None = None

    @property
    def is_twist(self) -> bool:
        return self.kind == TWIST


@dataclass(frozen=True)
class TwistDiagram:
    """Trivalent graph with twist-marked edges and a counterclockwise rotation system.

    Construction does not validate; use :func:`parse_diagram` (strict) or
    :func:`validate` (reporting).
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    @property
    def n(self) -> int:
        return sum(1 for e in self.edges if e.is_twist)

    @property
    def twist_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.is_twist]

    @property
    def plain_edges(self) -> list[Edge]:
        return [e for e in self.edges if not e.is_twist]

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def to_dict(self) -> dict:
        edges = []
        for e in self.edges:
            rec = {"id": e.id, "ends": list(e.ends), "kind": e.kind}
            if e.is_twist:
                rec["crossings"] = e.crossings
                rec["parity"] = e.parity
            edges.append(rec)
        return {
            "format": DIAGRAM_FORMAT,
            "vertices": [{"id": v.id, "rotation": list(v.rotation)} for v in self.vertices],
            "edges": edges,
        }


@dataclass(frozen=True)
class NerveTriangulation:
    """Dual triangulation of a diagram.

    Vertex ``i`` is a face of the diagram; edge ``k`` is dual to diagram edge
    ``edge_ids[k]``; face ``f`` is dual to diagram vertex ``face_ids[f]``.
    ``faces`` rows are counterclockwise and ``face_edges[f, i]`` is the edge
    joining ``faces[f, i]`` and ``faces[f, (i + 1) % 3]``.
    """

    labels: tuple[str, ...]
    edges: np.ndarray  # (E, 2) int
    edge_ids: tuple[str, ...]
    classification: tuple[str, ...]
    crossings: tuple[int | None, ...]
    parity: tuple[str | None, ...]
    faces: np.ndarray  # (F, 3) int, counterclockwise
    face_ids: tuple[str, ...]
    face_edges: np.ndarray  # (F, 3) int
    edge_faces: np.ndarray  # (E, 2) int

    @property
    def num_vertices(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edge_ids)

    @property
    def num_faces(self) -> int:
        return len(self.face_ids)

    @property
    def n(self) -> int:
        return sum(1 for c in self.classification if c == CROSSING_CIRCLE)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def edge_index(self, u: int, v: int) -> int:
        for k, (a, b) in enumerate(self.edges):
            if {int(a), int(b)} == {u, v}:
                return k
        raise KeyError((u, v))

    def degree(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.num_vertices)

    def neighbours(self, v: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(int(b))
            elif b == v:
                out.add(int(a))
        return out


@dataclass
class Violation:
    condition: str
    elements: list[str]
    message: str

    def to_dict(self) -> dict:
        return {"condition": self.condition, "elements": self.elements, "message": self.message}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "rejected" if self.violations else "ok"

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "violations": [v.to_dict() for v in self.violations],
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# reading and writing
# ---------------------------------------------------------------------------


def _line_of(text: str, element: str | None) -> int | None:
    if element is None:
        return None
    m = re.search(r'"id"\s*:\s*' + re.escape(json.dumps(element)), text)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


def load_diagram(text: str) -> TwistDiagram:
    """Read a diagram file without checking graph invariants."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramError("syntax", exc.msg, line=exc.lineno) from None
    if not isinstance(data, dict):
        raise DiagramError("syntax", "top level must be an object", line=1)
    if data.get("format") != DIAGRAM_FORMAT:
        raise DiagramError("syntax", f"format must be {DIAGRAM_FORMAT!r}, got {data.get('format')!r}")
    vertices = []
    for rec in data.get("vertices", []):
        vid = rec.get("id") if isinstance(rec, dict) else None
        if not isinstance(vid, str) or not isinstance(rec.get("rotation"), list):
            raise DiagramError("syntax", "vertex needs string id and rotation list", vid, _line_of(text, vid))
        vertices.append(Vertex(vid, tuple(str(x) for x in rec["rotation"])))
    edges = []
    for rec in data.get("edges", []):
        eid = rec.get("id") if isinstance(rec, dict) else None
        line = _line_of(text, eid)
        if not isinstance(eid, str):
            raise DiagramError("syntax", "edge needs a string id", eid, line)
        ends = rec.get("ends")
        if not (isinstance(ends, list) and len(ends) == 2):
            raise DiagramError("syntax", "edge ends must be a pair", eid, line)
        kind = rec.get("kind", PLAIN)
        if kind not in (TWIST, PLAIN):
            raise DiagramError("syntax", f"edge kind must be twist or plain, got {kind!r}", eid, line)
        crossings = rec.get("crossings")
        parity = rec.get("parity")
        if kind == TWIST:
            if not isinstance(crossings, int) or isinstance(crossings, bool):
                raise DiagramError("syntax", "twist edge needs an integer crossing count", eid, line)
            if parity is None:
                parity = "odd" if crossings % 2 else "even"
        edges.append(Edge(eid, (str(ends[0]), str(ends[1])), kind, crossings, parity))
    return TwistDiagram(tuple(vertices), tuple(edges))


def parse_diagram(text: str) -> TwistDiagram:
    """Read a diagram file and enforce all diagram invariants.

    Raises :class:`DiagramError` naming the first failed condition, with the
    offending element and its line when available. Andreev conditions on the
    nerve are not checked here; see :func:`validate` and :func:`nerve`.
    """
    d = load_diagram(text)
    problems = _structural_violations(d)
    if problems:
        v = problems[0]
        element = v.elements[0] if v.elements else None
        raise DiagramError(v.condition, v.message, element, _line_of(text, element))
    return d


def dump_diagram(d: TwistDiagram) -> str:
    """Serialise with one vertex or edge record per line."""
    doc = d.to_dict()
    lines = ["{", f'  "format": {json.dumps(doc["format"])},', '  "vertices": [']
    lines += [
        "    " + json.dumps(v) + ("," if i < len(doc["vertices"]) - 1 else "")
        for i, v in enumerate(doc["vertices"])
    ]
    lines += ["  ],", '  "edges": [']
    lines += [
        "    " + json.dumps(e) + ("," if i < len(doc["edges"]) - 1 else "") for i, e in enumerate(doc["edges"])
    ]
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# combinatorics
# ---------------------------------------------------------------------------


@dataclass
class _Darts:
    tail: np.ndarray  # vertex index the dart leaves
    rot: list[list[int]]  # outgoing darts per vertex, counterclockwise
    pos: np.ndarray  # slot of each dart in its tail's rotation
    face_of: np.ndarray
    faces: list[list[int]]


def _darts(d: TwistDiagram) -> _Darts:
    """Build darts and trace faces. Assumes references are already checked."""
    vidx = {v.id: i for i, v in enumerate(d.vertices)}
    eidx = {e.id: i for i, e in enumerate(d.edges)}
    ne = len(d.edges)
    tail = np.full(2 * ne, -1, dtype=np.int64)
    for k, e in enumerate(d.edges):
        tail[2 * k] = vidx[e.ends[0]]
        tail[2 * k + 1] = vidx[e.ends[1]]
    rot: list[list[int]] = []
    pos = np.full(2 * ne, -1, dtype=np.int64)
    for i, v in enumerate(d.vertices):
        darts = []
        seen: Counter[str] = Counter()
        for eid in v.rotation:
            k = eidx[eid]
            e = d.edges[k]
            if e.ends[0] == e.ends[1]:
                side = seen[eid]
            else:
                side = 0 if e.ends[0] == v.id else 1
            seen[eid] += 1
            dart = 2 * k + side
            pos[dart] = len(darts)
            darts.append(dart)
        rot.append(darts)
    face_of = np.full(2 * ne, -1, dtype=np.int64)
    faces: list[list[int]] = []
    for start in range(2 * ne):
        if face_of[start] >= 0:
            continue
        cycle = []
        dart = start
        while face_of[dart] < 0:
            face_of[dart] = len(faces)
            cycle.append(dart)
            back = dart ^ 1
            w = tail[back]
            r = rot[w]
            dart = r[(pos[back] + 1) % len(r)]
        faces.append(cycle)
    return _Darts(tail, rot, pos, face_of, faces)


def _structural_violations(d: TwistDiagram) -> list[Violation]:
    out: list[Violation] = []
    vids = [v.id for v in d.vertices]
    eids = [e.id for e in d.edges]
    for dup, cnt in Counter(vids).items():
        if cnt > 1:
            out.append(Violation("duplicate id", [dup], f"vertex id {dup!r} used {cnt} times"))
    for dup, cnt in Counter(eids).items():
        if cnt > 1:
            out.append(Violation("duplicate id", [dup], f"edge id {dup!r} used {cnt} times"))
    vset, eset = set(vids), set(eids)
    for e in d.edges:
        for end in e.ends:
            if end not in vset:
                out.append(Violation("dangling reference", [e.id], f"edge {e.id!r} ends at unknown vertex {end!r}"))
        if e.is_twist:
            if e.crossings is None or e.crossings < 1:
                out.append(Violation("crossing count", [e.id], "twist edge needs at least one crossing"))
            elif e.parity != ("odd" if e.crossings % 2 else "even"):
                out.append(Violation("parity", [e.id], f"parity {e.parity!r} does not match {e.crossings} crossings"))
    for v in d.vertices:
        for eid in v.rotation:
            if eid not in eset:
                out.append(Violation("dangling reference", [v.id], f"vertex {v.id!r} lists unknown edge {eid!r}"))
        if len(v.rotation) != 3:
            out.append(
                Violation("non-trivalent vertex", [v.id], f"vertex {v.id!r} has {len(v.rotation)} incident edges")
            )
    if out:
        return out
    # every edge end must be matched by exactly one rotation slot
    slots: Counter[tuple[str, str]] = Counter()
    for v in d.vertices:
        for eid in v.rotation:
            slots[(v.id, eid)] += 1
    for e in d.edges:
        need = Counter([(e.ends[0], e.id), (e.ends[1], e.id)])
        for key, cnt in need.items():
            if slots[key] != cnt:
                out.append(
                    Violation("rotation mismatch", [e.id], f"edge {e.id!r} is not listed consistently at {key[0]!r}")
                )
    for v in d.vertices:
        for eid in set(v.rotation):
            e = d.edge(eid)
            if v.id not in e.ends:
                out.append(Violation("rotation mismatch", [v.id], f"vertex {v.id!r} lists edge {eid!r} it is not on"))
    if out:
        return out
    n = d.n
    if n < 2:
        out.append(Violation("n < 2", [], f"need at least two twist edges, found {n}"))
    for v in d.vertices:
        t = sum(1 for eid in v.rotation if d.edge(eid).is_twist)
        if t != 1:
            out.append(Violation("twist matching", [v.id], f"vertex {v.id!r} meets {t} twist edge ends, expected 1"))
    dd = _darts(d)
    V, E, F = len(d.vertices), len(d.edges), len(dd.faces)
    if V - E + F != 2:
        out.append(Violation("Euler characteristic", [], f"V - E + F = {V} - {E} + {F} = {V - E + F}, expected 2"))
    if n >= 2 and (V != 2 * n or E != 3 * n or F != n + 2):
        out.append(Violation("Euler characteristic", [], f"expected V=2n, E=3n, F=n+2 for n={n}; got {V}, {E}, {F}"))
    return out


def _infer_labels(d: TwistDiagram, dd: _Darts) -> tuple[str, ...]:
    """Region names recovered from ``X|Y`` edge ids, else ``R<k>``."""
    labels = []
    for k, cycle in enumerate(dd.faces):
        common = None
        for dart in cycle:
            parts = d.edges[dart // 2].id.split("|")
            if len(parts) != 2:
                common = set()
                break
            common = set(parts) if common is None else common & set(parts)
        labels.append(next(iter(common)) if common and len(common) == 1 else f"R{k}")
    if len(set(labels)) != len(labels):
        labels = [f"R{k}" for k in range(len(dd.faces))]
    return tuple(labels)


def _andreev_violations(d: TwistDiagram, dd: _Darts) -> list[Violation]:
    out = []
    pairs: dict[frozenset, list[str]] = defaultdict(list)
    for k, e in enumerate(d.edges):
        a, b = int(dd.face_of[2 * k]), int(dd.face_of[2 * k + 1])
        if a == b:
            out.append(
                Violation(
                    "self-loop edge of nerve",
                    [e.id],
                    f"edge {e.id!r} has the same region on both sides, so its dual has equal endpoints",
                )
            )
        else:
            pairs[frozenset((a, b))].append(e.id)
    for ids in pairs.values():
        if len(ids) > 1:
            out.append(
                Violation(
                    "doubled edge of nerve",
                    sorted(ids),
                    f"edges {sorted(ids)} separate the same two regions, so their duals join the same vertices",
                )
            )
    return out


def nerve(d: TwistDiagram) -> NerveTriangulation:
    """Planar dual of the diagram, edges classified as crossing circle or strand.

    Raises :class:`AndreevViolation` if an edge of the dual has equal
    endpoints or two vertices of the dual are joined by more than one edge.
    """
    problems = _structural_violations(d)
    if problems:
        v = problems[0]
        raise DiagramError(v.condition, v.message, v.elements[0] if v.elements else None)
    dd = _darts(d)
    andreev = _andreev_violations(d, dd)
    if andreev:
        v = andreev[0]
        kind = "self-loop" if v.condition.startswith("self-loop") else "doubled edge"
        raise AndreevViolation(kind, v.message, v.elements[0])
    edges = np.array([[dd.face_of[2 * k], dd.face_of[2 * k + 1]] for k in range(len(d.edges))], dtype=np.int64)
    faces = np.array([[dd.face_of[x] for x in rot] for rot in dd.rot], dtype=np.int64)
    # the i-th dart separates the regions faces[f, i] and faces[f, i + 1]
    face_edges = np.array([[x // 2 for x in r] for r in dd.rot], dtype=np.int64)
    edge_faces = dd.tail.reshape(-1, 2).copy()
    return NerveTriangulation(
        labels=_infer_labels(d, dd),
        edges=edges,
        edge_ids=tuple(e.id for e in d.edges),
        classification=tuple(CROSSING_CIRCLE if e.is_twist else STRAND for e in d.edges),
        crossings=tuple(e.crossings for e in d.edges),
        parity=tuple(e.parity for e in d.edges),
        faces=faces,
        face_ids=tuple(v.id for v in d.vertices),
        face_edges=face_edges,
        edge_faces=edge_faces,
    )


def validate(d: TwistDiagram) -> ValidationReport:
    """Check every diagram invariant and both Andreev conditions; never raises."""
    report = ValidationReport()
    report.violations.extend(_structural_violations(d))
    if not report.violations:
        report.violations.extend(_andreev_violations(d, _darts(d)))
    for e in d.edges:
        if e.is_twist and e.crossings is not None and e.crossings < CROSSING_WARN_THRESHOLD:
            report.warnings.append(
                f"twist edge {e.id!r} has {e.crossings} crossings, below {CROSSING_WARN_THRESHOLD}: "
                "the general cusp-height bound does not apply"
            )
    return report


def dual_diagram(nv: NerveTriangulation) -> TwistDiagram:
    """Rebuild the diagram from its nerve (inverse of :func:`nerve`)."""
    vertices = tuple(
        Vertex(nv.face_ids[f], tuple(nv.edge_ids[k] for k in nv.face_edges[f]))
        for f in range(nv.num_faces)
    )
    edges = []
    for k in range(nv.num_edges):
        a, b = nv.edge_faces[k]
        twist = nv.classification[k] == CROSSING_CIRCLE
        edges.append(
            Edge(
                nv.edge_ids[k],
                (nv.face_ids[a], nv.face_ids[b]),
                TWIST if twist else PLAIN,
                nv.crossings[k] if twist else None,
                nv.parity[k] if twist else None,
            )
        )
    return TwistDiagram(vertices, tuple(edges))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def diagram_from_triangulation(
    faces: list[tuple[str, str, str]],
    crossing_edges: dict[frozenset, int],
) -> TwistDiagram:
    """Diagram dual to a counterclockwise-oriented triangulation of the sphere.

    ``faces`` are triples of region labels; ``crossing_edges`` maps the
    unordered label pair of each crossing-circle edge to its crossing count.
    Edge ids are ``"X|Y"`` and vertex ids ``"X/Y/Z"``.
    """
    vid = ["/".join(f) for f in faces]
    edge_faces: dict[frozenset, list[int]] = defaultdict(list)
    edge_name: dict[frozenset, str] = {}
    rotations = []
    for fi, (a, b, c) in enumerate(faces):
        rot = []
        for x, y in ((a, b), (b, c), (c, a)):
            key = frozenset((x, y))
            edge_faces[key].append(fi)
            edge_name.setdefault(key, f"{x}|{y}")
            rot.append(edge_name[key])
        # the dart listed first leaves into region a
        rotations.append((rot[2], rot[0], rot[1]))
    vertices = tuple(Vertex(vid[i], rotations[i]) for i in range(len(faces)))
    edges = []
    for key, name in edge_name.items():
        fs = edge_faces[key]
        if len(fs) != 2:
            raise DiagramError("triangulation", f"edge {name!r} lies on {len(fs)} faces", name)
        if key in crossing_edges:
            c = int(crossing_edges[key])
            edges.append(Edge(name, (vid[fs[0]], vid[fs[1]]), TWIST, c, "odd" if c % 2 else "even"))
        else:
            edges.append(Edge(name, (vid[fs[0]], vid[fs[1]]), PLAIN))
    return TwistDiagram(vertices, tuple(edges))


def two_bridge_triangulation(n: int) -> tuple[list[tuple[str, str, str]], list[frozenset]]:
    """Faces and crossing-circle edges of the 2-bridge nerve.

    Regions A (top) and D (bottom) are both adjacent to every circle of the
    chain B1, C1, ..., C(n-2), B2. The i-th chain circle meets its crossing
    circle on the A side for even i and on the D side for odd i.
    """
    if n < 2:
        raise DiagramError("n < 2", f"2-bridge diagrams need n >= 2, got {n}")
    chain = ["B1"] + [f"C{i}" for i in range(1, n - 1)] + ["B2"]
    faces: list[tuple[str, str, str]] = []
    for x, y in zip(chain, chain[1:]):
        faces.append(("A", x, y))
        faces.append(("D", y, x))
    faces.append(("A", chain[-1], "D"))
    faces.append(("A", "D", chain[0]))
    crossing = [frozenset(("A" if i % 2 == 0 else "D", x)) for i, x in enumerate(chain)]
    return faces, crossing


def gen_two_bridge(n: int, crossings: list[int] | tuple[int, ...]) -> TwistDiagram:
    """Trivalent graph of a 2-bridge knot with ``n`` twist regions."""
    if n < 2:
        raise DiagramError("n < 2", f"2-bridge diagrams need n >= 2, got {n}")
    crossings = list(crossings)
    if len(crossings) != n:
        raise DiagramError("crossing list", f"expected {n} crossing counts, got {len(crossings)}")
    if any(int(c) < 1 for c in crossings):
        raise DiagramError("crossing count", "every twist region needs at least one crossing")
    faces, crossing = two_bridge_triangulation(n)
    return diagram_from_triangulation(faces, {key: c for key, c in zip(crossing, crossings)})


def random_triangulation(num_vertices: int, rng: np.random.Generator, flips: int | None = None):
    """Random simple triangulation of the sphere on ``num_vertices`` vertices.

    Built by stacking vertices into random faces of a tetrahedron and then
    performing random edge flips that keep the triangulation simple.
    Returns counterclockwise faces over labels ``"R0", "R1", ...``.
    """
    if num_vertices < 4:
        raise ValueError("need at least 4 vertices")
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    for v in range(4, num_vertices):
        i = int(rng.integers(len(faces)))
        a, b, c = faces.pop(i)
        faces += [(a, b, v), (b, c, v), (c, a, v)]
    flips = 4 * num_vertices if flips is None else flips
    for _ in range(flips):
        edge_set = {frozenset((f[i], f[(i + 1) % 3])) for f in faces for i in range(3)}
        deg = Counter(x for e in edge_set for x in e)
        fi = int(rng.integers(len(faces)))
        k = int(rng.integers(3))
        f1 = faces[fi]
        a, b, c = f1[k], f1[(k + 1) % 3], f1[(k + 2) % 3]
        fj = next(j for j, f in enumerate(faces) if j != fi and (b, a) in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])))
        f2 = faces[fj]
        d = next(x for x in f2 if x not in (a, b))
        if c == d or frozenset((c, d)) in edge_set or deg[a] <= 3 or deg[b] <= 3:
            continue
        faces[fi] = (c, a, d)
        faces[fj] = (d, b, c)
    return [tuple(f"R{x}" for x in f) for f in faces]


def random_face_matching(faces, rng: np.random.Generator) -> list[frozenset] | None:
    """Random set of edges meeting every face exactly once (dual perfect matching)."""
    face_edges = [[frozenset((f[i], f[(i + 1) % 3])) for i in range(3)] for f in faces]
    edge_faces: dict[frozenset, list[int]] = defaultdict(list)
    for fi, es in enumerate(face_edges):
        for e in es:
            edge_faces[e].append(fi)
    order = [int(x) for x in rng.permutation(len(faces))]
    covered = [False] * len(faces)
    chosen: list[frozenset] = []

    def search(pos: int) -> bool:
        while pos < len(order) and covered[order[pos]]:
            pos += 1
        if pos == len(order):
            return True
        fi = order[pos]
        for k in rng.permutation(3):
            e = face_edges[fi][int(k)]
            other = [g for g in edge_faces[e] if g != fi][0]
            if covered[other]:
                continue
            covered[fi] = covered[other] = True
            chosen.append(e)
            if search(pos + 1):
                return True
            chosen.pop()
            covered[fi] = covered[other] = False
        return False

    return chosen if search(0) else None


def random_diagram(n: int, rng: np.random.Generator, crossings=(6, 200)) -> TwistDiagram:
    """Random diagram with ``n`` twist regions passing :func:`validate`.

    Rejection sampling; the acceptance rate falls quickly beyond n = 30.
    """
    while True:
        faces = random_triangulation(n + 2, rng)
        match = random_face_matching(faces, rng)
        if match is None:
            continue
        lo, hi = crossings
        counts = {e: int(rng.integers(lo, hi + 1)) for e in match}
        d = diagram_from_triangulation(faces, counts)
        if validate(d).ok:
            return d
