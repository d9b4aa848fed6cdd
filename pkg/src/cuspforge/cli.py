"""Command-line front end.

Exit status: 0 on success, 1 when an input fails validation or a bound's
hypothesis, 2 on numerical failure. Errors are written to stderr as one JSON
record per line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, bounds, hkfun
from .boundary_lab import (
    BoundaryLabError,
    SearchFailure,
    count_zeros_n2,
    dump_systems,
    feasible_point,
    kerckhoff_point,
    load_systems,
    random_system,
)
from .diagram import DiagramError, dump_diagram, gen_two_bridge, load_diagram, nerve, validate
from .hkfun import HypothesisError
from .packing import DEFAULT_TOL, TOL_MAX, TOL_MIN, PackingError, cusp_report, rectangle_at, solve_packing
from .quadrature import QuadratureError, RootError

TOL_ENV = "CUSPFORGE_TOL"
SCHEMA = "cusp-forge-{}/1"

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class CliError(Exception):
    def __init__(self, status: int, kind: str, message: str):
        self.status = status
        self.kind = kind
        super().__init__(message)


def _emit_json(doc: dict, out) -> None:
    out.write(json.dumps(doc, indent=2) + "\n")


def _fmt(x: float, digits: int = 10) -> str:
    return f"{x:.{digits}g}"


def default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise CliError(EXIT_INVALID, "config", f"{TOL_ENV}={raw!r} is not a number") from None
    return tol


def _check_tol(tol: float) -> float:
    if not TOL_MIN <= tol <= TOL_MAX:
        raise CliError(EXIT_INVALID, "config", f"tolerance {tol:g} outside [{TOL_MIN:g}, {TOL_MAX:g}]")
    return tol


def _crossings(n: int, values: list[int]) -> list[int]:
    if len(values) == 1:
        return values * n
    return values


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    text = Path(args.file).read_text()
    d = load_diagram(text)
    report = validate(d)
    if args.json:
        _emit_json({"schema": SCHEMA.format("validation"), "file": args.file, **report.to_dict()}, out)
    else:
        out.write(f"status: {report.status}\n")
        for v in report.violations:
            out.write(f"violation: {v.condition}: {v.message} [{', '.join(v.elements)}]\n")
        for w in report.warnings:
            out.write(f"warning: {w}\n")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_gen(args, out) -> int:
    d = gen_two_bridge(args.n, _crossings(args.n, args.c))
    text = dump_diagram(d)
    if args.output:
        Path(args.output).write_text(text)
    if args.json:
        _emit_json({"schema": SCHEMA.format("gen"), "output": args.output, "diagram": d.to_dict()}, out)
    elif not args.output:
        out.write(text)
    return EXIT_OK


def _pack_source(args):
    if args.source == "two-bridge":
        if args.n is None or args.c is None:
            raise CliError(EXIT_INVALID, "usage", "pack two-bridge needs --n and --c")
        return gen_two_bridge(args.n, _crossings(args.n, args.c))
    d = load_diagram(Path(args.source).read_text())
    report = validate(d)
    if not report.ok:
        v = report.violations[0]
        raise DiagramError(v.condition, v.message, v.elements[0] if v.elements else None)
    return d


def cmd_pack(args, out) -> int:
    tol = _check_tol(args.tol if args.tol is not None else default_tol())
    d = _pack_source(args)
    nv = nerve(d)
    p = solve_packing(nv, tol=tol, gauge_face=args.gauge)
    rep = cusp_report(d, p)
    if args.svg:
        from .svg import packing_svg

        Path(args.svg).write_text(packing_svg(p))
    if args.rect_svg:
        from .svg import rectangle_svg

        folder = Path(args.rect_svg)
        folder.mkdir(parents=True, exist_ok=True)
        for e, eid in enumerate(nv.edge_ids):
            (folder / f"rect_{eid.replace('|', '-')}.svg").write_text(rectangle_svg(p, e))
    if args.json:
        doc = {"schema": SCHEMA.format("report"), **rep.to_dict()}
        doc["rectangles"] = [rectangle_at(p, e).to_dict() for e in range(nv.num_edges)]
        _emit_json(doc, out)
    else:
        out.write(f"twist regions: {rep.n}\n")
        out.write("crossing circles:\n")
        for c in rep.crossing_circles:
            out.write(
                f"  {c['edge']}: c={c['crossings']} parity={c['parity']} "
                f"white={_fmt(c['rectangle'].white)} slope length={_fmt(c['slope_norm_length'])}\n"
            )
        out.write("strand rectangles:\n")
        for r in rep.strand_rectangles:
            out.write(f"  {r.edge_id}: white={_fmt(r.white)}\n")
        out.write(f"raw height: {_fmt(rep.height_raw)}\n")
        out.write(f"meridian: {_fmt(rep.meridian)}\n")
        out.write(f"normalized height: {_fmt(rep.normalized_height)}\n")
        lo, hi = rep.diagnostics["height_interval"]
        ok = "ok" if rep.diagnostics["height_in_interval"] else "VIOLATED"
        out.write(f"height interval [{_fmt(lo)}, {_fmt(hi)}]: {ok}\n")
        res = rep.diagnostics["residuals"]
        out.write(
            f"residuals: angle {res['max_angle_defect']:.1e}, tangency {res['max_tangency_defect']:.1e}, "
            f"overlap {res['max_overlap']:.1e} (tol {tol:.0e})\n"
        )
        for flag in rep.diagnostics["flags"]:
            out.write(f"flag: {flag}\n")
    return EXIT_OK


def cmd_bounds(args, out) -> int:
    c = min(args.c)
    if args.two_bridge:
        rep = bounds.two_bridge_bounds(args.n, c)
        dehn = None
    else:
        rep = bounds.knot_cusp_bounds(args.n, c)
        dehn = bounds.dehn_filling_check(args.n, c) if rep.applicable else False
    if args.json:
        doc = {"schema": SCHEMA.format("bounds"), **rep.to_dict()}
        if dehn is not None:
            doc["dehn_fillings_hyperbolic"] = dehn
        _emit_json(doc, out)
    else:
        out.write(f"bound: {rep.kind}\n")
        out.write(f"twist regions: {rep.n}\n")
        out.write(f"crossings per region (min): {rep.c_min}\n")
        out.write(f"applicable: {str(rep.applicable).lower()}\n")
        if rep.applicable:
            out.write(f"R1: {_fmt(rep.R1)}\n")
            label = "fbar(R1)" if rep.kind == "two-bridge" else "f(c)"
            out.write(f"{label}: {_fmt(rep.f_c)}\n")
            out.write(f"height lower bound: {_fmt(rep.H_lo)}\n")
            out.write(f"height upper bound: {_fmt(rep.H_hi)}\n")
        for note in rep.notes:
            out.write(f"note: {note}\n")
        if dehn is not None:
            out.write(f"all non-trivial Dehn fillings hyperbolic: {str(dehn).lower()}\n")
    return EXIT_OK if rep.applicable else EXIT_INVALID


def _quad(args) -> hkfun.QuadratureConfig:
    return hkfun.QuadratureConfig(abs_tol=args.quad_tol)


def cmd_hk_constants(args, out) -> int:
    k = hkfun.constants(_quad(args))
    if args.json:
        _emit_json({"schema": SCHEMA.format("hk-constants"), **k.to_dict()}, out)
    else:
        rows = [
            ("I(0.56)", _fmt(k.I_at_056)),
            ("R* (fbar = 1)", _fmt(k.R_star)),
            ("I(R*)", _fmt(k.I_at_R_star)),
            ("crossings for R*", str(k.c_threshold_at_R_star)),
            ("fbar(1.0)", _fmt(k.fbar_at_1)),
            ("1 - fbar(1.0)", _fmt(1 - k.fbar_at_1)),
            ("I(1.0)", _fmt(k.I_at_1)),
            ("crossings for R = 1.0", str(k.c_threshold_at_1)),
            ("f(145)", _fmt(k.f_at_145)),
            ("twist regions for hyperbolic fillings", str(k.dehn_n_threshold)),
            ("I(0.56) - 2(2pi)^2 tanh/g", _fmt(k.factor_two_margin_at_056)),
        ]
        width = max(len(r[0]) for r in rows)
        for name, val in rows:
            out.write(f"{name.ljust(width)}  {val}\n")
    return EXIT_OK


def cmd_hk_table(args, out) -> int:
    names = [s.strip() for s in args.fn.split(",") if s.strip()]
    try:
        rows = hkfun.table(names, args.start, args.stop, args.step, _quad(args))
    except ValueError as exc:
        if isinstance(exc, HypothesisError):
            raise
        raise CliError(EXIT_INVALID, "usage", str(exc)) from None
    if args.json:
        _emit_json({"schema": SCHEMA.format("hk-table"), "functions": names, "rows": rows}, out)
    else:
        out.write(hkfun.table_csv(rows))
    return EXIT_OK


def cmd_simplex_random(args, out) -> int:
    systems, seeds = [], []
    for k in range(args.count):
        seed = args.seed + k
        systems.append(random_system(args.n, np.random.default_rng(seed)))
        seeds.append(seed)
    text = dump_systems(systems, seeds)
    if args.output:
        Path(args.output).write_text(text)
    if args.json or not args.output:
        out.write(text)
    return EXIT_OK


def _search_one(sys_, kind: str, tol41: float, tol42: float) -> dict:
    rec: dict = {"n": sys_.n}
    if kind in ("lemma41", "both"):
        rec["lemma41"] = feasible_point(sys_, tol=tol41).to_dict()
    if kind in ("lemma42", "both") and sys_.n <= 4:
        rec["lemma42"] = kerckhoff_point(sys_, tol=tol42).to_dict()
    if sys_.n == 2:
        try:
            rec["zeros_on_edge"] = count_zeros_n2(sys_)
        except BoundaryLabError as exc:
            rec["zeros_on_edge"] = None
            rec["zeros_note"] = str(exc)
    return rec


def cmd_simplex_search(args, out) -> int:
    from .boundary_lab import validity_check

    systems = load_systems(Path(args.file).read_text())
    results = []
    status = EXIT_OK
    for i, s in enumerate(systems):
        if not validity_check(s):
            results.append({"index": i, "valid": False})
            status = max(status, EXIT_INVALID)
            continue
        try:
            rec = _search_one(s, args.kind, args.tol, args.tol42)
            results.append({"index": i, "valid": True, **rec})
        except SearchFailure as exc:
            best = exc.best.to_dict() if exc.best is not None else None
            results.append({"index": i, "valid": True, "failure": str(exc), "severity": exc.severity, "best": best})
            status = EXIT_NUMERIC
    if args.json:
        _emit_json({"schema": SCHEMA.format("simplex-search"), "file": args.file, "results": results}, out)
    else:
        for r in results:
            head = f"system {r['index']}:"
            if not r["valid"]:
                out.write(f"{head} invalid (sum of boundary terms not positive on the simplex)\n")
                continue
            if "failure" in r:
                out.write(f"{head} search failed ({r['severity']}): {r['failure']}\n")
                continue
            parts = []
            if "lemma41" in r:
                parts.append(f"lemma41 min b={r['lemma41']['min_b']:.3e}")
            if "lemma42" in r:
                s_ = ", ".join(f"{x:.6f}" for x in r["lemma42"]["s"])
                parts.append(f"lemma42 s=({s_})")
            if r.get("zeros_on_edge") is not None:
                parts.append(f"zeros on edge={r['zeros_on_edge']}")
            out.write(f"{head} " + "; ".join(parts) + "\n")
    return status


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cuspforge", description="Cusp shapes and bounds for twist-region diagrams.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_json(sp):
        sp.add_argument("--json", action="store_true", help="emit a versioned JSON document")

    sp = sub.add_parser("validate", help="check a diagram file")
    sp.add_argument("file")
    add_json(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("gen", help="generate diagrams")
    gsub = sp.add_subparsers(dest="family", required=True)
    g2 = gsub.add_parser("two-bridge", help="2-bridge diagram with n twist regions")
    g2.add_argument("--n", type=int, required=True)
    g2.add_argument("--c", type=int, nargs="+", required=True, help="one count for all regions, or n counts")
    g2.add_argument("-o", "--output")
    add_json(g2)
    g2.set_defaults(func=cmd_gen)

    sp = sub.add_parser("pack", help="solve the packing and report cusp shapes")
    sp.add_argument("source", help="diagram file, or 'two-bridge' with --n/--c")
    sp.add_argument("--n", type=int)
    sp.add_argument("--c", type=int, nargs="+")
    sp.add_argument("--tol", type=float, help=f"solver tolerance (default ${TOL_ENV} or {DEFAULT_TOL:g})")
    sp.add_argument("--gauge", type=int, default=0, help="index of the face held fixed")
    sp.add_argument("--svg", help="write the packing as SVG")
    sp.add_argument("--rect-svg", help="directory for one rectangle SVG per tangency")
    add_json(sp)
    sp.set_defaults(func=cmd_pack)

    sp = sub.add_parser("bounds", help="cusp height bounds and Dehn filling check")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=int, nargs="+", required=True, help="crossings per region; the minimum is used")
    sp.add_argument("--two-bridge", action="store_true")
    add_json(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("hk", help="bound functions of the tube radius")
    hsub = sp.add_subparsers(dest="hk_command", required=True)
    ht = hsub.add_parser("table", help="tabulate functions of R (CSV)")
    ht.add_argument("--fn", default="I,fbar,C", help=f"comma list from {','.join(hkfun.FUNCTIONS)}")
    ht.add_argument("--from", dest="start", type=float, default=0.56)
    ht.add_argument("--to", dest="stop", type=float, default=2.5)
    ht.add_argument("--step", type=float, default=0.01)
    ht.add_argument("--quad-tol", type=float, default=hkfun.DEFAULT_QUAD.abs_tol)
    add_json(ht)
    ht.set_defaults(func=cmd_hk_table)
    hc = hsub.add_parser("constants", help="named thresholds")
    hc.add_argument("--quad-tol", type=float, default=hkfun.DEFAULT_QUAD.abs_tol)
    add_json(hc)
    hc.set_defaults(func=cmd_hk_constants)

    sp = sub.add_parser("simplex", help="boundary-term systems on the simplex")
    ssub = sp.add_subparsers(dest="simplex_command", required=True)
    sr = ssub.add_parser("random", help="seeded random valid systems")
    sr.add_argument("--n", type=int, required=True)
    sr.add_argument("--count", type=int, default=1)
    sr.add_argument("--seed", type=int, default=0)
    sr.add_argument("-o", "--output")
    add_json(sr)
    sr.set_defaults(func=cmd_simplex_random)
    ss = ssub.add_parser("search", help="find feasible points for each system in a file")
    ss.add_argument("file")
    ss.add_argument("--kind", choices=("lemma41", "lemma42", "both"), default="both")
    ss.add_argument("--tol", type=float, default=1e-9)
    ss.add_argument("--tol42", type=float, default=1e-6)
    add_json(ss)
    ss.set_defaults(func=cmd_simplex_search)
    return p


def _error(kind: str, message: str, status: int, err) -> int:
    err.write(json.dumps({"error": kind, "message": message, "exit": status}) + "\n")
    return status


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        return _error(exc.kind, str(exc), exc.status, err)
    except DiagramError as exc:
        return _error(exc.kind, str(exc), EXIT_INVALID, err)
    except (HypothesisError, BoundaryLabError) as exc:
        return _error("hypothesis", str(exc), EXIT_INVALID, err)
    except (PackingError, QuadratureError, RootError, SearchFailure) as exc:
        return _error("numeric", str(exc), EXIT_NUMERIC, err)
    except FileNotFoundError as exc:
        return _error("io", f"no such file: {exc.filename}", EXIT_INVALID, err)
    except OverflowError as exc:
        return _error("numeric", str(exc), EXIT_NUMERIC, err)
    except ValueError as exc:
        return _error("input", str(exc), EXIT_INVALID, err)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
