"""Time the numba kernels against their numpy counterparts.

Run from the repository root:

    python benchmarks/bench_kernels.py [--repeat 5]

Compilation is done once before timing. Each row also reports the largest
difference between the two outputs.
"""

import argparse
import math
import time

import numpy as np

from cuspforge import kernels
from cuspforge._jit import HAVE_NUMBA
from cuspforge.boundary_lab import random_system
from cuspforge.diagram import gen_two_bridge, nerve, random_diagram


def best_time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def packing_inputs(nv):
    faces = np.ascontiguousarray(np.delete(nv.faces, 0, axis=0))
    nvert = len(nv.labels)
    free = np.ones(nvert, dtype=bool)
    free[nv.faces[0]] = False
    degree = np.bincount(faces.ravel(), minlength=nvert).astype(np.int64)
    target = np.where(free, 2 * math.pi, math.pi / 3)
    radii = np.where(free, 0.25, 1.0)
    return radii, faces, degree, free, target


def cases():
    big = nerve(random_diagram(30, np.random.default_rng(1)))
    chain = nerve(gen_two_bridge(40, [24] * 40))
    for name, nv in (("random n=30", big), ("2-bridge n=40", chain)):
        radii, faces, degree, free, target = packing_inputs(nv)
        yield f"angle_sums [{name}]", "angle_sums", (radii, faces)
        yield f"angle_jacobian [{name}]", "angle_jacobian", (radii, faces)
        yield f"relax_radii [{name}]", "relax_radii", (radii, faces, degree, free, target, 2000, 1e-7)
    for n, res in ((3, 256), (4, 64), (6, 16)):
        sys = random_system(n, np.random.default_rng(n))
        yield f"simplex_scan [n={n}, res={res}]", "simplex_scan", (res, *sys._kernel_args())
    sys = random_system(2, np.random.default_rng(0))
    args = (np.array([2.0, 0.0]), np.array([0.0, 2.0]), 2_000_000, 0, *sys._kernel_args())
    yield "segment_sign_changes [2e6 steps]", "segment_sign_changes", args


def max_diff(a, b):
    if isinstance(a, tuple):
        return max(max_diff(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return math.inf
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy kernels are available")
        return
    print(f"{'kernel':40s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s} {'max diff':>10s}")
    for label, name, kargs in cases():
        jit = getattr(kernels, f"{name}_loop")
        ref = getattr(kernels, f"{name}_np")
        jit(*kargs)  # compile
        t_jit, out_jit = best_time(lambda: jit(*kargs), args.repeat)
        t_np, out_np = best_time(lambda: ref(*kargs), args.repeat)
        print(f"{label:40s} {1e3 * t_jit:10.3f} {1e3 * t_np:10.3f} {t_np / t_jit:8.1f} {max_diff(out_jit, out_np):10.2e}")


if __name__ == "__main__":
    main()
