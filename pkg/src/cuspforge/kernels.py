"""Hot numeric kernels, each in two flavours.

The ``*_loop`` functions are explicit loops compiled with numba when it is
available; the ``*_np`` functions are vectorised numpy. The public names
(``angle_sums``, ``relax_radii``, ...) are bound to one flavour according to
``cuspforge._jit.USE_NUMBA``. Both flavours are kept importable so tests and
the benchmark can compare them directly.
"""

import math
from itertools import combinations

import numpy as np

from ._jit import USE_NUMBA, njit

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# circle packing: angle sums, relaxation, jacobian
# ---------------------------------------------------------------------------


@njit
def angle_sums_loop(radii, faces):
    nv = radii.shape[0]
    out = np.zeros(nv)
    for f in range(faces.shape[0]):
        for k in range(3):
            v = faces[f, k]
            a = faces[f, (k + 1) % 3]
            b = faces[f, (k + 2) % 3]
            rv = radii[v]
            ra = radii[a]
            rb = radii[b]
            x = ra * rb / (rv * (rv + ra + rb))
            out[v] += 2.0 * math.atan(math.sqrt(x))
    return out


def angle_sums_np(radii, faces):
    rv = radii[faces]
    ra = np.roll(rv, -1, axis=1)
    rb = np.roll(rv, -2, axis=1)
    theta = 2.0 * np.arctan(np.sqrt(ra * rb / (rv * (rv + ra + rb))))
    return np.bincount(faces.ravel(), weights=theta.ravel(), minlength=radii.shape[0])


@njit
def relax_radii_loop(radii, faces, degree, free, target, max_sweeps, stop):
    """Uniform-neighbour relaxation with a simple superstep.

    Returns ``(radii, sweeps, worst_defect)``.
    """
    r = radii.copy()
    nv = r.shape[0]
    prev_step = np.zeros(nv)
    prev_norm = -1.0
    worst = 0.0
    sweeps = 0
    for it in range(max_sweeps):
        sums = angle_sums_loop(r, faces)
        worst = 0.0
        for v in range(nv):
            if free[v]:
                d = abs(sums[v] - target[v])
                if d > worst:
                    worst = d
        if worst < stop:
            break
        step = np.zeros(nv)
        norm = 0.0
        for v in range(nv):
            if not free[v]:
                continue
            k = degree[v]
            beta = math.sin(sums[v] / (2.0 * k))
            delta = math.sin(target[v] / (2.0 * k))
            rhat = r[v] * beta / (1.0 - beta)
            new = rhat * (1.0 - delta) / delta
            step[v] = math.log(new) - math.log(r[v])
            norm += step[v] * step[v]
        norm = math.sqrt(norm)
        factor = 1.0
        if prev_norm > 0.0:
            lam = norm / prev_norm
            cosang = 0.0
            for v in range(nv):
                cosang += step[v] * prev_step[v]
            if 0.0 < lam < 0.95 and cosang > 0.99 * norm * prev_norm:
                factor = min(1.0 + lam / (1.0 - lam), 10.0)
        for v in range(nv):
            if free[v]:
                r[v] = r[v] * math.exp(factor * step[v])
        prev_step = step
        prev_norm = norm
        sweeps = it + 1
    return r, sweeps, worst


def relax_radii_np(radii, faces, degree, free, target, max_sweeps, stop):
    r = radii.copy()
    prev_step = np.zeros_like(r)
    prev_norm = -1.0
    worst = 0.0
    sweeps = 0
    k = np.where(degree > 0, degree, 1).astype(float)
    delta = np.sin(target / (2.0 * k))
    for it in range(max_sweeps):
        sums = angle_sums_np(r, faces)
        defect = np.abs(sums - target)
        worst = float(defect[free].max()) if free.any() else 0.0
        if worst < stop:
            break
        beta = np.sin(sums / (2.0 * k))
        new = r * beta / (1.0 - beta) * (1.0 - delta) / delta
        step = np.where(free, np.log(np.where(free, new, 1.0)) - np.log(r), 0.0)
        norm = float(np.sqrt(step @ step))
        factor = 1.0
        if prev_norm > 0.0:
            lam = norm / prev_norm
            if 0.0 < lam < 0.95 and step @ prev_step > 0.99 * norm * prev_norm:
                factor = min(1.0 + lam / (1.0 - lam), 10.0)
        r = r * np.exp(factor * step)
        prev_step = step
        prev_norm = norm
        sweeps = it + 1
    return r, sweeps, worst


@njit
def angle_jacobian_loop(radii, faces):
    """d(angle sum at v) / d(log r_j) as a dense matrix."""
    nv = radii.shape[0]
    jac = np.zeros((nv, nv))
    for f in range(faces.shape[0]):
        for k in range(3):
            v = faces[f, k]
            a = faces[f, (k + 1) % 3]
            b = faces[f, (k + 2) % 3]
            rv = radii[v]
            ra = radii[a]
            rb = radii[b]
            s = rv + ra + rb
            x = ra * rb / (rv * s)
            w = math.sqrt(x) / (1.0 + x)
            jac[v, v] += w * (-1.0 - rv / s)
            jac[v, a] += w * (1.0 - ra / s)
            jac[v, b] += w * (1.0 - rb / s)
    return jac


def angle_jacobian_np(radii, faces):
    nv = radii.shape[0]
    rv = radii[faces]
    ra = np.roll(rv, -1, axis=1)
    rb = np.roll(rv, -2, axis=1)
    s = rv + ra + rb
    x = ra * rb / (rv * s)
    w = np.sqrt(x) / (1.0 + x)
    v = faces
    a = np.roll(faces, -1, axis=1)
    b = np.roll(faces, -2, axis=1)
    jac = np.zeros((nv, nv))
    np.add.at(jac, (v.ravel(), v.ravel()), (w * (-1.0 - rv / s)).ravel())
    np.add.at(jac, (v.ravel(), a.ravel()), (w * (1.0 - ra / s)).ravel())
    np.add.at(jac, (v.ravel(), b.ravel()), (w * (1.0 - rb / s)).ravel())
    return jac


# ---------------------------------------------------------------------------
# boundary terms on the simplex
# ---------------------------------------------------------------------------


@njit
def _b_into(s, areas, ca, cb, cc, X, Y, out):
    n = s.shape[0]
    for j in range(n):
        p = 0.0
        q = 0.0
        for k in range(n):
            p += s[k] * X[k, j]
            q += s[k] * Y[k, j]
        out[j] = areas[j] * (s[j] * s[j] * cc + (p * p + q * q) * ca + s[j] * p * cb)


def b_batch_np(S, areas, ca, cb, cc, X, Y):
    """Boundary terms for a batch of points ``S`` (rows)."""
    P = S @ X
    Q = S @ Y
    return areas * (S * S * cc + (P * P + Q * Q) * ca + S * P * cb)


@njit
def simplex_scan_loop(res, areas, ca, cb, cc, X, Y):
    """Scan the grid {n*k/res : sum k = res} of the simplex.

    Returns ``(min_sum, argmin_sum, max_minb, argmax_minb, count)``.
    """
    n = areas.shape[0]
    k = np.zeros(n, dtype=np.int64)
    s = np.zeros(n)
    b = np.zeros(n)
    best_sum = np.inf
    best_sum_at = np.zeros(n)
    best_min = -np.inf
    best_min_at = np.zeros(n)
    count = 0
    scale = n / res
    head = 0  # sum of k[0..n-2]; k[n-1] = res - head
    while True:
        k[n - 1] = res - head
        for i in range(n):
            s[i] = k[i] * scale
        _b_into(s, areas, ca, cb, cc, X, Y, b)
        tot = 0.0
        mn = np.inf
        for i in range(n):
            tot += b[i]
            if b[i] < mn:
                mn = b[i]
        if tot < best_sum:
            best_sum = tot
            best_sum_at[:] = s
        if mn > best_min:
            best_min = mn
            best_min_at[:] = s
        count += 1
        # odometer over k[0..n-2] with head <= res
        i = n - 2
        while i >= 0:
            if head < res:
                k[i] += 1
                head += 1
                break
            head -= k[i]
            k[i] = 0
            i -= 1
        if i < 0:
            break
    return best_sum, best_sum_at, best_min, best_min_at, count


def _compositions(n, res):
    """All k in N^n with sum res, as an int array (stars and bars)."""
    bars = np.array(list(combinations(range(res + n - 1), n - 1)), dtype=np.int64)
    if n == 1:
        return np.full((1, 1), res, dtype=np.int64)
    padded = np.hstack([np.full((bars.shape[0], 1), -1), bars, np.full((bars.shape[0], 1), res + n - 1)])
    return np.diff(padded, axis=1) - 1


def simplex_scan_np(res, areas, ca, cb, cc, X, Y):
    n = areas.shape[0]
    S = _compositions(n, res) * (n / res)
    B = b_batch_np(S, areas, ca, cb, cc, X, Y)
    tot = B.sum(axis=1)
    mn = B.min(axis=1)
    i = int(np.argmin(tot))
    j = int(np.argmax(mn))
    return float(tot[i]), S[i].copy(), float(mn[j]), S[j].copy(), S.shape[0]


@njit
def segment_sign_changes_loop(p0, p1, steps, j, areas, ca, cb, cc, X, Y):
    """Sample b_j on the segment p0 -> p1 at ``steps`` equal steps.

    Returns the sample indices i at which sign(b_j) differs between sample
    i and i + 1 (zeros count as their own sign).
    """
    n = p0.shape[0]
    s = np.zeros(n)
    b = np.zeros(n)
    out = np.zeros(steps, dtype=np.int64)
    m = 0
    prev = 0.0
    for i in range(steps + 1):
        lam = i / steps
        for t in range(n):
            s[t] = (1.0 - lam) * p0[t] + lam * p1[t]
        _b_into(s, areas, ca, cb, cc, X, Y, b)
        cur = b[j]
        if i > 0 and np.sign(cur) != np.sign(prev):
            out[m] = i - 1
            m += 1
        prev = cur
    return out[:m]


def segment_sign_changes_np(p0, p1, steps, j, areas, ca, cb, cc, X, Y, chunk=1 << 16):
    found = []
    prev = None
    for start in range(0, steps + 1, chunk):
        idx = np.arange(start, min(start + chunk, steps + 1))
        lam = (idx / steps)[:, None]
        S = (1.0 - lam) * p0 + lam * p1
        vals = b_batch_np(S, areas, ca, cb, cc, X, Y)[:, j]
        sg = np.sign(vals)
        if prev is not None and sg[0] != prev:
            found.append(start - 1)
        found.extend((idx[:-1][sg[1:] != sg[:-1]]).tolist())
        prev = sg[-1]
    return np.array(found, dtype=np.int64)


if USE_NUMBA:
    angle_sums = angle_sums_loop
    relax_radii = relax_radii_loop
    angle_jacobian = angle_jacobian_loop
    simplex_scan = simplex_scan_loop
    segment_sign_changes = segment_sign_changes_loop
else:
    angle_sums = angle_sums_np
    relax_radii = relax_radii_np
    angle_jacobian = angle_jacobian_np
    simplex_scan = simplex_scan_np
    segment_sign_changes = segment_sign_changes_np
