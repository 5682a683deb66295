"""Independent brute-force oracles shared by unit and acceptance tests.

Everything here deliberately avoids the library's own closed-form paths:
ray hits are found by marching and bisection, metric sums by plain loops,
p-values by permutation resampling.
"""
from __future__ import annotations

import math

import numpy as np

from headzoom.geometry import ImagePlane, Vec3


def marching_bisection_hit(
    origin: Vec3,
    direction: Vec3,
    plane: ImagePlane,
    t_max: float = 16.0,
    step: float = 1e-4,
    chunk: int = 8192,
):
    """March the ray in `step` increments until the signed plane distance
    changes sign, then bisect that bracket. Returns the hit Vec3 or None."""
    n = plane.normal
    o = np.array([origin.x, origin.y, origin.z])
    d = np.array([direction.x, direction.y, direction.z])
    c = np.array([plane.center.x, plane.center.y, plane.center.z])
    nv = np.array([n.x, n.y, n.z])

    def signed(t: float) -> float:
        return float((o + t * d - c) @ nv)

    bracket = None
    t0 = 0.0
    prev = signed(0.0)
    while t0 < t_max and bracket is None:
        ts = t0 + step * np.arange(1, chunk + 1)
        ts = ts[ts <= t_max]
        if len(ts) == 0:
            break
        vals = (o[None, :] + ts[:, None] * d[None, :] - c[None, :]) @ nv
        allv = np.concatenate(([prev], vals))
        flip = np.nonzero(np.signbit(allv[:-1]) != np.signbit(allv[1:]))[0]
        if len(flip) > 0:
            i = int(flip[0])
            lo = t0 + step * i
            bracket = (lo, lo + step)
        else:
            prev = float(vals[-1])
            t0 = float(ts[-1])
    if bracket is None:
        return None
    lo, hi = bracket
    flo = signed(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = signed(mid)
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return Vec3(*(o + t * d))


def total_movement_loop(positions) -> float:
    total = 0.0
    for a, b in zip(positions, positions[1:]):
        total += math.sqrt(
            (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2 + (b[2] - a[2]) ** 2
        )
    return total


def total_rotation_loop(forwards) -> float:
    total = 0.0
    for a, b in zip(forwards, forwards[1:]):
        na = math.sqrt(a[0] ** 2 + a[1] ** 2 + a[2] ** 2)
        nb = math.sqrt(b[0] ** 2 + b[1] ** 2 + b[2] ** 2)
        dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb)
        total += math.acos(min(1.0, max(-1.0, dot)))
    return total


def max_lean_loop(positions, axis) -> float:
    p0 = positions[0]
    ref = p0[0] * axis[0] + p0[1] * axis[1] + p0[2] * axis[2]
    worst = 0.0
    for p in positions:
        proj = p[0] * axis[0] + p[1] * axis[1] + p[2] * axis[2]
        worst = max(worst, abs(proj - ref))
    return worst


def hover_time_loop(times_ms, cursor_uvs, target_uv, radius_px, image_px) -> float:
    w, h = image_px
    tx, ty = target_uv[0] * w, target_uv[1] * h
    total = 0.0
    for i in range(len(times_ms) - 1):
        cx, cy = cursor_uvs[i][0] * w, cursor_uvs[i][1] * h
        if math.hypot(cx - tx, cy - ty) < radius_px:
            total += (times_ms[i + 1] - times_ms[i]) / 1000.0
    return total


def zoom_metrics_loop(zooms, epsilon):
    """Reference zoom-usage metrics: split the zoom trajectory at strict
    direction reversals; each monotone run is one excursion, counted when
    its amplitude reaches epsilon."""
    total = 0.0
    for a, b in zip(zooms, zooms[1:]):
        total += abs(b - a)
    count = 0
    anchor = zooms[0]
    direction = 0
    prev = zooms[0]
    for z in zooms[1:]:
        d = z - prev
        s = 0 if d == 0.0 else (1 if d > 0 else -1)
        if s != 0 and direction != 0 and s != direction:
            if abs(prev - anchor) >= epsilon:
                count += 1
            anchor = prev
            direction = s
        elif s != 0 and direction == 0:
            direction = s
        prev = z
    if direction != 0 and abs(prev - anchor) >= epsilon:
        count += 1
    return count, total, sum(zooms) / len(zooms), max(zooms)


def paired_permutation_p(diffs, n_perm: int = 100_000, seed: int = 0) -> float:
    """Two-sided sign-flip permutation p-value for mean(differences) != 0."""
    rng = np.random.default_rng(seed)
    diffs = np.asarray(diffs, dtype=float)
    observed = abs(diffs.mean())
    signs = rng.choice([-1.0, 1.0], size=(n_perm, len(diffs)))
    perm_means = np.abs((signs * diffs[None, :]).mean(axis=1))
    return float((np.sum(perm_means >= observed - 1e-15) + 1) / (n_perm + 1))


def rm_anova_sums_of_squares(values: np.ndarray):
    """Hand-rolled within-subject one-factor decomposition.

    `values` is an (n_subjects, k_conditions) array. Returns
    (F, df_between, df_error, ss_cond, ss_subj, ss_error).
    """
    n, k = values.shape
    grand = values.mean()
    cond_means = values.mean(axis=0)
    subj_means = values.mean(axis=1)
    ss_cond = n * float(((cond_means - grand) ** 2).sum())
    ss_subj = k * float(((subj_means - grand) ** 2).sum())
    ss_total = float(((values - grand) ** 2).sum())
    ss_error = ss_total - ss_cond - ss_subj
    df_between = k - 1
    df_error = (k - 1) * (n - 1)
    ms_cond = ss_cond / df_between
    ms_error = ss_error / df_error
    f = ms_cond / ms_error if ms_error > 0 else math.inf
    return f, df_between, df_error, ss_cond, ss_subj, ss_error
