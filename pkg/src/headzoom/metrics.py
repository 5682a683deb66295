"""Per-trial interaction metrics.

All distance sums are plain consecutive-frame accumulations over the
pose trace; hover times are integrated over the view stream in the
reference image's pixel space (2800x1749, 105 px ring radius, strict
inequality). Averages divide by frame transitions (N-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .calibration import CalibrationProfile
from .geometry import HeadPose, forward_vector
from .modes import ViewState, ZoomRange
from .trace_io import OUTCOME_SUCCESS, TrialRecord, ViewRecord

REF_IMAGE_PX = (2800, 1749)
HIT_RADIUS_PX = 105.0
DEFAULT_HIT_RADIUS_UV = HIT_RADIUS_PX / REF_IMAGE_PX[0]
DEFAULT_ZOOM_EPSILON_FRACTION = 0.02


def total_head_movement(samples: Sequence[HeadPose]) -> float:
    """Cumulative Euclidean displacement between consecutive positions."""
    if len(samples) < 2:
        raise ValueError("need at least 2 samples")
    total = 0.0
    for a, b in zip(samples, samples[1:]):
        total += (b.position - a.position).norm()
    return total


def total_head_rotation(samples: Sequence[HeadPose]) -> float:
    """Summed angle between consecutive forward vectors."""
    if len(samples) < 2:
        raise ValueError("need at least 2 samples")
    total = 0.0
    prev = forward_vector(samples[0].orientation)
    for s in samples[1:]:
        cur = forward_vector(s.orientation)
        dot = prev.dot(cur) / (prev.norm() * cur.norm())
        total += math.acos(min(1.0, max(-1.0, dot)))
        prev = cur
    return total


def avg_head_movement(samples: Sequence[HeadPose]) -> float:
    return total_head_movement(samples) / (len(samples) - 1)


def avg_head_rotation(samples: Sequence[HeadPose]) -> float:
    return total_head_rotation(samples) / (len(samples) - 1)


def max_lean(samples: Sequence[HeadPose], profile: CalibrationProfile) -> float:
    """Largest |displacement along the lean axis| from the first frame."""
    if not samples:
        raise ValueError("need at least 1 sample")
    axis = profile.lean_axis
    ref = samples[0].position.dot(axis)
    return max(abs(s.position.dot(axis) - ref) for s in samples)


def hover_time(
    views: Sequence[ViewState | ViewRecord],
    target_uvs: dict[str, tuple[float, float]],
    hit_radius_uv: float = DEFAULT_HIT_RADIUS_UV,
    image_px: tuple[int, int] = REF_IMAGE_PX,
) -> dict[str, float]:
    """Seconds the cursor ring spends strictly inside each target's ring.

    Distances are measured in reference-image pixels; each frame inside
    contributes the interval to the next frame, so the final frame adds
    nothing.
    """
    if not target_uvs:
        raise ValueError("need at least one target")
    w, h = image_px
    radius_px = hit_radius_uv * w
    out = {name: 0.0 for name in target_uvs}
    for cur, nxt in zip(views, views[1:]):
        dt_s = (nxt.timestamp_ms - cur.timestamp_ms) / 1000.0
        cx, cy = cur.cursor_uv[0] * w, cur.cursor_uv[1] * h
        for name, (tu, tv) in target_uvs.items():
            if math.hypot(cx - tu * w, cy - tv * h) < radius_px:
                out[name] += dt_s
    return out


@dataclass(frozen=True)
class ZoomStats:
    change_count: int
    total_distance: float
    avg_zoom: float
    max_zoom: float


def zoom_metrics(
    views: Sequence[ViewState | ViewRecord],
    epsilon: float | None = None,
    zoom_range: ZoomRange | None = None,
) -> ZoomStats:
    """Zoom-usage metrics over a view stream.

    total_distance is the summed |zoom delta|; change_count counts the
    monotone excursions between direction reversals whose amplitude
    reaches epsilon (default: 2% of the zoom range).
    """
    zooms = [v.zoom for v in views]
    if len(zooms) < 2:
        raise ValueError("need at least 2 view states")
    if epsilon is None:
        span = (zoom_range or ZoomRange()).span
        epsilon = DEFAULT_ZOOM_EPSILON_FRACTION * span

    total = 0.0
    for a, b in zip(zooms, zooms[1:]):
        total += abs(b - a)

    count = 0
    anchor = zooms[0]
    direction = 0
    prev = zooms[0]
    for z in zooms[1:]:
        delta = z - prev
        sign = 0 if delta == 0.0 else (1 if delta > 0.0 else -1)
        if sign != 0 and direction == 0:
            direction = sign
        elif sign != 0 and sign != direction:
            if abs(prev - anchor) >= epsilon:
                count += 1
            anchor = prev
            direction = sign
        prev = z
    if direction != 0 and abs(prev - anchor) >= epsilon:
        count += 1

    return ZoomStats(
        change_count=count,
        total_distance=total,
        avg_zoom=sum(zooms) / len(zooms),
        max_zoom=max(zooms),
    )


def error_metrics(trial: TrialRecord) -> tuple[int, bool]:
    false_positives = sum(1 for a in trial.attempts if not a.correct)
    return false_positives, trial.outcome == OUTCOME_SUCCESS


@dataclass(frozen=True)
class MetricsReport:
    participant: str
    mode: str
    image_id: str
    completion_time_s: float
    total_head_movement_m: float
    total_head_rotation_rad: float
    avg_head_movement_m: float
    avg_head_rotation_rad: float
    max_lean_m: float
    hover_time_s: dict[str, float]
    zoom_change_count: int
    total_zoom_distance: float
    avg_zoom: float
    max_zoom: float
    false_positives: int
    success: bool
    image_user_grade: Optional[int] = None


def compute_report(
    trial: TrialRecord,
    samples: Sequence[HeadPose],
    views: Sequence[ViewState | ViewRecord],
    profile: CalibrationProfile,
    hit_radius_uv: float = DEFAULT_HIT_RADIUS_UV,
    zoom_epsilon: float | None = None,
    zoom_range: ZoomRange | None = None,
) -> MetricsReport:
    """Assemble the full per-trial metric vector."""
    zoom = zoom_metrics(views, epsilon=zoom_epsilon, zoom_range=zoom_range)
    false_positives, success = error_metrics(trial)
    return MetricsReport(
        participant=trial.participant,
        mode=trial.mode,
        image_id=trial.image_id,
        completion_time_s=trial.duration_s,
        total_head_movement_m=total_head_movement(samples),
        total_head_rotation_rad=total_head_rotation(samples),
        avg_head_movement_m=avg_head_movement(samples),
        avg_head_rotation_rad=avg_head_rotation(samples),
        max_lean_m=max_lean(samples, profile),
        hover_time_s=hover_time(views, trial.target_uvs, hit_radius_uv),
        zoom_change_count=zoom.change_count,
        total_zoom_distance=zoom.total_distance,
        avg_zoom=zoom.avg_zoom,
        max_zoom=zoom.max_zoom,
        false_positives=false_positives,
        success=success,
        image_user_grade=trial.image_user_grade,
    )


# --- results table (input format of the stats module) ----------------------

_FIXED_COLUMNS = (
    "participant",
    "mode",
    "image_id",
    "completion_time_s",
    "total_head_movement_m",
    "total_head_rotation_rad",
    "avg_head_movement_m",
    "avg_head_rotation_rad",
    "max_lean_m",
    "zoom_change_count",
    "total_zoom_distance",
    "avg_zoom",
    "max_zoom",
    "false_positives",
    "success",
    "image_user_grade",
)


def metrics_table_text(reports: Iterable[MetricsReport]) -> str:
    """One tab-separated row per trial; hover columns (hover_<name>_s) are
    the sorted union of target names across all reports. Missing grades
    stay empty."""
    reports = list(reports)
    hover_names = sorted({name for r in reports for name in r.hover_time_s})
    columns = list(_FIXED_COLUMNS) + [f"hover_{n}_s" for n in hover_names]
    lines = ["\t".join(columns)]
    for r in reports:
        row = [
            r.participant,
            r.mode,
            r.image_id,
            repr(float(r.completion_time_s)),
            repr(float(r.total_head_movement_m)),
            repr(float(r.total_head_rotation_rad)),
            repr(float(r.avg_head_movement_m)),
            repr(float(r.avg_head_rotation_rad)),
            repr(float(r.max_lean_m)),
            str(int(r.zoom_change_count)),
            repr(float(r.total_zoom_distance)),
            repr(float(r.avg_zoom)),
            repr(float(r.max_zoom)),
            str(int(r.false_positives)),
            "1" if r.success else "0",
            "" if r.image_user_grade is None else str(int(r.image_user_grade)),
        ]
        for n in hover_names:
            v = r.hover_time_s.get(n)
            row.append("" if v is None else repr(float(v)))
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def write_metrics_table(reports: Iterable[MetricsReport], path: str | Path) -> None:
    Path(path).write_text(metrics_table_text(reports))
