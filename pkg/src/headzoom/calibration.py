"""Per-user lean calibration and the normalized lean coordinate.

A calibration captures the neutral head pose plus comfortable forward and
backward lean limits. Live positions are projected onto the lean axis
(the horizontalized view direction at calibration time) and mapped to
x in [0, 1]: 0 at the backward limit, 0.5 at neutral, 1 at the forward
limit, clamped outside. The two halves scale independently, so
asymmetric lean ranges are fine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import HeadPose, Orientation, Vec3, forward_vector

MIN_SAMPLES = 30
MIN_LIMIT_M = 0.01


class CalibrationError(ValueError):
    pass


class InsufficientSamplesError(CalibrationError):
    pass


class InvertedLimitsError(CalibrationError):
    pass


@dataclass(frozen=True)
class CalibrationProfile:
    neutral_pose: HeadPose
    forward_limit_m: float
    backward_limit_m: float
    lean_axis: Vec3

    def __post_init__(self):
        if not (self.forward_limit_m > MIN_LIMIT_M):
            raise CalibrationError(
                f"forward limit {self.forward_limit_m!r} must exceed {MIN_LIMIT_M} m"
            )
        if not (self.backward_limit_m > MIN_LIMIT_M):
            raise CalibrationError(
                f"backward limit {self.backward_limit_m!r} must exceed {MIN_LIMIT_M} m"
            )
        if abs(self.lean_axis.norm() - 1.0) > 1e-9 or abs(self.lean_axis.y) > 1e-9:
            raise CalibrationError("lean axis must be a horizontal unit vector")

    def lean_displacement(self, p: Vec3) -> float:
        """Signed meters along the lean axis, positive toward the plane."""
        return (p - self.neutral_pose.position).dot(self.lean_axis)


def _mean_pose(samples: Sequence[HeadPose]) -> HeadPose:
    n = len(samples)
    return HeadPose(
        timestamp_ms=sum(s.timestamp_ms for s in samples) / n,
        position=Vec3(
            sum(s.position.x for s in samples) / n,
            sum(s.position.y for s in samples) / n,
            sum(s.position.z for s in samples) / n,
        ),
        orientation=Orientation(
            sum(s.orientation.yaw for s in samples) / n,
            sum(s.orientation.pitch for s in samples) / n,
            sum(s.orientation.roll for s in samples) / n,
        ),
    )


def calibrate(
    neutral_samples: Sequence[HeadPose],
    forward_samples: Sequence[HeadPose],
    backward_samples: Sequence[HeadPose],
) -> CalibrationProfile:
    """Build a profile from three held captures (>= 30 samples each).

    The neutral pose is the componentwise sample mean; each limit is the
    distance between the mean forward/backward position and neutral,
    measured along the lean axis.
    """
    for name, seq in (
        ("neutral", neutral_samples),
        ("forward", forward_samples),
        ("backward", backward_samples),
    ):
        if len(seq) < MIN_SAMPLES:
            raise InsufficientSamplesError(
                f"{name} capture has {len(seq)} samples; need at least {MIN_SAMPLES}"
            )

    neutral = _mean_pose(neutral_samples)
    f = forward_vector(neutral.orientation).horizontal()
    if f.norm() <= 1e-6:
        raise CalibrationError("neutral pose looks straight up/down")
    axis = f.normalized()

    ref = neutral.position.dot(axis)
    fwd = _mean_pose(forward_samples).position.dot(axis) - ref
    back = _mean_pose(backward_samples).position.dot(axis) - ref
    if fwd <= 0.0:
        raise InvertedLimitsError("forward capture is not ahead of neutral")
    if back >= 0.0:
        raise InvertedLimitsError("backward capture is not behind neutral")
    return CalibrationProfile(
        neutral_pose=neutral,
        forward_limit_m=abs(fwd),
        backward_limit_m=abs(back),
        lean_axis=axis,
    )


def normalize_lean(p: Vec3, profile: CalibrationProfile) -> float:
    """Map a head position to the lean coordinate x in [0, 1].

    Piecewise linear with its single knot at neutral (x = 0.5); clamped
    at both calibrated limits.
    """
    d = profile.lean_displacement(p)
    if d >= 0.0:
        x = 0.5 + 0.5 * d / profile.forward_limit_m
    else:
        x = 0.5 - 0.5 * (-d) / profile.backward_limit_m
    return min(max(x, 0.0), 1.0)


# --- profile file format: one `key = value` pair per line -----------------

_HEADER = "# headzoom calibration profile v1"


def profile_to_text(profile: CalibrationProfile) -> str:
    n = profile.neutral_pose
    lines = [
        _HEADER,
        f"neutral_t_ms = {n.timestamp_ms!r}",
        f"neutral_pos = {n.position.x!r} {n.position.y!r} {n.position.z!r}",
        "neutral_ypr = "
        f"{n.orientation.yaw!r} {n.orientation.pitch!r} {n.orientation.roll!r}",
        f"forward_limit_m = {profile.forward_limit_m!r}",
        f"backward_limit_m = {profile.backward_limit_m!r}",
        f"lean_axis = {profile.lean_axis.x!r} {profile.lean_axis.y!r} {profile.lean_axis.z!r}",
    ]
    return "\n".join(lines) + "\n"


def profile_from_text(text: str) -> CalibrationProfile:
    values: dict[str, list[float]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CalibrationError(f"bad profile line: {raw!r}")
        key, _, rest = line.partition("=")
        try:
            values[key.strip()] = [float(tok) for tok in rest.split()]
        except ValueError as exc:
            raise CalibrationError(f"bad profile line: {raw!r}") from exc
    try:
        (t_ms,) = values["neutral_t_ms"]
        px, py, pz = values["neutral_pos"]
        yaw, pitch, roll = values["neutral_ypr"]
        (fwd,) = values["forward_limit_m"]
        (back,) = values["backward_limit_m"]
        ax, ay, az = values["lean_axis"]
    except (KeyError, ValueError) as exc:
        raise CalibrationError(f"incomplete calibration profile: {exc}") from exc
    return CalibrationProfile(
        neutral_pose=HeadPose(t_ms, Vec3(px, py, pz), Orientation(yaw, pitch, roll)),
        forward_limit_m=fwd,
        backward_limit_m=back,
        lean_axis=Vec3(ax, ay, az),
    )


def save_profile(profile: CalibrationProfile, path: str | Path) -> None:
    Path(path).write_text(profile_to_text(profile))


def load_profile(path: str | Path) -> CalibrationProfile:
    return profile_from_text(Path(path).read_text())
