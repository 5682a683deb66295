"""Interaction-mode controllers: one filtered pose in, one view out.

static leaves the image alone (the cursor ring still tracks the gaze
ray), parallel pans by raycasting against a fixed plane and zooms
linearly with the calibrated lean, tilt additionally re-aims the plane
at the user every tick and rolls it with the head. Zoom is rendered as a
dolly: the effective viewing distance is 2 m divided by the zoom factor,
never a field-of-view change.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .calibration import CalibrationProfile, normalize_lean
from .filtering import (
    ACCEPT,
    GAP_TIMEOUT_S,
    MAX_HEAD_SPEED_M_S,
    MODE_PARALLEL,
    MODE_STATIC,
    MODE_TILT,
    MODES,
    FilterBank,
    FilterSchedule,
    ParamCurve,
    builtin_schedule,
)
from .geometry import (
    PLANE_DISTANCE_M,
    HeadPose,
    ImagePlane,
    PlaneHit,
    Vec3,
    aim_plane,
    forward_vector,
    place_plane,
    raycast_plane,
)


class EngineError(RuntimeError):
    pass


class NotCalibratedError(EngineError):
    """parallel/tilt need a calibration profile; static does not."""


@dataclass(frozen=True)
class ZoomRange:
    min_zoom: float = 1.0
    max_zoom: float = 8.0

    def __post_init__(self):
        if self.min_zoom < 1.0:
            raise ValueError("min_zoom must be >= 1")
        if self.max_zoom <= self.min_zoom:
            raise ValueError("max_zoom must exceed min_zoom")

    @property
    def span(self) -> float:
        return self.max_zoom - self.min_zoom


def zoom_from_lean(x: float, zr: ZoomRange) -> float:
    """Linear lean-to-zoom map: x=0 -> min, x=1 -> max."""
    x = min(max(x, 0.0), 1.0)
    return zr.min_zoom + x * zr.span


def dolly_distance(zoom: float) -> float:
    """Effective eye-to-image distance for a zoom factor (dolly model)."""
    return PLANE_DISTANCE_M / zoom


@dataclass(frozen=True)
class EngineConfig:
    mode: str = MODE_PARALLEL
    zoom_range: ZoomRange = field(default_factory=ZoomRange)
    max_head_speed_m_s: float = MAX_HEAD_SPEED_M_S
    gap_timeout_s: float = GAP_TIMEOUT_S
    schedule_override: Optional[FilterSchedule] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    def schedule_for(self, mode: str) -> FilterSchedule:
        if self.schedule_override is not None and self.schedule_override.mode == mode:
            return self.schedule_override
        return builtin_schedule(mode)

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode,
            "zoom_min": self.zoom_range.min_zoom,
            "zoom_max": self.zoom_range.max_zoom,
            "max_head_speed_m_s": self.max_head_speed_m_s,
            "gap_timeout_s": self.gap_timeout_s,
        }
        if self.schedule_override is not None:
            s = self.schedule_override
            d["schedule"] = {
                "mode": s.mode,
                "q": [list(p) for p in s.q_curve.points],
                "r": [list(p) for p in s.r_curve.points],
            }
        return d

    @staticmethod
    def from_dict(d: dict) -> "EngineConfig":
        override = None
        if "schedule" in d and d["schedule"] is not None:
            s = d["schedule"]
            override = FilterSchedule(
                mode=s["mode"],
                q_curve=ParamCurve(tuple((float(x), float(y)) for x, y in s["q"])),
                r_curve=ParamCurve(tuple((float(x), float(y)) for x, y in s["r"])),
            )
        return EngineConfig(
            mode=d.get("mode", MODE_PARALLEL),
            zoom_range=ZoomRange(
                float(d.get("zoom_min", 1.0)), float(d.get("zoom_max", 8.0))
            ),
            max_head_speed_m_s=float(d.get("max_head_speed_m_s", MAX_HEAD_SPEED_M_S)),
            gap_timeout_s=float(d.get("gap_timeout_s", GAP_TIMEOUT_S)),
            schedule_override=override,
        )


@dataclass(frozen=True)
class ViewState:
    """One output tick: zoom, pan target, plane pose and cursor hit."""

    timestamp_ms: float
    mode: str
    zoom: float
    pan_uv: tuple[float, float]
    cursor_uv: tuple[float, float]
    lean_x: float
    plane: ImagePlane

    @property
    def plane_distance_m(self) -> float:
        return dolly_distance(self.zoom)


class Engine:
    """Single-stream state machine: guard, filter, normalize, mode tick.

    Exactly one ViewState per processed sample; held ticks re-emit the
    previous view with the new timestamp. The plane is placed from the
    first sample and its center never moves afterwards.
    """

    def __init__(self, config: EngineConfig, profile: CalibrationProfile | None = None):
        if config.mode in (MODE_PARALLEL, MODE_TILT) and profile is None:
            raise NotCalibratedError(f"mode {config.mode!r} requires a calibration profile")
        self.config = config
        self.profile = profile
        self.mode = config.mode
        self._bank = FilterBank(
            schedule=config.schedule_for(config.mode),
            max_speed_m_s=config.max_head_speed_m_s,
            gap_timeout_s=config.gap_timeout_s,
        )
        self._plane: ImagePlane | None = None
        self._prev_view: ViewState | None = None
        self._sched_x = 0.5  # previous tick's filtered lean drives the schedule
        self._pan_uv = (0.5, 0.5)
        self._cursor_uv = (0.5, 0.5)
        self._last_filtered: HeadPose | None = None

    @property
    def started(self) -> bool:
        return self._plane is not None

    @property
    def plane(self) -> ImagePlane | None:
        return self._plane

    @property
    def last_filtered(self) -> HeadPose | None:
        """Filtered pose behind the most recent accepted tick."""
        return self._last_filtered

    def set_mode(self, mode: str) -> None:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if mode in (MODE_PARALLEL, MODE_TILT) and self.profile is None:
            raise NotCalibratedError(f"mode {mode!r} requires a calibration profile")
        self.mode = mode
        self._bank.schedule = self.config.schedule_for(mode)

    def set_profile(self, profile: CalibrationProfile) -> None:
        self.profile = profile

    def step(self, raw: HeadPose) -> ViewState:
        if self._plane is None:
            if not raw.is_finite():
                raise EngineError("first sample must be finite")
            self._plane = place_plane(raw)
            decision, filtered = self._bank.step(raw, 0.0, self._sched_x)
        else:
            dt_s = (raw.timestamp_ms - self._bank.last_timestamp_ms) / 1000.0
            decision, filtered = self._bank.step(raw, dt_s, self._sched_x)
            if decision != ACCEPT:
                t = raw.timestamp_ms
                if not (t == t):  # NaN timestamp: keep the previous one
                    t = self._prev_view.timestamp_ms
                view = replace(self._prev_view, timestamp_ms=t)
                self._prev_view = view
                return view

        if self.profile is not None:
            x = normalize_lean(filtered.position, self.profile)
        else:
            x = 0.5
        self._sched_x = x
        self._last_filtered = filtered
        view = self._tick(filtered, x)
        self._prev_view = view
        return view

    def _tick(self, pose: HeadPose, x: float) -> ViewState:
        if self.mode == MODE_STATIC:
            return self._tick_static(pose, x)
        if self.mode == MODE_PARALLEL:
            return self._tick_parallel(pose, x)
        return self._tick_tilt(pose, x)

    def _cursor_from(self, pose: HeadPose, plane: ImagePlane) -> PlaneHit:
        return raycast_plane(pose.position, forward_vector(pose.orientation), plane)

    def _tick_static(self, pose: HeadPose, x: float) -> ViewState:
        hit = self._cursor_from(pose, self._plane)
        if hit.valid:
            self._cursor_uv = hit.uv
        return ViewState(
            timestamp_ms=pose.timestamp_ms,
            mode=MODE_STATIC,
            zoom=self.config.zoom_range.min_zoom,
            pan_uv=(0.5, 0.5),
            cursor_uv=self._cursor_uv,
            lean_x=x,
            plane=self._plane,
        )

    def _tick_parallel(self, pose: HeadPose, x: float) -> ViewState:
        hit = self._cursor_from(pose, self._plane)
        if hit.valid:  # an invalid hit holds the previous pan, never snaps
            self._pan_uv = hit.uv
            self._cursor_uv = hit.uv
        return ViewState(
            timestamp_ms=pose.timestamp_ms,
            mode=MODE_PARALLEL,
            zoom=zoom_from_lean(x, self.config.zoom_range),
            pan_uv=self._pan_uv,
            cursor_uv=self._cursor_uv,
            lean_x=x,
            plane=self._plane,
        )

    def _tick_tilt(self, pose: HeadPose, x: float) -> ViewState:
        plane = aim_plane(self._plane, pose.position, pose.orientation.roll)
        hit = self._cursor_from(pose, plane)
        if hit.valid:
            self._pan_uv = hit.uv
            self._cursor_uv = hit.uv
        return ViewState(
            timestamp_ms=pose.timestamp_ms,
            mode=MODE_TILT,
            zoom=zoom_from_lean(x, self.config.zoom_range),
            pan_uv=self._pan_uv,
            cursor_uv=self._cursor_uv,
            lean_x=x,
            plane=plane,
        )


def replay(
    samples,
    config: EngineConfig,
    profile: CalibrationProfile | None = None,
) -> list[ViewState]:
    """Run a whole pose sequence through a fresh engine."""
    engine = Engine(config, profile)
    return [engine.step(s) for s in samples]
