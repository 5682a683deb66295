"""Pydantic request/response models for the HTTP API.

These mirror the domain types one-to-one; the `to_*`/`from_*` helpers are
the only place the service converts between wire JSON and core objects.
"""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..calibration import CalibrationProfile
from ..geometry import HeadPose, Orientation, Vec3
from ..modes import EngineConfig, ViewState
from ..trace_io import Attempt, TrialRecord, ViewRecord


class PoseModel(BaseModel):
    t_ms: float
    x: float
    y: float
    z: float
    yaw: float
    pitch: float
    roll: float

    def to_pose(self) -> HeadPose:
        return HeadPose(
            self.t_ms, Vec3(self.x, self.y, self.z), Orientation(self.yaw, self.pitch, self.roll)
        )

    @staticmethod
    def from_pose(p: HeadPose) -> "PoseModel":
        return PoseModel(
            t_ms=p.timestamp_ms,
            x=p.position.x,
            y=p.position.y,
            z=p.position.z,
            yaw=p.orientation.yaw,
            pitch=p.orientation.pitch,
            roll=p.orientation.roll,
        )


class ProfileModel(BaseModel):
    neutral: PoseModel
    forward_limit_m: float
    backward_limit_m: float
    lean_axis: tuple[float, float, float]

    def to_profile(self) -> CalibrationProfile:
        return CalibrationProfile(
            neutral_pose=self.neutral.to_pose(),
            forward_limit_m=self.forward_limit_m,
            backward_limit_m=self.backward_limit_m,
            lean_axis=Vec3(*self.lean_axis),
        )

    @staticmethod
    def from_profile(p: CalibrationProfile) -> "ProfileModel":
        return ProfileModel(
            neutral=PoseModel.from_pose(p.neutral_pose),
            forward_limit_m=p.forward_limit_m,
            backward_limit_m=p.backward_limit_m,
            lean_axis=(p.lean_axis.x, p.lean_axis.y, p.lean_axis.z),
        )


class ScheduleModel(BaseModel):
    mode: str
    q: list[tuple[float, float]]
    r: list[tuple[float, float]]


class ConfigModel(BaseModel):
    mode: str = "parallel"
    zoom_min: float = 1.0
    zoom_max: float = 8.0
    max_head_speed_m_s: float = 2.0
    gap_timeout_s: float = 0.5
    schedule: Optional[ScheduleModel] = None

    def to_config(self) -> EngineConfig:
        d = self.model_dump()
        return EngineConfig.from_dict(d)


class ViewModel(BaseModel):
    t_ms: float
    mode: str
    zoom: float
    pan_u: float
    pan_v: float
    lean_x: float
    plane_yaw: float
    plane_pitch: float
    plane_roll: float
    cursor_u: float
    cursor_v: float

    @staticmethod
    def from_view(v: ViewState) -> "ViewModel":
        return ViewModel(
            t_ms=v.timestamp_ms,
            mode=v.mode,
            zoom=v.zoom,
            pan_u=v.pan_uv[0],
            pan_v=v.pan_uv[1],
            lean_x=v.lean_x,
            plane_yaw=v.plane.yaw,
            plane_pitch=v.plane.pitch,
            plane_roll=v.plane.roll,
            cursor_u=v.cursor_uv[0],
            cursor_v=v.cursor_uv[1],
        )

    def to_record(self) -> ViewRecord:
        return ViewRecord(
            timestamp_ms=self.t_ms,
            mode=self.mode,
            zoom=self.zoom,
            pan_uv=(self.pan_u, self.pan_v),
            lean_x=self.lean_x,
            plane_yaw=self.plane_yaw,
            plane_pitch=self.plane_pitch,
            plane_roll=self.plane_roll,
            cursor_uv=(self.cursor_u, self.cursor_v),
        )


class AttemptModel(BaseModel):
    t_ms: float
    u: float
    v: float
    correct: bool


class TrialModel(BaseModel):
    mode: str
    image_id: str
    participant: str = "p0"
    targets: dict[str, tuple[float, float]]
    attempts: list[AttemptModel] = Field(default_factory=list)
    outcome: str
    duration_s: float
    image_user_grade: Optional[int] = None
    trace_path: str = ""

    def to_trial(self) -> TrialRecord:
        return TrialRecord(
            trace_path=self.trace_path,
            mode=self.mode,
            image_id=self.image_id,
            participant=self.participant,
            target_uvs={k: (u, v) for k, (u, v) in self.targets.items()},
            attempts=tuple(Attempt(a.t_ms, (a.u, a.v), a.correct) for a in self.attempts),
            outcome=self.outcome,
            duration_s=self.duration_s,
            image_user_grade=self.image_user_grade,
        )


class CalibrateRequest(BaseModel):
    neutral: list[PoseModel]
    forward: list[PoseModel]
    backward: list[PoseModel]


class ReplayRequest(BaseModel):
    trace: list[PoseModel]
    profile: Optional[ProfileModel] = None
    config: Optional[ConfigModel] = None


class ReplayResponse(BaseModel):
    views: list[ViewModel]


class SynthesizeRequest(BaseModel):
    script: str
    profile: Optional[ProfileModel] = None


class SynthesizeResponse(BaseModel):
    trace: list[PoseModel]
    rate_hz: float


class MetricsRequest(BaseModel):
    trial: TrialModel
    trace: list[PoseModel]
    views: list[ViewModel]
    profile: ProfileModel
    hit_radius_uv: Optional[float] = None
    zoom_epsilon: Optional[float] = None


class MetricsResponse(BaseModel):
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


class StatsRequest(BaseModel):
    table_tsv: str


class StatsResponse(BaseModel):
    empty: bool
    report_tsv: str
    report_text: str
