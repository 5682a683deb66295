"""File formats and synthetic trace generation.

Pose traces and view streams are tab-separated text with one comment
line and one header row; all angles are radians, positions meters,
timestamps milliseconds. Trial records are JSON sidecars referencing
their trace file. Floats are written with repr so every read/write
round-trip is exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .calibration import CalibrationProfile
from .geometry import HeadPose, Orientation, Vec3
from .modes import ViewState

DEFAULT_RATE_HZ = 72.0
TRIAL_TIME_LIMIT_S = 120.0
TRIAL_MAX_ATTEMPTS = 3

_TRACE_MAGIC = "# headzoom-trace v1"
_TRACE_COLUMNS = ("timestamp_ms", "pos_x", "pos_y", "pos_z", "yaw_rad", "pitch_rad", "roll_rad")
_VIEW_MAGIC = "# headzoom-views v1"
_VIEW_COLUMNS = (
    "timestamp_ms",
    "mode",
    "zoom",
    "pan_u",
    "pan_v",
    "lean_x",
    "plane_yaw_rad",
    "plane_pitch_rad",
    "plane_roll_rad",
    "cursor_u",
    "cursor_v",
)

OUTCOME_SUCCESS = "success"
OUTCOME_FAILED_ATTEMPTS = "failed_attempts"
OUTCOME_TIMEOUT = "timeout"
OUTCOMES = (OUTCOME_SUCCESS, OUTCOME_FAILED_ATTEMPTS, OUTCOME_TIMEOUT)


class TraceParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MonotonicityError(TraceParseError):
    pass


class BadScriptError(ValueError):
    pass


class TrialValidationError(ValueError):
    pass


@dataclass(frozen=True)
class PoseTrace:
    samples: tuple[HeadPose, ...]
    source: str = "unknown"
    rate_hz: float = DEFAULT_RATE_HZ

    def __post_init__(self):
        if len(self.samples) < 2:
            raise TraceParseError("a trace needs at least 2 samples")
        ts = [s.timestamp_ms for s in self.samples]
        for i, (a, b) in enumerate(zip(ts, ts[1:])):
            if not b > a:
                raise MonotonicityError(
                    f"timestamp {b!r} does not increase past {a!r}", line=i + 4
                )


def write_trace(trace: PoseTrace, path: str | Path) -> None:
    lines = [f"{_TRACE_MAGIC} source={trace.source} rate_hz={trace.rate_hz!r}"]
    lines.append("# angles radians, positions meters, timestamps milliseconds")
    lines.append("\t".join(_TRACE_COLUMNS))
    for s in trace.samples:
        vals = (
            s.timestamp_ms,
            s.position.x,
            s.position.y,
            s.position.z,
            s.orientation.yaw,
            s.orientation.pitch,
            s.orientation.roll,
        )
        if any(not math.isfinite(v) for v in vals):
            raise TraceParseError("refusing to write non-finite sample")
        lines.append("\t".join(repr(float(v)) for v in vals))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path: str | Path) -> PoseTrace:
    text = Path(path).read_text()
    source, rate = "unknown", DEFAULT_RATE_HZ
    samples: list[HeadPose] = []
    header_seen = False
    rows_start_line = None
    for idx, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(_TRACE_MAGIC):
                for tok in line[len(_TRACE_MAGIC):].split():
                    if tok.startswith("source="):
                        source = tok[len("source="):]
                    elif tok.startswith("rate_hz="):
                        try:
                            rate = float(tok[len("rate_hz="):])
                        except ValueError:
                            raise TraceParseError("bad rate_hz in trace header", idx)
            continue
        if not header_seen:
            if tuple(line.split("\t")) != _TRACE_COLUMNS:
                raise TraceParseError(f"unexpected column header {line!r}", idx)
            header_seen = True
            continue
        parts = line.split("\t")
        if len(parts) != len(_TRACE_COLUMNS):
            raise TraceParseError(
                f"expected {len(_TRACE_COLUMNS)} fields, got {len(parts)}", idx
            )
        try:
            t, px, py, pz, yaw, pitch, roll = (float(p) for p in parts)
        except ValueError:
            raise TraceParseError(f"non-numeric field in {line!r}", idx)
        if rows_start_line is None:
            rows_start_line = idx
        if samples and not t > samples[-1].timestamp_ms:
            raise MonotonicityError(
                f"timestamp {t!r} does not increase past {samples[-1].timestamp_ms!r}",
                idx,
            )
        samples.append(HeadPose(t, Vec3(px, py, pz), Orientation(yaw, pitch, roll)))
    if not header_seen:
        raise TraceParseError("empty or headerless trace file")
    if len(samples) < 2:
        raise TraceParseError("a trace needs at least 2 samples")
    return PoseTrace(tuple(samples), source=source, rate_hz=rate)


# --- synthetic traces ------------------------------------------------------

SEGMENT_KINDS = ("hold", "lean", "yaw", "pitch", "roll", "strafe")


@dataclass(frozen=True)
class Segment:
    """One timed script step: hold, or ramp one control to a target.

    Targets: lean is the normalized coordinate in [0, 1]; yaw/pitch/roll
    are radians; strafe is meters sideways (positive to the right of the
    calibrated facing).
    """

    kind: str
    duration_s: float
    target: float = 0.0

    def __post_init__(self):
        if self.kind not in SEGMENT_KINDS:
            raise BadScriptError(f"unknown segment kind {self.kind!r}")
        if not (self.duration_s > 0.0) or not math.isfinite(self.duration_s):
            raise BadScriptError(f"segment duration must be positive, got {self.duration_s!r}")
        if self.kind == "lean" and not 0.0 <= self.target <= 1.0:
            raise BadScriptError(f"lean target must be in [0, 1], got {self.target!r}")
        if not math.isfinite(self.target):
            raise BadScriptError("segment target must be finite")


@dataclass(frozen=True)
class MotionScript:
    segments: tuple[Segment, ...]
    rate_hz: float = DEFAULT_RATE_HZ
    seed: int = 0
    noise_pos_m: float = 0.0
    noise_ang_rad: float = 0.0

    def __post_init__(self):
        if not self.segments:
            raise BadScriptError("script has no segments")
        if not (self.rate_hz > 0.0):
            raise BadScriptError("rate must be positive")


def default_profile() -> CalibrationProfile:
    """Synthetic stand-in calibration: neutral at (0, 1.6, 0) facing +Z
    with symmetric 0.30 m lean limits."""
    return CalibrationProfile(
        neutral_pose=HeadPose(0.0, Vec3(0.0, 1.6, 0.0), Orientation(0.0, 0.0, 0.0)),
        forward_limit_m=0.30,
        backward_limit_m=0.30,
        lean_axis=Vec3(0.0, 0.0, 1.0),
    )


def _lean_to_displacement(x: float, profile: CalibrationProfile) -> float:
    if x >= 0.5:
        return (x - 0.5) / 0.5 * profile.forward_limit_m
    return -(0.5 - x) / 0.5 * profile.backward_limit_m


def synthesize_trace(
    script: MotionScript, profile: CalibrationProfile | None = None
) -> PoseTrace:
    """Deterministic pose trace from a motion script.

    Each segment emits ceil(duration * rate) samples on its own local
    clock starting at the segment boundary, so joins never duplicate a
    timestamp. Ramps are linear from the state left by the previous
    segment.
    """
    if profile is None:
        profile = default_profile()
    rng = np.random.default_rng(script.seed)
    axis = profile.lean_axis
    up = Vec3(0.0, 1.0, 0.0)
    right = up.cross(axis)
    neutral = profile.neutral_pose.position
    o0 = profile.neutral_pose.orientation

    state = {
        "lean": 0.5,
        "strafe": 0.0,
        "yaw": o0.yaw,
        "pitch": o0.pitch,
        "roll": o0.roll,
    }
    kind_to_key = {"lean": "lean", "yaw": "yaw", "pitch": "pitch", "roll": "roll", "strafe": "strafe"}

    samples: list[HeadPose] = []
    t0 = 0.0
    dt = 1.0 / script.rate_hz
    for seg in script.segments:
        n = math.ceil(seg.duration_s * script.rate_hz)
        start = dict(state)
        for j in range(n):
            frac = (j * dt) / seg.duration_s
            cur = dict(start)
            if seg.kind != "hold":
                key = kind_to_key[seg.kind]
                cur[key] = start[key] + (seg.target - start[key]) * frac
            t_ms = (t0 + j * dt) * 1000.0
            d = _lean_to_displacement(cur["lean"], profile)
            pos = neutral + axis.scaled(d) + right.scaled(cur["strafe"])
            yaw, pitch, roll = cur["yaw"], cur["pitch"], cur["roll"]
            if script.noise_pos_m > 0.0:
                nx, ny, nz = (float(v) for v in rng.normal(0.0, script.noise_pos_m, size=3))
                pos = pos + Vec3(nx, ny, nz)
            if script.noise_ang_rad > 0.0:
                dy, dp, dr = (float(v) for v in rng.normal(0.0, script.noise_ang_rad, size=3))
                yaw, pitch, roll = yaw + dy, pitch + dp, roll + dr
            samples.append(HeadPose(t_ms, pos, Orientation(yaw, pitch, roll)))
        if seg.kind != "hold":
            state[kind_to_key[seg.kind]] = seg.target
        t0 += seg.duration_s
    return PoseTrace(tuple(samples), source="synthetic", rate_hz=script.rate_hz)


def parse_script(text: str) -> MotionScript:
    """Parse the small text script format.

    Directives: `rate HZ`, `seed N`, `noise-pos SIGMA_M`,
    `noise-ang SIGMA_RAD`; segments: `hold DUR`, `lean DUR X`,
    `yaw|pitch|roll DUR RAD`, `strafe DUR METERS`.
    """
    rate, seed = DEFAULT_RATE_HZ, 0
    noise_pos, noise_ang = 0.0, 0.0
    segments: list[Segment] = []
    for idx, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        word, args = parts[0], parts[1:]
        try:
            if word == "rate":
                (rate,) = (float(a) for a in args)
            elif word == "seed":
                (seed,) = (int(a) for a in args)
            elif word == "noise-pos":
                (noise_pos,) = (float(a) for a in args)
            elif word == "noise-ang":
                (noise_ang,) = (float(a) for a in args)
            elif word == "hold":
                (dur,) = (float(a) for a in args)
                segments.append(Segment("hold", dur))
            elif word in ("lean", "yaw", "pitch", "roll", "strafe"):
                dur, target = (float(a) for a in args)
                segments.append(Segment(word, dur, target))
            else:
                raise BadScriptError(f"line {idx}: unknown directive {word!r}")
        except (ValueError, TypeError) as exc:
            raise BadScriptError(f"line {idx}: {raw.strip()!r}: {exc}") from exc
    return MotionScript(
        tuple(segments), rate_hz=rate, seed=seed, noise_pos_m=noise_pos, noise_ang_rad=noise_ang
    )


# --- view streams ----------------------------------------------------------


@dataclass(frozen=True)
class ViewRecord:
    """Flat, file-friendly mirror of a ViewState tick."""

    timestamp_ms: float
    mode: str
    zoom: float
    pan_uv: tuple[float, float]
    lean_x: float
    plane_yaw: float
    plane_pitch: float
    plane_roll: float
    cursor_uv: tuple[float, float]

    @staticmethod
    def from_view(v: ViewState) -> "ViewRecord":
        return ViewRecord(
            timestamp_ms=v.timestamp_ms,
            mode=v.mode,
            zoom=v.zoom,
            pan_uv=v.pan_uv,
            lean_x=v.lean_x,
            plane_yaw=v.plane.yaw,
            plane_pitch=v.plane.pitch,
            plane_roll=v.plane.roll,
            cursor_uv=v.cursor_uv,
        )


def view_stream_text(views: Sequence[ViewState | ViewRecord]) -> str:
    lines = [_VIEW_MAGIC, "\t".join(_VIEW_COLUMNS)]
    for v in views:
        rec = ViewRecord.from_view(v) if isinstance(v, ViewState) else v
        lines.append(
            "\t".join(
                (
                    repr(float(rec.timestamp_ms)),
                    rec.mode,
                    repr(float(rec.zoom)),
                    repr(float(rec.pan_uv[0])),
                    repr(float(rec.pan_uv[1])),
                    repr(float(rec.lean_x)),
                    repr(float(rec.plane_yaw)),
                    repr(float(rec.plane_pitch)),
                    repr(float(rec.plane_roll)),
                    repr(float(rec.cursor_uv[0])),
                    repr(float(rec.cursor_uv[1])),
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_view_stream(views: Sequence[ViewState | ViewRecord], path: str | Path) -> None:
    Path(path).write_text(view_stream_text(views))


def read_view_stream(path: str | Path) -> list[ViewRecord]:
    records: list[ViewRecord] = []
    header_seen = False
    for idx, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if tuple(line.split("\t")) != _VIEW_COLUMNS:
                raise TraceParseError(f"unexpected column header {line!r}", idx)
            header_seen = True
            continue
        parts = line.split("\t")
        if len(parts) != len(_VIEW_COLUMNS):
            raise TraceParseError(
                f"expected {len(_VIEW_COLUMNS)} fields, got {len(parts)}", idx
            )
        try:
            records.append(
                ViewRecord(
                    timestamp_ms=float(parts[0]),
                    mode=parts[1],
                    zoom=float(parts[2]),
                    pan_uv=(float(parts[3]), float(parts[4])),
                    lean_x=float(parts[5]),
                    plane_yaw=float(parts[6]),
                    plane_pitch=float(parts[7]),
                    plane_roll=float(parts[8]),
                    cursor_uv=(float(parts[9]), float(parts[10])),
                )
            )
        except ValueError:
            raise TraceParseError(f"non-numeric field in {line!r}", idx)
    if not header_seen:
        raise TraceParseError("empty or headerless view stream")
    return records


# --- trial records ----------------------------------------------------------


@dataclass(frozen=True)
class Attempt:
    timestamp_ms: float
    uv: tuple[float, float]
    correct: bool


@dataclass(frozen=True)
class TrialRecord:
    """A finished target-search trial tied to its pose trace."""

    trace_path: str
    mode: str
    image_id: str
    target_uvs: dict[str, tuple[float, float]]
    attempts: tuple[Attempt, ...]
    outcome: str
    duration_s: float
    participant: str = "p0"
    image_user_grade: Optional[int] = None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise TrialValidationError(f"unknown outcome {self.outcome!r}")
        if len(self.attempts) > TRIAL_MAX_ATTEMPTS:
            raise TrialValidationError(
                f"{len(self.attempts)} attempts exceed the budget of {TRIAL_MAX_ATTEMPTS}"
            )
        if self.duration_s > TRIAL_TIME_LIMIT_S + 1e-9:
            raise TrialValidationError(
                f"duration {self.duration_s!r} exceeds the {TRIAL_TIME_LIMIT_S:.0f} s limit"
            )
        if self.outcome == OUTCOME_SUCCESS:
            if not self.attempts or not self.attempts[-1].correct:
                raise TrialValidationError("success requires a correct final attempt")
        if self.outcome == OUTCOME_FAILED_ATTEMPTS:
            if len(self.attempts) != TRIAL_MAX_ATTEMPTS or any(
                a.correct for a in self.attempts
            ):
                raise TrialValidationError(
                    "failed_attempts requires exactly 3 incorrect attempts"
                )
        if self.outcome == OUTCOME_TIMEOUT and self.duration_s != TRIAL_TIME_LIMIT_S:
            raise TrialValidationError("timeout trials must record the full 120 s")
        if self.image_user_grade is not None and not 1 <= self.image_user_grade <= 7:
            raise TrialValidationError("image_user_grade must be in 1..7")


def classify_outcome(attempts: Sequence[Attempt], elapsed_s: float) -> str | None:
    """Terminal-state rule: a correct attempt wins, three wrong attempts
    fail, and the clock runs out at 120 s. None means still running."""
    if attempts and attempts[-1].correct:
        return OUTCOME_SUCCESS
    if len(attempts) >= TRIAL_MAX_ATTEMPTS:
        return OUTCOME_FAILED_ATTEMPTS
    if elapsed_s >= TRIAL_TIME_LIMIT_S:
        return OUTCOME_TIMEOUT
    return None


def write_trial(trial: TrialRecord, path: str | Path) -> None:
    doc = {
        "trace": trial.trace_path,
        "mode": trial.mode,
        "image_id": trial.image_id,
        "participant": trial.participant,
        "targets": {k: list(v) for k, v in trial.target_uvs.items()},
        "attempts": [[a.timestamp_ms, a.uv[0], a.uv[1], a.correct] for a in trial.attempts],
        "outcome": trial.outcome,
        "duration_s": trial.duration_s,
        "image_user_grade": trial.image_user_grade,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_trial(path: str | Path) -> TrialRecord:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise TrialValidationError(f"invalid trial file: {exc}") from exc
    try:
        return TrialRecord(
            trace_path=doc["trace"],
            mode=doc["mode"],
            image_id=doc["image_id"],
            participant=doc.get("participant", "p0"),
            target_uvs={k: (float(u), float(v)) for k, (u, v) in doc["targets"].items()},
            attempts=tuple(
                Attempt(float(t), (float(u), float(v)), bool(c))
                for t, u, v, c in doc["attempts"]
            ),
            outcome=doc["outcome"],
            duration_s=float(doc["duration_s"]),
            image_user_grade=doc.get("image_user_grade"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise TrialValidationError(f"incomplete trial file: {exc}") from exc
