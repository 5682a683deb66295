"""The live-session protocol: line-delimited text frames over one
persistent channel.

Inbound frames (from the pose producer):

    POSE t px py pz yaw pitch roll
    MODE static|parallel|tilt
    CALIB px py pz yaw pitch roll forwardLimit backwardLimit
    TRIAL imageId name u v [name u v ...]
    ATTEMPT u v

Outbound frames (broadcast to every connected client):

    VIEW t mode zoom panU panV leanX planeYaw planePitch planeRoll cursorU cursorV
    TRIAL imageId timeLimitS maxAttempts name u v [...]
    RESULT correct|wrong|timeout remainingAttempts
    ERR message

The first named TRIAL target is the search subject; an attempt is correct
when it lands strictly inside the 105 px ring around it (reference-image
pixels). Malformed frames produce an ERR and leave the session running.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..calibration import CalibrationError, CalibrationProfile
from ..geometry import DegeneratePoseError, HeadPose, Orientation, Vec3, forward_vector
from ..metrics import HIT_RADIUS_PX, REF_IMAGE_PX
from ..modes import Engine, EngineConfig, EngineError, NotCalibratedError, ViewState
from ..trace_io import (
    TRIAL_MAX_ATTEMPTS,
    TRIAL_TIME_LIMIT_S,
)


def _fmt(x: float) -> str:
    return repr(float(x))


def view_frame(v: ViewState) -> str:
    return " ".join(
        (
            "VIEW",
            _fmt(v.timestamp_ms),
            v.mode,
            _fmt(v.zoom),
            _fmt(v.pan_uv[0]),
            _fmt(v.pan_uv[1]),
            _fmt(v.lean_x),
            _fmt(v.plane.yaw),
            _fmt(v.plane.pitch),
            _fmt(v.plane.roll),
            _fmt(v.cursor_uv[0]),
            _fmt(v.cursor_uv[1]),
        )
    )


@dataclass
class TrialState:
    image_id: str
    targets: dict[str, tuple[float, float]]
    primary: str
    start_ms: float | None = None
    attempts_left: int = TRIAL_MAX_ATTEMPTS
    finished: bool = False

    def announce(self) -> str:
        parts = [
            "TRIAL",
            self.image_id,
            _fmt(TRIAL_TIME_LIMIT_S),
            str(TRIAL_MAX_ATTEMPTS),
        ]
        for name, (u, v) in self.targets.items():
            parts += [name, _fmt(u), _fmt(v)]
        return " ".join(parts)

    def hit(self, uv: tuple[float, float]) -> bool:
        w, h = REF_IMAGE_PX
        tu, tv = self.targets[self.primary]
        return math.hypot((uv[0] - tu) * w, (uv[1] - tv) * h) < HIT_RADIUS_PX


class Session:
    """One engine session; feed it protocol lines, get protocol lines back."""

    def __init__(
        self,
        config: EngineConfig | None = None,
        profile: CalibrationProfile | None = None,
    ):
        self.config = config or EngineConfig(mode="static")
        self.profile = profile
        self.mode = self.config.mode
        self.engine: Engine | None = None
        self.trial: TrialState | None = None
        self.last_pose_ms: float | None = None

    # -- engine plumbing ----------------------------------------------------

    def _ensure_engine(self) -> Engine:
        if self.engine is None:
            config = EngineConfig(
                mode=self.mode,
                zoom_range=self.config.zoom_range,
                max_head_speed_m_s=self.config.max_head_speed_m_s,
                gap_timeout_s=self.config.gap_timeout_s,
                schedule_override=self.config.schedule_override,
            )
            self.engine = Engine(config, self.profile)
        return self.engine

    # -- frame handling -----------------------------------------------------

    def handle_line(self, line: str) -> list[str]:
        line = line.strip()
        if not line:
            return []
        parts = line.split()
        word = parts[0].upper()
        try:
            if word == "POSE":
                return self._on_pose(parts[1:])
            if word == "MODE":
                return self._on_mode(parts[1:])
            if word == "CALIB":
                return self._on_calib(parts[1:])
            if word == "TRIAL":
                return self._on_trial(parts[1:])
            if word == "ATTEMPT":
                return self._on_attempt(parts[1:])
            return [f"ERR unknown frame {parts[0]!r}"]
        except (ValueError, IndexError) as exc:
            return [f"ERR malformed {word} frame: {exc}"]
        except (NotCalibratedError, DegeneratePoseError, CalibrationError, EngineError) as exc:
            return [f"ERR {type(exc).__name__}: {exc}"]

    def _on_pose(self, args: list[str]) -> list[str]:
        if len(args) != 7:
            raise ValueError(f"expected 7 numbers, got {len(args)}")
        t, px, py, pz, yaw, pitch, roll = (float(a) for a in args)
        pose = HeadPose(t, Vec3(px, py, pz), Orientation(yaw, pitch, roll))
        engine = self._ensure_engine()
        view = engine.step(pose)
        self.last_pose_ms = t
        out = [view_frame(view)]
        out += self._check_timeout(t)
        return out

    def _on_mode(self, args: list[str]) -> list[str]:
        if len(args) != 1:
            raise ValueError("expected one mode word")
        mode = args[0].lower()
        if self.engine is not None:
            self.engine.set_mode(mode)
        else:
            if mode not in ("static", "parallel", "tilt"):
                raise ValueError(f"unknown mode {mode!r}")
            if mode != "static" and self.profile is None:
                raise NotCalibratedError(f"mode {mode!r} requires calibration")
        self.mode = mode
        return []

    def _on_calib(self, args: list[str]) -> list[str]:
        if len(args) != 8:
            raise ValueError(f"expected 8 numbers, got {len(args)}")
        px, py, pz, yaw, pitch, roll, fwd, back = (float(a) for a in args)
        neutral = HeadPose(0.0, Vec3(px, py, pz), Orientation(yaw, pitch, roll))
        axis = forward_vector(neutral.orientation).horizontal()
        if axis.norm() <= 1e-6:
            raise CalibrationError("calibration pose looks straight up/down")
        profile = CalibrationProfile(
            neutral_pose=neutral,
            forward_limit_m=fwd,
            backward_limit_m=back,
            lean_axis=axis.normalized(),
        )
        self.profile = profile
        if self.engine is not None:
            self.engine.set_profile(profile)
        return []

    def _on_trial(self, args: list[str]) -> list[str]:
        if len(args) < 4 or (len(args) - 1) % 3 != 0:
            raise ValueError("expected: TRIAL imageId name u v [name u v ...]")
        image_id = args[0]
        targets: dict[str, tuple[float, float]] = {}
        primary = None
        rest = args[1:]
        for i in range(0, len(rest), 3):
            name = rest[i]
            u, v = float(rest[i + 1]), float(rest[i + 2])
            if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
                raise ValueError(f"target {name!r} uv outside [0,1]")
            targets[name] = (u, v)
            if primary is None:
                primary = name
        self.trial = TrialState(image_id=image_id, targets=targets, primary=primary)
        if self.last_pose_ms is not None:
            self.trial.start_ms = self.last_pose_ms
        return [self.trial.announce()]

    def _on_attempt(self, args: list[str]) -> list[str]:
        if len(args) != 2:
            raise ValueError("expected: ATTEMPT u v")
        u, v = float(args[0]), float(args[1])
        trial = self.trial
        if trial is None:
            return ["ERR no active trial"]
        if trial.finished:
            return ["ERR trial already finished"]
        if trial.hit((u, v)):
            trial.finished = True
            return [f"RESULT correct {trial.attempts_left - 1}"]
        trial.attempts_left -= 1
        if trial.attempts_left <= 0:
            trial.finished = True
        return [f"RESULT wrong {trial.attempts_left}"]

    def _check_timeout(self, t_ms: float) -> list[str]:
        trial = self.trial
        if trial is None or trial.finished:
            return []
        if trial.start_ms is None:
            trial.start_ms = t_ms
            return []
        if (t_ms - trial.start_ms) / 1000.0 >= TRIAL_TIME_LIMIT_S:
            trial.finished = True
            return [f"RESULT timeout {trial.attempts_left}"]
        return []
