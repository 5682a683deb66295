"""Lean-scheduled scalar Kalman smoothing of the head-pose stream.

Each pose channel (position x/y/z, yaw, pitch, roll) runs a scalar
constant-state Kalman filter:

    P <- P + q;  K = P / (P + r);  estimate += K * (z - estimate);
    P <- (1 - K) * P

q and r are resampled every tick from mode-specific piecewise-linear
curves over the lean coordinate x, so smoothing strengthens exactly
where the zoom mapping amplifies small head motions. A guard stage holds
the last valid pose across tracking dropouts, non-finite samples and
impossibly fast jumps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import HeadPose, Orientation, Vec3, wrap_angle

MODE_STATIC = "static"
MODE_PARALLEL = "parallel"
MODE_TILT = "tilt"
MODES = (MODE_STATIC, MODE_PARALLEL, MODE_TILT)

# guard defaults: head speed cap and stream-gap timeout
MAX_HEAD_SPEED_M_S = 2.0
GAP_TIMEOUT_S = 0.5

INITIAL_ERROR_COVARIANCE = 1.0

ACCEPT = "accept"
HOLD = "hold"


@dataclass(frozen=True)
class ParamCurve:
    """Piecewise-linear curve over x in [0, 1]; constant beyond the ends."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("curve needs at least one breakpoint")
        xs = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x values must be strictly increasing")
        if any(p[1] <= 0.0 for p in self.points):
            raise ValueError("breakpoint values must be positive")

    def eval(self, x: float) -> float:
        x = min(max(x, 0.0), 1.0)
        pts = self.points
        if x <= pts[0][0]:
            return pts[0][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return pts[-1][1]

    def table(self) -> str:
        """Breakpoints as a small tab-separated table, for docs/plots."""
        return "\n".join(f"{x!r}\t{y!r}" for x, y in self.points) + "\n"


def eval_curve(curve: ParamCurve, x: float) -> float:
    return curve.eval(x)


@dataclass(frozen=True)
class FilterSchedule:
    mode: str
    q_curve: ParamCurve
    r_curve: ParamCurve

    def sample(self, x: float) -> tuple[float, float]:
        return self.q_curve.eval(x), self.r_curve.eval(x)


_R_ADAPTIVE = ParamCurve(((0.0, 1e-4), (0.5, 1e-4), (1.0, 0.1)))


def builtin_schedule(mode: str) -> FilterSchedule:
    """The stock q/r schedules.

    tilt: q constant at 0.01; r flat at 1e-4 up to x=0.5, then linear to
    0.1 at x=1. parallel: same r; q flat at 0.01 up to 0.5, then linear
    down to 1e-4. static: both constant (no zoom mapping to adapt to).
    """
    if mode == MODE_TILT:
        return FilterSchedule(
            mode, ParamCurve(((0.0, 0.01), (1.0, 0.01))), _R_ADAPTIVE
        )
    if mode == MODE_PARALLEL:
        return FilterSchedule(
            mode, ParamCurve(((0.0, 0.01), (0.5, 0.01), (1.0, 1e-4))), _R_ADAPTIVE
        )
    if mode == MODE_STATIC:
        return FilterSchedule(
            mode,
            ParamCurve(((0.0, 0.01), (1.0, 0.01))),
            ParamCurve(((0.0, 1e-4), (1.0, 1e-4))),
        )
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class KalmanChannel:
    """One scalar constant-state filter; set angular=True to wrap the
    innovation (and estimate) into (-pi, pi]."""

    angular: bool = False
    estimate: float = 0.0
    error_covariance: float = INITIAL_ERROR_COVARIANCE
    initialized: bool = False

    def update(self, z: float, q: float, r: float) -> float:
        if not self.initialized:
            self.estimate = z
            self.error_covariance = INITIAL_ERROR_COVARIANCE
            self.initialized = True
            return self.estimate
        p = self.error_covariance + q
        k = p / (p + r)
        innovation = z - self.estimate
        if self.angular:
            innovation = wrap_angle(innovation)
        estimate = self.estimate + k * innovation
        if self.angular:
            estimate = wrap_angle(estimate)
        self.estimate = estimate
        self.error_covariance = (1.0 - k) * p
        return self.estimate


def update_channel(ch: KalmanChannel, z: float, q: float, r: float) -> float:
    return ch.update(z, q, r)


@dataclass
class FilterBank:
    """Six channels advanced together, plus the guard's last-valid state.

    last_valid is the most recent accepted raw sample; its timestamp moves
    forward on every processed sample (held or not) so dt always reflects
    the stream cadence.
    """

    schedule: FilterSchedule
    max_speed_m_s: float = MAX_HEAD_SPEED_M_S
    gap_timeout_s: float = GAP_TIMEOUT_S
    channels: dict = field(default_factory=dict)
    last_valid: HeadPose | None = None
    last_timestamp_ms: float | None = None
    hold_active: bool = False

    def __post_init__(self):
        if not self.channels:
            self.channels = {
                "px": KalmanChannel(),
                "py": KalmanChannel(),
                "pz": KalmanChannel(),
                "yaw": KalmanChannel(angular=True),
                "pitch": KalmanChannel(angular=True),
                "roll": KalmanChannel(angular=True),
            }

    def guard(self, raw: HeadPose, dt_s: float) -> str:
        """Accept/hold decision for one raw sample.

        Holds on non-finite data, on stream gaps longer than the timeout
        and on displacement from the last valid position faster than the
        speed cap. Held ticks leave the filter untouched; output stays at
        the last valid pose until a nearby sample arrives.
        """
        if not raw.is_finite():
            return HOLD
        if self.last_valid is None:
            return ACCEPT
        if dt_s > self.gap_timeout_s:
            return HOLD
        displacement = (raw.position - self.last_valid.position).norm()
        if displacement > self.max_speed_m_s * dt_s:
            return HOLD
        return ACCEPT

    def filter(self, raw: HeadPose, x: float) -> HeadPose:
        """Advance all six channels with the (q, r) sampled at x."""
        q, r = self.schedule.sample(x)
        ch = self.channels
        pos = Vec3(
            ch["px"].update(raw.position.x, q, r),
            ch["py"].update(raw.position.y, q, r),
            ch["pz"].update(raw.position.z, q, r),
        )
        o = raw.orientation
        ori = Orientation(
            ch["yaw"].update(o.yaw, q, r),
            min(max(ch["pitch"].update(o.pitch, q, r), -math.pi / 2), math.pi / 2),
            ch["roll"].update(o.roll, q, r),
        )
        return HeadPose(raw.timestamp_ms, pos, ori)

    def step(self, raw: HeadPose, dt_s: float, x: float) -> tuple[str, HeadPose]:
        """Guard then filter one sample; returns the decision and either
        the filtered pose or (on hold) the last valid raw pose."""
        decision = self.guard(raw, dt_s)
        if decision == HOLD:
            self.hold_active = True
            if math.isfinite(raw.timestamp_ms):
                self.last_timestamp_ms = raw.timestamp_ms
            return HOLD, self.last_valid
        self.hold_active = False
        filtered = self.filter(raw, x)
        self.last_valid = raw
        self.last_timestamp_ms = raw.timestamp_ms
        return ACCEPT, filtered


def guard_sample(bank: FilterBank, raw: HeadPose, dt_s: float) -> str:
    return bank.guard(raw, dt_s)


def filter_pose(bank: FilterBank, raw: HeadPose, x: float) -> HeadPose:
    return bank.filter(raw, x)
