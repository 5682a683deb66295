"""Vector/angle primitives, image-plane placement and ray picking.

World convention: Y is up, +Z is forward at zero yaw, +X is to the right.
Yaw is a rotation about the vertical axis (positive turns the view toward
+X), positive pitch raises the view, roll turns about the view axis.
Rotations compose yaw, then pitch, then roll. Distances are meters,
angles radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

PLANE_WIDTH_M = 2.0
PLANE_HEIGHT_M = 1.0
PLANE_DISTANCE_M = 2.0

_PARALLEL_EPS = 1e-12
_HORIZONTAL_EPS = 1e-6

TAU = 2.0 * math.pi


class DegeneratePoseError(ValueError):
    """Initial pose looks straight up/down; no horizontal forward direction."""


def wrap_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.remainder(a, TAU)
    if w <= -math.pi:
        w += TAU
    return w


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return self.scaled(1.0 / n)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def horizontal(self) -> "Vec3":
        return Vec3(self.x, 0.0, self.z)


@dataclass(frozen=True)
class Orientation:
    """Head orientation as yaw/pitch/roll radians.

    Valid ranges: yaw and roll in (-pi, pi], pitch in [-pi/2, pi/2].
    """

    yaw: float
    pitch: float
    roll: float

    def wrapped(self) -> "Orientation":
        pitch = min(max(self.pitch, -math.pi / 2.0), math.pi / 2.0)
        return Orientation(wrap_angle(self.yaw), pitch, wrap_angle(self.roll))

    def is_finite(self) -> bool:
        return (
            math.isfinite(self.yaw)
            and math.isfinite(self.pitch)
            and math.isfinite(self.roll)
        )


@dataclass(frozen=True)
class HeadPose:
    """One tracked head sample: timestamp (ms), position and orientation."""

    timestamp_ms: float
    position: Vec3
    orientation: Orientation

    def is_finite(self) -> bool:
        return (
            math.isfinite(self.timestamp_ms)
            and self.position.is_finite()
            and self.orientation.is_finite()
        )


def forward_vector(o: Orientation) -> Vec3:
    """Unit view direction for an orientation; roll has no effect."""
    cp = math.cos(o.pitch)
    return Vec3(cp * math.sin(o.yaw), math.sin(o.pitch), cp * math.cos(o.yaw))


def orientation_basis(yaw: float, pitch: float, roll: float) -> tuple[Vec3, Vec3, Vec3]:
    """Right/up/forward unit vectors for yaw->pitch->roll composition."""
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cr, sr = math.cos(roll), math.sin(roll)
    right = Vec3(cy * cr - sy * sp * sr, cp * sr, -sy * cr - cy * sp * sr)
    up = Vec3(-cy * sr - sy * sp * cr, cp * cr, sy * sr - cy * sp * cr)
    fwd = Vec3(sy * cp, sp, cy * cp)
    return right, up, fwd


@dataclass(frozen=True)
class ImagePlane:
    """The virtual 2 m x 1 m content plane.

    Orientation angles describe the frame of a viewer standing in front of
    the plane and looking at it: the plane's outward normal is the negated
    forward axis of that frame, so at zero yaw/pitch/roll the plane faces -Z.
    """

    center: Vec3
    yaw: float
    pitch: float
    roll: float
    width: float = PLANE_WIDTH_M
    height: float = PLANE_HEIGHT_M

    def basis(self) -> tuple[Vec3, Vec3, Vec3]:
        """(right, up, normal); normal points toward the viewer side."""
        right, up, fwd = orientation_basis(self.yaw, self.pitch, self.roll)
        return right, up, fwd.scaled(-1.0)

    @property
    def normal(self) -> Vec3:
        return self.basis()[2]

    def uv_of(self, point: Vec3) -> tuple[float, float]:
        """Unclamped uv of a point assumed to lie on the plane carrier.

        u grows to the viewer's right, v grows downward; (0.5, 0.5) is the
        plane center.
        """
        right, up, _ = self.basis()
        d = point - self.center
        return 0.5 + d.dot(right) / self.width, 0.5 - d.dot(up) / self.height

    def world_of(self, u: float, v: float) -> Vec3:
        right, up, _ = self.basis()
        return (
            self.center
            + right.scaled((u - 0.5) * self.width)
            + up.scaled((0.5 - v) * self.height)
        )


@dataclass(frozen=True)
class PlaneHit:
    """Result of casting a ray against an ImagePlane.

    When valid, hit_point is the carrier-plane intersection and uv is the
    componentwise clamp of its plane coordinates into [0, 1]^2. Edge
    contact stays valid so clamped content remains reachable; only rays
    parallel to the plane or pointing away from it are invalid.
    """

    hit_point: Vec3
    uv: tuple[float, float]
    valid: bool

    @staticmethod
    def miss() -> "PlaneHit":
        nan = math.nan
        return PlaneHit(Vec3(nan, nan, nan), (nan, nan), False)


def place_plane(initial: HeadPose) -> ImagePlane:
    """Place the content plane 2 m ahead of the head along the
    horizontalized view direction, at eye height, facing the user.

    Raises DegeneratePoseError when the view direction is vertical
    (horizontal component below 1e-6), since "2 m in front" is then
    undefined.
    """
    f = forward_vector(initial.orientation)
    h = f.horizontal()
    if h.norm() <= _HORIZONTAL_EPS:
        raise DegeneratePoseError(
            "initial pose looks straight up/down; cannot place the image plane"
        )
    hn = h.normalized()
    center = initial.position + hn.scaled(PLANE_DISTANCE_M)
    return ImagePlane(center=center, yaw=math.atan2(hn.x, hn.z), pitch=0.0, roll=0.0)


def aim_plane(plane: ImagePlane, toward: Vec3, roll: float) -> ImagePlane:
    """Reorient a plane about its fixed center so its normal points at
    `toward`, carrying the requested roll about the view axis."""
    n = (toward - plane.center).normalized()
    fwd = n.scaled(-1.0)
    pitch = math.asin(min(max(fwd.y, -1.0), 1.0))
    yaw = math.atan2(fwd.x, fwd.z)
    return ImagePlane(
        center=plane.center,
        yaw=yaw,
        pitch=pitch,
        roll=roll,
        width=plane.width,
        height=plane.height,
    )


def raycast_plane(origin: Vec3, direction: Vec3, plane: ImagePlane) -> PlaneHit:
    """Intersect a forward ray (t >= 0) with the plane carrier.

    Hits outside the 2 m x 1 m rectangle clamp uv componentwise into
    [0, 1] and stay valid; parallel or receding rays miss.
    """
    n = plane.normal
    denom = direction.dot(n)
    if abs(denom) < _PARALLEL_EPS:
        return PlaneHit.miss()
    t = (plane.center - origin).dot(n) / denom
    if t < 0.0:
        return PlaneHit.miss()
    hit = origin + direction.scaled(t)
    u, v = plane.uv_of(hit)
    return PlaneHit(hit, (min(max(u, 0.0), 1.0), min(max(v, 0.0), 1.0)), True)
