"""Quaternion algebra in scalar-first (w, x, y, z) order.

Everything here is plain float arithmetic on small immutable tuples; the
simulation calls these functions tens of thousands of times per run, so
numpy is deliberately avoided for single quaternions.
"""

from __future__ import annotations

import math
from typing import NamedTuple

UNIT_TOL = 1e-9


class QuaternionError(ValueError):
    """Raised for non-finite input or a non-unit rotation quaternion."""


class Vec3(NamedTuple):
    x: float
    y: float
    z: float

    def __add__(self, other):  # type: ignore[override]
        return Vec3(self.x + other[0], self.y + other[1], self.z + other[2])

    def __sub__(self, other):
        return Vec3(self.x - other[0], self.y - other[1], self.z - other[2])

    def __mul__(self, k):  # type: ignore[override]
        return Vec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __neg__(self):
        return Vec3(-self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def cross(self, other) -> "Vec3":
        ax, ay, az = self
        bx, by, bz = other
        return Vec3(ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


ZERO = Vec3(0.0, 0.0, 0.0)


class Quaternion(NamedTuple):
    w: float
    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    @property
    def vector(self) -> Vec3:
        return Vec3(self.x, self.y, self.z)

    @classmethod
    def pure(cls, v) -> "Quaternion":
        return cls(0.0, float(v[0]), float(v[1]), float(v[2]))


IDENTITY = Quaternion(1.0, 0.0, 0.0, 0.0)


def from_euler(phi: float, theta: float, psi: float) -> Quaternion:
    """Rotation quaternion for roll ``phi`` (x), pitch ``theta`` (y) and yaw ``psi`` (z).

    The composition is yaw, then pitch, then roll applied in the body frame,
    i.e. ``q = qz(psi) * qy(theta) * qx(phi)``.
    """
    if not (math.isfinite(phi) and math.isfinite(theta) and math.isfinite(psi)):
        raise QuaternionError(f"non-finite Euler angles ({phi}, {theta}, {psi})")
    cr, sr = math.cos(phi / 2), math.sin(phi / 2)
    cp, sp = math.cos(theta / 2), math.sin(theta / 2)
    cy, sy = math.cos(psi / 2), math.sin(psi / 2)
    return Quaternion(
        cr * cp * cy + sr * sp * sy,
        sr * cp * cy - cr * sp * sy,
        cr * sp * cy + sr * cp * sy,
        cr * cp * sy - sr * sp * cy,
    )


def hamilton(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p * q`` (non-commutative)."""
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return Quaternion(
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    )


def conjugate(q: Quaternion) -> Quaternion:
    return Quaternion(q[0], -q[1], -q[2], -q[3])


def rotate(q: Quaternion, v) -> Vec3:
    """Rotate ``v`` by the unit quaternion ``q`` as ``q * v * conj(q)``.

    Raises
    ------
    QuaternionError
        If ``q`` deviates from unit norm by more than 1e-9 or ``v`` is not finite.
    """
    if abs(Quaternion(*q).norm() - 1.0) > UNIT_TOL:
        raise QuaternionError(f"rotation quaternion is not unit-norm: {tuple(q)}")
    if not all(math.isfinite(c) for c in v):
        raise QuaternionError(f"non-finite vector {tuple(v)}")
    out = hamilton(hamilton(q, Quaternion.pure(v)), conjugate(q))
    return Vec3(out[1], out[2], out[3])
