"""Circle <-> closed polar curve map built from x-axis quaternion rotations.

A curve family is fixed by a deformation profile ``g(phi)`` with
``|g| <= 1``. The target curve is ``(r cos phi, r sin phi g(phi))`` in the
plane; lifting it to 3-D with the rotation ``rho(phi)`` about the x-axis,
where ``cos(theta) = g(phi)``, gives a norm-preserving image of the circle
of radius ``r``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .quaternion import Quaternion, Vec3, rotate

TWO_PI = 2.0 * math.pi
ORIGIN_EPS = 1e-9
SIGN_EPS = 1e-9
PROFILE_SLACK = 1e-12


class EmbeddingError(ValueError):
    pass


class DegeneratePointError(EmbeddingError):
    """The point is too close to the origin for its angle to be defined."""


class CurveFamily(str, enum.Enum):
    CIRCLE = "circle"
    GERONO = "gerono"
    DUMBBELL = "dumbbell"
    CUSTOM = "custom"


_PROFILES: dict[CurveFamily, Callable[[float], float]] = {
    CurveFamily.CIRCLE: lambda phi: 1.0,
    CurveFamily.GERONO: math.cos,
    CurveFamily.DUMBBELL: lambda phi: math.cos(phi) ** 2,
}

_PROFILE_DERIVATIVES: dict[CurveFamily, Callable[[float], float]] = {
    CurveFamily.CIRCLE: lambda phi: 0.0,
    CurveFamily.GERONO: lambda phi: -math.sin(phi),
    CurveFamily.DUMBBELL: lambda phi: -math.sin(2.0 * phi),
}


def wrap_2pi(angle: float) -> float:
    """Wrap to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class CurveSpec:
    """A closed curve ``(r cos phi, r sin phi g(phi))``.

    For ``CurveFamily.CUSTOM`` a callable ``profile`` must be supplied; the
    named families carry their own. ``profile_derivative`` is optional for
    custom profiles and falls back to a central difference.
    """

    family: CurveFamily
    radius: float
    profile: Callable[[float], float] | None = field(default=None, compare=False)
    profile_derivative: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", CurveFamily(self.family))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise EmbeddingError(f"radius must be positive, got {self.radius}")
        if self.family is CurveFamily.CUSTOM:
            if self.profile is None:
                raise EmbeddingError("custom curve family needs a profile function")
        elif self.profile is None:
            object.__setattr__(self, "profile", _PROFILES[self.family])
            object.__setattr__(self, "profile_derivative", _PROFILE_DERIVATIVES[self.family])

    def g(self, phi: float) -> float:
        return self.profile(phi)

    def dg(self, phi: float) -> float:
        if self.profile_derivative is not None:
            return self.profile_derivative(phi)
        h = 1e-6
        return (self.profile(phi + h) - self.profile(phi - h)) / (2.0 * h)

    def check_profile(self, samples: int = 10_000, seam_tol: float = 1e-6) -> None:
        """Sampled validation: ``|g| <= 1`` and continuity across the 0/2pi seam."""
        grid = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        values = np.array([self.g(p) for p in grid])
        if not np.all(np.isfinite(values)):
            raise EmbeddingError("profile returns non-finite values")
        if np.max(np.abs(values)) > 1.0 + PROFILE_SLACK:
            raise EmbeddingError(f"profile leaves [-1, 1]: max |g| = {np.max(np.abs(values))}")
        eps = 1e-9
        if abs(self.g(0.0) - self.g(TWO_PI - eps)) > seam_tol:
            raise EmbeddingError("profile is not periodic across the 0/2pi seam")


class EmbeddedPoint(NamedTuple):
    x_hat: Vec3
    phi: float


def circle_point(r: float, phi: float) -> Vec3:
    if not r > 0:
        raise EmbeddingError(f"radius must be positive, got {r}")
    return Vec3(r * math.cos(phi), r * math.sin(phi), 0.0)


def curve_point(spec: CurveSpec, phi: float) -> Vec3:
    """Planar point of the target curve at parameter ``phi`` (z = 0)."""
    r = spec.radius
    return Vec3(r * math.cos(phi), r * math.sin(phi) * spec.g(phi), 0.0)


def _clip_unit(g: float) -> float:
    if abs(g) > 1.0 + PROFILE_SLACK:
        raise EmbeddingError(f"profile value {g} outside [-1, 1]")
    return min(1.0, max(-1.0, g))


def alpha_beta(g: float) -> tuple[float, float]:
    g = _clip_unit(g)
    return -math.sqrt((1.0 + g) / 2.0), -math.sqrt((1.0 - g) / 2.0)


def rho(spec: CurveSpec, phi: float) -> Quaternion:
    """Functional unit quaternion ``(alpha, beta, 0, 0)`` on the negative branch."""
    a, b = alpha_beta(spec.g(phi))
    return Quaternion(a, b, 0.0, 0.0)


def twist_rate(spec: CurveSpec, phi: float) -> float:
    """Derivative of the twist angle ``arccos(g(phi))`` with respect to ``phi``.

    Where the twist angle reaches 0 or pi the profile is at an extremum, so
    its derivative vanishes too; the term is taken as zero there.
    """
    g = _clip_unit(spec.g(phi))
    sin_t = math.sqrt(1.0 - g * g)
    if sin_t < SIGN_EPS:
        return 0.0
    return -spec.dg(phi) / sin_t


def twist(spec: CurveSpec, x_hat, phi: float) -> Vec3:
    """Carry a point of the circular embedding onto the 3-D curve."""
    return rotate(rho(spec, phi), x_hat)


def untwist(spec: CurveSpec, x, sign_rule: str = "nearest") -> EmbeddedPoint:
    """Invert :func:`twist` by collapsing the x-axis rotation.

    Every ``rho`` rotates about the x-axis and preserves ``y**2 + z**2``, so
    the embedding point is ``(x, s * hypot(y, z), 0)`` for a sign ``s``.

    ``sign_rule="nearest"`` (default) twists both candidates back and keeps
    the one closer to ``x``; it is exact on the curve and stays correct near
    the points where the lifted curve touches the x-axis. ``"z_first"`` takes
    ``s = sign(z)`` and only falls back to ``sign(y * g)`` when ``z`` vanishes.
    """
    px, py, pz = (float(c) for c in x)
    if not (math.isfinite(px) and math.isfinite(py) and math.isfinite(pz)):
        raise EmbeddingError(f"non-finite point {(px, py, pz)}")
    if math.sqrt(px * px + py * py + pz * pz) < ORIGIN_EPS:
        raise DegeneratePointError("angle is undefined at the origin")
    rho_yz = math.hypot(py, pz)
    if sign_rule == "nearest":
        # alignment of (y, z) with the twisted direction s * (cos t, sin t)
        score = []
        for s in (1.0, -1.0):
            g = _clip_unit(spec.g(math.atan2(s * rho_yz, px)))
            score.append(s * (py * g + pz * math.sqrt(1.0 - g * g)))
        s = 1.0 if score[0] >= score[1] else -1.0
    elif sign_rule == "z_first":
        if abs(pz) > SIGN_EPS:
            s = 1.0 if pz > 0 else -1.0
        else:
            g_local = spec.g(math.atan2(rho_yz, px))
            s = -1.0 if py * g_local < 0.0 else 1.0
    else:
        raise ValueError(f"unknown sign rule {sign_rule!r}")
    y_hat = s * rho_yz
    return EmbeddedPoint(Vec3(px, y_hat, 0.0), wrap_2pi(math.atan2(y_hat, px)))


def sample_curve(spec: CurveSpec, samples: int) -> np.ndarray:
    """Rows of ``phi, x, y, z, alpha, beta`` on a uniform grid over [0, 2pi).

    ``x, y, z`` is the twisted 3-D point of the circle of radius
    ``spec.radius``; its x-y projection is the target curve.
    """
    if samples < 2:
        raise EmbeddingError("need at least two samples")
    rows = np.empty((samples, 6))
    for k in range(samples):
        phi = TWO_PI * k / samples
        q = rho(spec, phi)
        p = twist(spec, circle_point(spec.radius, phi), phi)
        rows[k] = (phi, p.x, p.y, p.z, q.w, q.x)
    return rows
