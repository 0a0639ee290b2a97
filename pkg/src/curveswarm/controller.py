"""Per-agent control law on the circular embedding.

Stage one regulates the agent's angle against its two ring neighbours;
stage two maps the resulting embedding reference back onto the curve and
closes a linear position/velocity loop around it.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .embedding import CurveSpec, circle_point, twist, twist_rate, untwist, wrap_2pi
from .quaternion import Vec3


class SignMode(str, enum.Enum):
    PAPER_LITERAL = "paper_literal"
    NEGATED = "negated"


class GapMode(str, enum.Enum):
    RING = "ring"
    SYMMETRIC = "symmetric"


class VelocityMode(str, enum.Enum):
    """How the desired velocity is built from the twisted angular rate.

    ``LITERAL``: rotated rate crossed with the agent's position.
    ``LITERAL_XD``: rotated rate crossed with the reference position.
    ``TWIST_RATE``: as ``LITERAL`` plus the x-axis rate of the twist itself,
    so the reference velocity follows the curve rather than its tangent plane.
    """

    LITERAL = "literal"
    LITERAL_XD = "literal_xd"
    TWIST_RATE = "twist_rate"


class GainsError(ValueError):
    pass


@dataclass(frozen=True)
class Gains:
    """Controller parameters.

    Attributes
    ----------
    k_x : float
        Position gain [1/s^2].
    k_v : float
        Velocity gain [1/s].
    k_phi : float
        Angular consensus gain [1/s].
    r_d : float
        Radius of the circular embedding [m].
    phi_dot_d : float
        Nominal angular speed on the embedding [rad/s].
    """

    k_x: float = 100.0
    k_v: float = 21.0
    k_phi: float = 2.0
    r_d: float = 1.5
    phi_dot_d: float = 0.2

    def __post_init__(self):
        for name in ("k_x", "k_v", "k_phi", "r_d", "phi_dot_d"):
            if not math.isfinite(getattr(self, name)):
                raise GainsError(f"{name} must be finite")
        if self.r_d <= 0:
            raise GainsError(f"r_d must be positive, got {self.r_d}")


class NeighborAngles(NamedTuple):
    phi_lag: float
    phi_lead: float


class Reference(NamedTuple):
    x_d: Vec3
    v_d: Vec3


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: tuple[complex, complex]
    stable: bool
    oscillatory: bool
    paper_condition: bool

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [{"re": ev.real, "im": ev.imag} for ev in self.eigenvalues],
            "stable": self.stable,
            "oscillatory": self.oscillatory,
            "paper_condition": self.paper_condition,
        }


def wrap_pi(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.pi - wrap_2pi(math.pi - angle)
    return a


def estimate_phase(spec: CurveSpec, x_i) -> float:
    """Embedding angle of a Cartesian position, in [0, 2pi)."""
    return untwist(spec, x_i).phi


def angular_consensus(
    phi_i: float,
    nbrs: NeighborAngles,
    gains: Gains,
    sign_mode: SignMode = SignMode.NEGATED,
    gap_mode: GapMode = GapMode.RING,
) -> float:
    """Commanded angular rate from the lagging/leading neighbour angles.

    ``PAPER_LITERAL`` keeps the ``(2 phi_i - phi_j - phi_k)`` weighting with a
    positive gain; ``NEGATED`` flips it so that the agent moves toward the
    midpoint of its neighbours.

    ``GapMode.RING`` measures both gaps forward along the ring, in [0, 2pi),
    so the ring keeps its winding and uniform spacing is the only rest
    point. ``GapMode.SYMMETRIC`` wraps each difference to (-pi, pi]; once
    a gap exceeds pi it reads as negative, and the swarm can settle with
    every agent at the same angle. The two agree while all gaps are below pi.
    """
    wrap = wrap_2pi if GapMode(gap_mode) is GapMode.RING else wrap_pi
    behind = wrap(phi_i - nbrs.phi_lag)
    ahead = wrap(nbrs.phi_lead - phi_i)
    sigma = 1.0 if SignMode(sign_mode) is SignMode.PAPER_LITERAL else -1.0
    return gains.phi_dot_d + sigma * (gains.k_phi / 3.0) * (behind - ahead)


def embedded_reference(phi_i: float, phi_dot_cmd: float, gains: Gains) -> tuple[Vec3, Vec3]:
    return circle_point(gains.r_d, phi_i), Vec3(0.0, 0.0, phi_dot_cmd)


def curve_reference(
    spec: CurveSpec,
    phi_i: float,
    x_hat_d: Vec3,
    omega_hat_d: Vec3,
    x_i,
    mode: VelocityMode = VelocityMode.TWIST_RATE,
) -> Reference:
    """Twist the embedding reference onto the curve.

    ``x_d`` is the twisted embedding point. ``v_d`` is an angular rate
    crossed with a lever arm; see :class:`VelocityMode` for the variants.
    """
    mode = VelocityMode(mode)
    x_d = twist(spec, x_hat_d, phi_i)
    omega = twist(spec, omega_hat_d, phi_i)
    lever = x_d if mode is VelocityMode.LITERAL_XD else Vec3(*x_i)
    if mode is VelocityMode.TWIST_RATE:
        # d/dt of the twist angle is about the x-axis
        omega = Vec3(omega.x + twist_rate(spec, phi_i) * omega_hat_d[2], omega.y, omega.z)
    return Reference(x_d, omega.cross(lever))


def control(x_i, v_i, ref: Reference, gains: Gains) -> Vec3:
    kx, kv = gains.k_x, gains.k_v
    xd, vd = ref
    return Vec3(
        kx * (xd[0] - x_i[0]) + kv * (vd[0] - v_i[0]),
        kx * (xd[1] - x_i[1]) + kv * (vd[1] - v_i[1]),
        kx * (xd[2] - x_i[2]) + kv * (vd[2] - v_i[2]),
    )


def validate_gains(gains: Gains | None = None, *, k_x: float | None = None, k_v: float | None = None) -> StabilityReport:
    """Closed-loop eigenvalues of the double integrator under PD feedback.

    Either pass a :class:`Gains` or the two loop gains as keywords.
    """
    if gains is not None:
        k_x, k_v = gains.k_x, gains.k_v
    if k_x is None or k_v is None:
        raise GainsError("validate_gains needs k_x and k_v")
    disc = k_v * k_v - 4.0 * k_x
    root = cmath.sqrt(disc) / 2.0
    lam = (-k_v / 2.0 - root, -k_v / 2.0 + root)
    if disc >= 0:
        lam = (complex(lam[0].real, 0.0), complex(lam[1].real, 0.0))
    stable = k_x > 0 and k_v > 0
    oscillatory = disc < 0
    return StabilityReport(lam, stable, oscillatory, k_x > 0 and disc > 0)
