"""Decentralized swarm self-organization onto closed polar curves."""

from .quaternion import Quaternion, Vec3, conjugate, from_euler, hamilton, rotate
from .embedding import (
    CurveFamily,
    CurveSpec,
    EmbeddedPoint,
    circle_point,
    curve_point,
    rho,
    twist,
    untwist,
)
from .controller import (
    GapMode,
    Gains,
    NeighborAngles,
    Reference,
    SignMode,
    StabilityReport,
    VelocityMode,
    angular_consensus,
    control,
    curve_reference,
    embedded_reference,
    estimate_phase,
    validate_gains,
)
from .plant import AgentState, DisturbanceConfig, step
from .network import AngleExchange, AngleMessage, ChannelConfig, RingTopology, assign_ring
from .metrics import TrajectoryLog, convergence_time, rmse, separations
from .config import ScenarioConfig
from .simulation import Simulation, run

__version__ = "0.1.0"

__all__ = [
    "Quaternion",
    "Vec3",
    "conjugate",
    "from_euler",
    "hamilton",
    "rotate",
    "CurveFamily",
    "CurveSpec",
    "EmbeddedPoint",
    "circle_point",
    "curve_point",
    "rho",
    "twist",
    "untwist",
    "GapMode",
    "Gains",
    "NeighborAngles",
    "Reference",
    "SignMode",
    "StabilityReport",
    "VelocityMode",
    "angular_consensus",
    "control",
    "curve_reference",
    "embedded_reference",
    "estimate_phase",
    "validate_gains",
    "AgentState",
    "DisturbanceConfig",
    "step",
    "AngleExchange",
    "AngleMessage",
    "ChannelConfig",
    "RingTopology",
    "assign_ring",
    "TrajectoryLog",
    "convergence_time",
    "rmse",
    "separations",
    "ScenarioConfig",
    "Simulation",
    "run",
]
