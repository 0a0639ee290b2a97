"""Scenario configuration: a strict YAML schema with resolved defaults."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .controller import GapMode, Gains, GainsError, SignMode, VelocityMode, validate_gains
from .embedding import ORIGIN_EPS, CurveFamily
from .network import ChannelConfig
from .plant import DisturbanceConfig

PLACEMENTS = ("uniform_perturbed", "random_annulus", "explicit")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FailureEvent:
    agent: int
    t: float


@dataclass(frozen=True)
class ScenarioConfig:
    family: CurveFamily = CurveFamily.DUMBBELL
    r_d: float = 1.5
    n_agents: int = 10
    placement: str = "uniform_perturbed"
    placement_seed: int = 0
    perturbation: float = 0.3
    annulus: tuple[float, float] = (0.5, 1.5)
    positions: tuple[tuple[float, float, float], ...] = ()
    k_x: float = 100.0
    k_v: float = 21.0
    k_phi: float = 2.0
    phi_dot_d: float = 0.2
    sign_mode: SignMode = SignMode.NEGATED
    gap_mode: GapMode = GapMode.RING
    velocity_mode: VelocityMode = VelocityMode.TWIST_RATE
    u_max: float | None = None
    dt: float = 0.01
    duration: float = 40.0
    resort_ring: bool = False
    failures: tuple[FailureEvent, ...] = ()
    disturbance: DisturbanceConfig = field(default_factory=DisturbanceConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    altitude_offset: float = 0.0
    convergence_tol: float = 0.05

    @property
    def gains(self) -> Gains:
        return Gains(self.k_x, self.k_v, self.k_phi, self.r_d, self.phi_dot_d)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def validate(self, force: bool = False) -> None:
        if self.n_agents < 1:
            raise ConfigError("need at least one agent")
        if self.placement not in PLACEMENTS:
            raise ConfigError(f"unknown placement {self.placement!r}; expected one of {PLACEMENTS}")
        if self.placement == "explicit" and len(self.positions) != self.n_agents:
            raise ConfigError(f"explicit placement lists {len(self.positions)} positions for {self.n_agents} agents")
        for p in self.positions:
            if not all(math.isfinite(c) for c in p):
                raise ConfigError(f"explicit position {p} is not finite")
            if math.sqrt(sum(c * c for c in p)) < ORIGIN_EPS:
                raise ConfigError(f"explicit position {p} is at the origin, where the angle is undefined")
        if len(self.annulus) != 2:
            raise ConfigError(f"annulus needs two radius factors, got {self.annulus}")
        lo, hi = self.annulus
        if not 0 < lo <= hi:
            raise ConfigError(f"annulus factors must satisfy 0 < lo <= hi, got {self.annulus}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ConfigError(f"duration must be positive, got {self.duration}")
        if self.u_max is not None and not self.u_max > 0:
            raise ConfigError(f"u_max must be positive when set, got {self.u_max}")
        if not self.convergence_tol > 0:
            raise ConfigError("convergence_tol must be positive")
        for f in self.failures:
            if not 0 <= f.agent < self.n_agents:
                raise ConfigError(f"failure refers to unknown agent {f.agent}")
        try:
            gains = self.gains
        except GainsError as exc:
            raise ConfigError(str(exc)) from None
        report = validate_gains(gains)
        if not report.paper_condition and not force:
            raise ConfigError(
                f"gains k_x={self.k_x}, k_v={self.k_v} violate k_x > 0 and k_v^2 > 4 k_x (use --force to override)"
            )

    def to_dict(self) -> dict:
        return {
            "curve": {"family": self.family.value, "r_d": self.r_d},
            "agents": {
                "count": self.n_agents,
                "placement": self.placement,
                "seed": self.placement_seed,
                "perturbation": self.perturbation,
                "annulus": list(self.annulus),
                "positions": [list(p) for p in self.positions],
            },
            "gains": {"k_x": self.k_x, "k_v": self.k_v, "k_phi": self.k_phi, "phi_dot_d": self.phi_dot_d},
            "control": {
                "sign_mode": self.sign_mode.value,
                "gap_mode": self.gap_mode.value,
                "velocity_mode": self.velocity_mode.value,
                "u_max": self.u_max,
            },
            "simulation": {
                "dt": self.dt,
                "duration": self.duration,
                "resort_ring": self.resort_ring,
                "failures": [{"agent": f.agent, "t": f.t} for f in self.failures],
            },
            "disturbance": {
                "enabled": self.disturbance.enabled,
                "sigma_a": self.disturbance.sigma_a,
                "seed": self.disturbance.seed,
            },
            "channel": {
                "delay_ticks": self.channel.delay_ticks,
                "drop_probability": self.channel.drop_probability,
                "seed": self.channel.seed,
            },
            "output": {"altitude_offset": self.altitude_offset, "convergence_tol": self.convergence_tol},
        }

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)


_SCHEMA = {
    "curve": {"family", "r_d"},
    "agents": {"count", "placement", "seed", "perturbation", "annulus", "positions"},
    "gains": {"k_x", "k_v", "k_phi", "phi_dot_d"},
    "control": {"sign_mode", "gap_mode", "velocity_mode", "u_max"},
    "simulation": {"dt", "duration", "resort_ring", "failures"},
    "disturbance": {"enabled", "sigma_a", "seed"},
    "channel": {"delay_ticks", "drop_probability", "seed"},
    "output": {"altitude_offset", "convergence_tol"},
}


def _check_keys(data: dict) -> None:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    for section, value in data.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        unknown = set(value) - _SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in {section!r}: {sorted(unknown)}")


def from_dict(data: dict | None, force: bool = False) -> ScenarioConfig:
    data = data or {}
    _check_keys(data)
    get = lambda section, key, default: data.get(section, {}).get(key, default)  # noqa: E731
    d = ScenarioConfig()
    try:
        positions = tuple(tuple(float(c) for c in p) for p in get("agents", "positions", []))
        if any(len(p) != 3 for p in positions):
            raise ConfigError("explicit positions must be [x, y, z] triples")
        placement = get("agents", "placement", d.placement)
        count = get("agents", "count", len(positions) if placement == "explicit" and positions else d.n_agents)
        failures = tuple(
            FailureEvent(int(f["agent"]), float(f["t"])) for f in get("simulation", "failures", [])
        )
        cfg = ScenarioConfig(
            family=CurveFamily(get("curve", "family", d.family.value)),
            r_d=float(get("curve", "r_d", d.r_d)),
            n_agents=int(count),
            placement=placement,
            placement_seed=int(get("agents", "seed", d.placement_seed)),
            perturbation=float(get("agents", "perturbation", d.perturbation)),
            annulus=tuple(float(v) for v in get("agents", "annulus", d.annulus)),
            positions=positions,
            k_x=float(get("gains", "k_x", d.k_x)),
            k_v=float(get("gains", "k_v", d.k_v)),
            k_phi=float(get("gains", "k_phi", d.k_phi)),
            phi_dot_d=float(get("gains", "phi_dot_d", d.phi_dot_d)),
            sign_mode=SignMode(get("control", "sign_mode", d.sign_mode.value)),
            gap_mode=GapMode(get("control", "gap_mode", d.gap_mode.value)),
            velocity_mode=VelocityMode(get("control", "velocity_mode", d.velocity_mode.value)),
            u_max=None if get("control", "u_max", None) is None else float(get("control", "u_max", None)),
            dt=float(get("simulation", "dt", d.dt)),
            duration=float(get("simulation", "duration", d.duration)),
            resort_ring=bool(get("simulation", "resort_ring", d.resort_ring)),
            failures=failures,
            disturbance=DisturbanceConfig(
                enabled=bool(get("disturbance", "enabled", False)),
                sigma_a=float(get("disturbance", "sigma_a", 0.0)),
                seed=int(get("disturbance", "seed", 0)),
            ),
            channel=ChannelConfig(
                delay_ticks=int(get("channel", "delay_ticks", 0)),
                drop_probability=float(get("channel", "drop_probability", 0.0)),
                seed=int(get("channel", "seed", 0)),
            ),
            altitude_offset=float(get("output", "altitude_offset", d.altitude_offset)),
            convergence_tol=float(get("output", "convergence_tol", d.convergence_tol)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from None
    cfg.validate(force=force)
    return cfg


def load(path, force: bool = False) -> ScenarioConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return from_dict(data, force=force)
