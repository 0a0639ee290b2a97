"""Tick-synchronous swarm driver and run-directory output."""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from .config import ScenarioConfig
from .controller import (
    angular_consensus,
    control,
    curve_reference,
    embedded_reference,
)
from .embedding import TWO_PI, CurveSpec, DegeneratePointError, circle_point, twist, untwist
from .metrics import COLUMNS, RunSummary, TrajectoryLog, summarize
from .network import AngleExchange, AngleMessage, RingTopology, assign_ring
from .plant import AgentState, Disturbance, clamp_norm, step
from .quaternion import Vec3

logger = logging.getLogger(__name__)


def _fmt(v) -> str:
    if isinstance(v, int):
        return str(v)
    return format(v, ".17g")


def initial_states(config: ScenarioConfig, spec: CurveSpec) -> list[AgentState]:
    """Starting positions per the placement mode; every agent starts at rest."""
    n, r = config.n_agents, config.r_d
    if config.placement == "explicit":
        return [AgentState(i, Vec3(*p)) for i, p in enumerate(config.positions)]
    rng = random.Random(config.placement_seed)
    states = []
    for i in range(n):
        if config.placement == "uniform_perturbed":
            phi = TWO_PI * i / n + rng.uniform(-config.perturbation, config.perturbation)
            radius = r
        else:
            phi = rng.uniform(0.0, TWO_PI)
            radius = r * rng.uniform(*config.annulus)
        states.append(AgentState(i, twist(spec, circle_point(radius, phi), phi)))
    return states


@dataclass
class SimulationResult:
    config: ScenarioConfig
    rows: list[list]
    events: list[dict]
    final_states: list[AgentState]
    initial_ring: RingTopology
    summary: RunSummary | None = None
    _log: TrajectoryLog | None = field(default=None, repr=False)

    @property
    def log(self) -> TrajectoryLog:
        if self._log is None:
            self._log = TrajectoryLog.from_rows(self.rows)
        return self._log

    @property
    def all_failed(self) -> bool:
        return all(s.failed for s in self.final_states)

    def csv_text(self) -> str:
        lines = [",".join(COLUMNS)]
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def events_text(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)

    def summary_text(self) -> str:
        return json.dumps(self.summary.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.yaml").write_text(self.config.dump())
        (out / "trajectory.csv").write_text(self.csv_text())
        (out / "events.jsonl").write_text(self.events_text())
        (out / "summary.json").write_text(self.summary_text())
        return out


class Simulation:
    """Runs one scenario.

    The per-tick pipeline is: estimate each agent's phase, exchange angles
    over the ring, compute the consensus rate, build the curve reference,
    apply the feedback law, step the plant.
    """

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.spec = CurveSpec(config.family, config.r_d)
        self.gains = config.gains
        self.states = initial_states(config, self.spec)
        self.channel = AngleExchange(config.channel)
        self.disturbance = Disturbance(config.disturbance)
        self.events: list[dict] = []
        self.ring = assign_ring(self.spec, self.states)
        self.initial_ring = self.ring
        self.tick = 0
        for a in self.ring.order:
            self.events.append({"type": "join", "tick": 0, "agent": a})
        self._pending_failures = sorted(config.failures, key=lambda f: (f.t, f.agent))

    def fail_agent(self, agent: int, reason: str) -> None:
        s = self.states[agent]
        if s.failed:
            return
        self.states[agent] = replace(s, failed=True)
        self.events.append({"type": "fail", "tick": self.tick, "agent": agent, "reason": reason})
        logger.info("tick %d: agent %d failed (%s)", self.tick, agent, reason)

    def _apply_scheduled_failures(self, t: float) -> None:
        dt = self.config.dt
        while self._pending_failures and self._pending_failures[0].t <= t + 0.5 * dt:
            f = self._pending_failures.pop(0)
            self.fail_agent(f.agent, "scheduled")

    def step_once(self, rows: list | None = None) -> None:
        cfg, spec, gains = self.config, self.spec, self.gains
        t = self.tick * cfg.dt
        self._apply_scheduled_failures(t)

        phases = {}
        for s in self.states:
            if s.failed:
                continue
            try:
                phases[s.id] = untwist(spec, s.x).phi
            except DegeneratePointError:
                self.fail_agent(s.id, "degenerate position at origin")
        if not phases:
            return

        if cfg.resort_ring:
            ring = RingTopology(tuple(a for _, a in sorted((p, a) for a, p in phases.items())))
            if ring.order != self.ring.live(phases).order:
                self.events.append({"type": "resort", "tick": self.tick, "order": list(ring.order)})
            self.ring = ring

        messages = [AngleMessage(a, phases[a], self.tick) for a in sorted(phases)]
        n_events = len(self.channel.events)
        nbrs = self.channel.exchange(self.ring, messages)
        self.events.extend(self.channel.events[n_events:])

        z_off = cfg.altitude_offset
        for a in sorted(phases):
            s = self.states[a]
            phi = phases[a]
            phi_dot = angular_consensus(phi, nbrs[a], gains, cfg.sign_mode, cfg.gap_mode)
            x_hat_d, omega_hat_d = embedded_reference(phi, phi_dot, gains)
            ref = curve_reference(spec, phi, x_hat_d, omega_hat_d, s.x, cfg.velocity_mode)
            u = clamp_norm(control(s.x, s.v, ref, gains), cfg.u_max)
            w = self.disturbance.draw()
            new = step(s, u, cfg.dt, w)
            if new.failed:
                self.fail_agent(a, "non-finite command")
                continue
            self.states[a] = new
            if rows is not None:
                x, v, xd = s.x, s.v, ref.x_d
                rows.append([
                    t, a,
                    x[0], x[1], x[2] + z_off,
                    v[0], v[1], v[2],
                    xd[0], xd[1], xd[2] + z_off,
                    phi, phi_dot,
                    u[0], u[1], u[2],
                ])
        self.tick += 1

    def run(self, window=None) -> SimulationResult:
        rows: list[list] = []
        for _ in range(self.config.n_steps):
            self.step_once(rows)
        result = SimulationResult(
            config=self.config,
            rows=rows,
            events=list(self.events),
            final_states=list(self.states),
            initial_ring=self.initial_ring,
        )
        if rows:
            result.summary = summarize(
                result.log,
                self.spec,
                window=window,
                tol=self.config.convergence_tol,
                order=self.initial_ring.order,
                z_offset=self.config.altitude_offset,
            )
        return result


def run(config: ScenarioConfig, out_dir=None, window=None) -> SimulationResult:
    result = Simulation(config).run(window=window)
    if out_dir is not None:
        result.write(out_dir)
    return result
