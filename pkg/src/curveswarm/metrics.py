"""Post-run evaluation: ring gaps, convergence time, tracking RMSE."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding import TWO_PI, CurveSpec, wrap_2pi
from .controller import estimate_phase
from .network import RingTopology

COLUMNS = (
    "t", "agent_id",
    "x", "y", "z",
    "vx", "vy", "vz",
    "xd", "yd", "zd",
    "phi", "phidot_cmd",
    "ux", "uy", "uz",
)

DEFAULT_TOL = 0.05


class LogParseError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


class TrajectoryLog:
    """Column store of a trajectory CSV, one row per live agent per tick."""

    def __init__(self, columns: dict[str, np.ndarray]):
        missing = [c for c in COLUMNS if c not in columns]
        if missing:
            raise ValueError(f"log is missing columns {missing}")
        self.columns = {c: np.asarray(columns[c], dtype=float) for c in COLUMNS}
        self.columns["agent_id"] = self.columns["agent_id"].astype(int)

    def __len__(self) -> int:
        return len(self.columns["t"])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def agents(self) -> list[int]:
        return sorted(set(self.columns["agent_id"].tolist()))

    def position(self) -> np.ndarray:
        return np.column_stack([self["x"], self["y"], self["z"]])

    def reference(self) -> np.ndarray:
        return np.column_stack([self["xd"], self["yd"], self["zd"]])

    def ticks(self) -> tuple[np.ndarray, list[np.ndarray]]:
        """Distinct times and, for each, the row indices logged at that time."""
        t = self["t"]
        times = np.unique(t)
        order = np.argsort(t, kind="stable")
        bounds = np.searchsorted(t[order], times)
        groups = np.split(order, bounds[1:])
        return times, groups

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "TrajectoryLog":
        arr = np.asarray(rows, dtype=float).reshape(-1, len(COLUMNS))
        return cls({c: arr[:, k] for k, c in enumerate(COLUMNS)})

    @classmethod
    def from_csv(cls, path) -> "TrajectoryLog":
        path = Path(path)
        rows = []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise LogParseError(path, 1, "empty file") from None
            if tuple(header) != COLUMNS:
                raise LogParseError(path, 1, f"unexpected header {header}")
            for row in reader:
                line = reader.line_num
                if len(row) != len(COLUMNS):
                    raise LogParseError(path, line, f"expected {len(COLUMNS)} fields, got {len(row)}")
                try:
                    values = [float(v) for v in row]
                except ValueError as exc:
                    raise LogParseError(path, line, str(exc)) from None
                if not all(math.isfinite(v) for v in values):
                    raise LogParseError(path, line, "non-finite value")
                rows.append(values)
        if not rows:
            raise LogParseError(path, 2, "no data rows")
        return cls.from_rows(rows)


def separations(spec: CurveSpec, states: Sequence, topology: RingTopology) -> list[float]:
    """Wrapped gap from each live agent to its lead, in ring order."""
    live = [s for s in states if not getattr(s, "failed", False)]
    phases = {s.id: estimate_phase(spec, s.x) for s in live}
    return gaps_from_phases(phases, topology)


def gaps_from_phases(phases: dict[int, float], topology: RingTopology) -> list[float]:
    ring = topology.live(phases)
    order = ring.order
    if len(order) < 2:
        raise ValueError("need at least two live agents for separations")
    out = []
    for k, a in enumerate(order):
        gap = wrap_2pi(phases[order[(k + 1) % len(order)]] - phases[a])
        out.append(gap)
    return out


def convergence_time(times, gap_series, target, tol: float = DEFAULT_TOL) -> float | None:
    """Earliest time after which every gap stays within ``tol`` of ``target``.

    ``gap_series`` is indexed by time first; ``target`` may be a scalar or
    one value per time sample. Returns ``None`` if the last sample is still
    outside the band.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise ValueError("empty series")
    dev = np.abs(np.asarray(gap_series, dtype=float).reshape(len(times), -1)
                 - np.asarray(target, dtype=float).reshape(-1, 1))
    outside = np.flatnonzero(np.any(dev > tol, axis=1))
    if outside.size == 0:
        return float(times[0])
    last = outside[-1]
    if last == len(times) - 1:
        return None
    return float(times[last + 1])


def _window_mask(log: TrajectoryLog, window) -> np.ndarray:
    t = log["t"]
    t0, t1 = window if window is not None else (t.min(), t.max())
    if t0 is None:
        t0 = t.min()
    if t1 is None:
        t1 = t.max()
    mask = (t >= t0) & (t <= t1)
    if not mask.any():
        raise ValueError(f"window [{t0}, {t1}] contains no samples")
    return mask


def _per_agent_rms(log: TrajectoryLog, err: np.ndarray, mask: np.ndarray) -> dict[int, tuple[float, float, float]]:
    ids = log["agent_id"]
    out = {}
    for a in log.agents:
        sel = mask & (ids == a)
        if sel.any():
            out[a] = tuple(float(v) for v in np.sqrt(np.mean(err[sel] ** 2, axis=0)))
    return out


def rmse(log: TrajectoryLog, window=None) -> dict[int, tuple[float, float, float]]:
    """Per-agent, per-axis RMS of actual minus logged reference position."""
    mask = _window_mask(log, window)
    return _per_agent_rms(log, log.position() - log.reference(), mask)


def ring_order(log: TrajectoryLog) -> tuple[int, ...]:
    """Ring order implied by the first logged tick (angles ascending, ties by id)."""
    t = log["t"]
    first = t == t.min()
    pairs = sorted(zip(log["phi"][first].tolist(), log["agent_id"][first].tolist()))
    return tuple(a for _, a in pairs)


def gap_table(log: TrajectoryLog, order: Sequence[int] | None = None):
    """Per tick: time, wrapped gaps in ring order, and the uniform target ``2pi/n``."""
    ring = RingTopology(tuple(order) if order is not None else ring_order(log))
    times, groups = log.ticks()
    ids, phi = log["agent_id"], log["phi"]
    gaps, targets = [], []
    for idx in groups:
        phases = dict(zip(ids[idx].tolist(), phi[idx].tolist()))
        g = gaps_from_phases(phases, ring) if len(phases) >= 2 else [TWO_PI]
        gaps.append(g)
        targets.append(TWO_PI / len(g))
    return times, gaps, np.array(targets)


def max_gap_deviation(gaps, targets) -> np.ndarray:
    return np.array([np.max(np.abs(np.asarray(g) - tgt)) for g, tgt in zip(gaps, targets)])


def manifold_rmse(
    log: TrajectoryLog,
    spec: CurveSpec,
    window=None,
    order: Sequence[int] | None = None,
    z_offset: float = 0.0,
) -> dict[int, tuple[float, float, float]]:
    """RMS error against the ideal uniformly spaced formation on the curve.

    At each tick the live agents' slots ``2 pi k / n`` are aligned to the
    circular mean of their measured angles; each agent's ideal position is
    the curve point at its slot, at the curve's own radius.
    """
    mask = _window_mask(log, window)
    ring = RingTopology(tuple(order) if order is not None else ring_order(log))
    times, groups = log.ticks()
    ids, phi = log["agent_id"], log["phi"]
    ideal_phi = np.empty(len(log))
    for idx in groups:
        present = set(ids[idx].tolist())
        live = [a for a in ring.order if a in present]
        n = len(live)
        row_of = dict(zip(ids[idx].tolist(), idx.tolist()))
        slots = TWO_PI * np.arange(n) / n
        measured = np.array([phi[row_of[a]] for a in live])
        offset = math.atan2(np.mean(np.sin(measured - slots)), np.mean(np.cos(measured - slots)))
        for a, slot in zip(live, slots):
            ideal_phi[row_of[a]] = slot + offset
    r = spec.radius
    g = np.array([spec.g(p) for p in ideal_phi])
    s = np.sin(ideal_phi)
    ideal = np.column_stack([
        r * np.cos(ideal_phi),
        r * s * g,
        r * s * np.sqrt(np.clip(1.0 - g * g, 0.0, None)) + z_offset,
    ])
    return _per_agent_rms(log, log.position() - ideal, mask)


@dataclass
class RunSummary:
    window: tuple[float, float]
    rmse_reference: dict[int, tuple[float, float, float]]
    rmse_manifold: dict[int, tuple[float, float, float]] | None
    convergence_time: float | None
    tol: float
    target_gap: float
    final_mean_gap_deviation: float
    final_max_gap_deviation: float
    mean_speed: float
    n_agents_final: int
    duration: float

    @property
    def converged(self) -> bool:
        return self.convergence_time is not None

    def to_dict(self) -> dict:
        def per_agent(d):
            if d is None:
                return None
            return {str(a): {"x": v[0], "y": v[1], "z": v[2]} for a, v in sorted(d.items())}

        return {
            "window": list(self.window),
            "duration": self.duration,
            "n_agents_final": self.n_agents_final,
            "rmse_reference": per_agent(self.rmse_reference),
            "rmse_manifold": per_agent(self.rmse_manifold),
            "separation": {
                "target_gap": self.target_gap,
                "tol": self.tol,
                "converged": self.converged,
                "convergence_time": self.convergence_time,
                "final_mean_gap_deviation": self.final_mean_gap_deviation,
                "final_max_gap_deviation": self.final_max_gap_deviation,
            },
            "mean_speed": self.mean_speed,
        }


def summarize(
    log: TrajectoryLog,
    spec: CurveSpec | None = None,
    window=None,
    tol: float = DEFAULT_TOL,
    order: Sequence[int] | None = None,
    z_offset: float = 0.0,
) -> RunSummary:
    mask = _window_mask(log, window)
    t = log["t"]
    win = (float(t[mask].min()), float(t[mask].max()))
    times, gaps, targets = gap_table(log, order)
    dev = max_gap_deviation(gaps, targets)
    conv = convergence_time(times, dev, 0.0, tol)
    last = np.abs(np.asarray(gaps[-1]) - targets[-1])
    speed = np.sqrt(log["vx"] ** 2 + log["vy"] ** 2 + log["vz"] ** 2)
    return RunSummary(
        window=win,
        rmse_reference=rmse(log, window),
        rmse_manifold=None if spec is None else manifold_rmse(log, spec, window, order, z_offset),
        convergence_time=conv,
        tol=tol,
        target_gap=float(targets[-1]),
        final_mean_gap_deviation=float(np.mean(last)),
        final_max_gap_deviation=float(np.max(last)),
        mean_speed=float(np.mean(speed[mask])),
        n_agents_final=int(np.count_nonzero(t == times[-1])),
        duration=float(times[-1] - times[0]),
    )
