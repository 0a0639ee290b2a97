"""Ring topology and the angle-only message channel between agents.

An agent's controller is fed exclusively through :meth:`AngleExchange.exchange`,
which hands each agent the angles of its lagging and leading ring
neighbours and nothing else.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .controller import NeighborAngles, estimate_phase
from .embedding import CurveSpec

logger = logging.getLogger(__name__)


class TopologyError(ValueError):
    pass


class AngleMessage(NamedTuple):
    sender: int
    phi: float
    tick: int


@dataclass(frozen=True)
class ChannelConfig:
    delay_ticks: int = 0
    drop_probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.delay_ticks) != self.delay_ticks or self.delay_ticks < 0:
            raise ValueError(f"delay_ticks must be a non-negative integer, got {self.delay_ticks}")
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError(f"drop_probability must lie in [0, 1], got {self.drop_probability}")


@dataclass(frozen=True)
class RingTopology:
    """Cyclic agent order; the lead of ``order[k]`` is ``order[k + 1]``."""

    order: tuple[int, ...]

    def __post_init__(self):
        if len(self.order) == 0:
            raise TopologyError("empty ring")
        if len(set(self.order)) != len(self.order):
            raise TopologyError(f"ring order repeats an agent: {self.order}")

    def __len__(self) -> int:
        return len(self.order)

    def neighbors(self, agent: int, alive: Iterable[int] | None = None) -> tuple[int, int]:
        """``(lag, lead)`` of ``agent``, skipping anyone not in ``alive``."""
        order = self.order if alive is None else self.live(alive).order
        k = order.index(agent)
        n = len(order)
        return order[(k - 1) % n], order[(k + 1) % n]

    def live(self, alive: Iterable[int]) -> "RingTopology":
        alive = set(alive)
        return RingTopology(tuple(a for a in self.order if a in alive))

    def edges(self) -> set[tuple[int, int]]:
        """Directed information edges ``(sender, receiver)`` of the ring."""
        out = set()
        for a in self.order:
            lag, lead = self.neighbors(a)
            out.add((lag, a))
            out.add((lead, a))
        return out


def assign_ring(spec: CurveSpec, states: Sequence) -> RingTopology:
    """Order agents by embedding angle, ties broken by id."""
    if len(states) == 0:
        raise TopologyError("need at least one agent")
    keyed = sorted((estimate_phase(spec, s.x), s.id) for s in states)
    return RingTopology(tuple(agent for _, agent in keyed))


class AngleExchange:
    """Delivers neighbour angles through a delayed, lossy channel.

    Messages sent at tick ``t`` arrive at ``t + delay_ticks``. A dropped
    message leaves the receiver holding the last value delivered on that
    link. The first delivery on a link is never dropped and, before the
    delayed message exists, falls back to the oldest message on record.
    """

    def __init__(self, config: ChannelConfig | None = None):
        self.config = config or ChannelConfig()
        self._rng = np.random.Generator(np.random.PCG64(self.config.seed))
        self._history: dict[int, deque[AngleMessage]] = {}
        self._held: dict[tuple[int, int], float] = {}
        self._links: dict[int, tuple[int, int]] = {}
        self.events: list[dict] = []
        self.last_edges: set[tuple[int, int]] = set()

    def _record(self, msg: AngleMessage) -> None:
        q = self._history.setdefault(msg.sender, deque(maxlen=self.config.delay_ticks + 1))
        if q and msg.tick <= q[-1].tick:
            raise TopologyError(f"non-monotone tick from agent {msg.sender}: {msg.tick} after {q[-1].tick}")
        q.append(msg)

    def _deliverable(self, sender: int, tick: int) -> AngleMessage | None:
        q = self._history.get(sender)
        if not q:
            return None
        want = tick - self.config.delay_ticks
        for msg in q:
            if msg.tick == want:
                return msg
        return None

    def _receive(self, receiver: int, sender: int, tick: int) -> float:
        link = (receiver, sender)
        msg = self._deliverable(sender, tick)
        if link not in self._held:
            if msg is None:
                msg = self._history[sender][0]
            self._held[link] = msg.phi
            return msg.phi
        p = self.config.drop_probability
        dropped = p > 0.0 and self._rng.random() < p
        if msg is not None and not dropped:
            self._held[link] = msg.phi
        return self._held[link]

    def exchange(self, topology: RingTopology, messages: Sequence[AngleMessage]) -> dict[int, NeighborAngles]:
        """One synchronous tick: take every live agent's angle, hand out neighbour angles.

        Agents without a message this tick are treated as failed and routed
        around; each rerouting is appended to :attr:`events`.
        """
        if not messages:
            return {}
        tick = messages[0].tick
        current = {}
        for msg in messages:
            if msg.tick != tick:
                raise TopologyError("messages from different ticks in one exchange")
            self._record(msg)
            current[msg.sender] = msg.phi
        ring = topology.live(current)
        out: dict[int, NeighborAngles] = {}
        edges = set()
        for agent in ring.order:
            lag, lead = ring.neighbors(agent)
            prev = self._links.get(agent)
            if prev is not None and prev != (lag, lead):
                self.events.append({"type": "heal", "tick": tick, "agent": agent, "lag": lag, "lead": lead})
                logger.info("tick %d: agent %d relinked to lag=%d lead=%d", tick, agent, lag, lead)
            self._links[agent] = (lag, lead)
            angles = []
            for sender in (lag, lead):
                if sender == agent:
                    angles.append(current[agent])
                else:
                    angles.append(self._receive(agent, sender, tick))
                    edges.add((sender, agent))
            out[agent] = NeighborAngles(angles[0], angles[1])
        self.last_edges = edges
        return out
