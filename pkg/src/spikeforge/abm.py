"""Heterogeneous agent backend.

Every neuron is an agent whose spiking rule is looked up by its behavior tag.
Synaptic and axonal delays are carried natively by shift registers, so no
delay lowering is needed. Each step runs in two synchronous phases:

1. neuron step: every agent folds in the input delivered for this step,
   applies its behavior, handles refractoriness and pushes spikes into its
   axon register or straight into its outgoing synapse registers;
2. synapse step: every register shifts by one and whatever falls off the end
   is added to the post-neuron's input for the next neuron step.

No agent ever sees another agent's spike from the same step, so the result
does not depend on the order agents are visited in. Agents that share a
behavior are updated together as one array batch.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mat import SimulationTimeout, apply_leak
from .model import (
    NetworkDef,
    RunResult,
    SimulationConfig,
    SpikeRaster,
    StimulusSchedule,
    check_network,
)

__all__ = [
    "AgentBatch",
    "AgentStream",
    "BehaviorRegistry",
    "DEFAULT_REGISTRY",
    "World",
    "abm_run",
    "abm_step",
    "lif",
    "register_behavior",
    "StochasticLIF",
]


def _mix64(x: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser; uint64 arithmetic wraps
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


class AgentStream:
    """Counter-based uniforms keyed on (seed, agent id, step, draw number).

    Each agent gets its own stream; nothing depends on batch composition or
    on how many draws other agents made.
    """

    def __init__(self, seed: int, ids: np.ndarray, step: int):
        self._seed = np.uint64(seed)
        self._ids = np.asarray(ids, dtype=np.uint64)
        self._step = np.uint64(step)
        self._draw = 0

    def uniform(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            key = _mix64(self._seed ^ np.uint64(0x9E3779B97F4A7C15))
            h = _mix64(key ^ _mix64(self._ids + np.uint64(0x632BE59BD9B4E019)))
            h = _mix64(h ^ _mix64(self._step * np.uint64(0xD1B54A32D192ED03) + np.uint64(self._draw)))
        self._draw += 1
        return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass
class AgentBatch:
    """Per-step view of the agents sharing one behavior.

    ``synaptic`` is what the synapse step delivered for this step and
    ``external`` the stimulus; the behavior applies the leak itself.
    """

    ids: np.ndarray
    membrane: np.ndarray
    synaptic: np.ndarray
    external: np.ndarray
    threshold: np.ndarray
    leak: np.ndarray
    reset: np.ndarray
    stream: AgentStream


# (batch) -> (new membrane, fired); refractoriness and reset are handled by the world
SpikingBehavior = Callable[[AgentBatch], "tuple[np.ndarray, np.ndarray]"]


def lif(batch: AgentBatch):
    u = apply_leak(batch.membrane, batch.leak, batch.reset)
    u += batch.synaptic
    u += batch.external
    return u, u > batch.threshold


@dataclass(frozen=True)
class StochasticLIF:
    """LIF that, once above threshold, fires only with probability ``p``."""

    p: float = 0.5

    def __call__(self, batch: AgentBatch):
        u, fired = lif(batch)
        return u, fired & (batch.stream.uniform() < self.p)


class BehaviorRegistry:
    def __init__(self, behaviors: dict[str, SpikingBehavior] | None = None):
        self._behaviors: dict[str, SpikingBehavior] = dict(behaviors or {})

    def register(self, name: str, behavior: SpikingBehavior) -> "BehaviorRegistry":
        if name in self._behaviors:
            raise ValueError(f"behavior {name!r} is already registered")
        if not callable(behavior):
            raise TypeError("behavior must be callable")
        self._behaviors[name] = behavior
        return self

    def get(self, name: str) -> SpikingBehavior:
        try:
            return self._behaviors[name]
        except KeyError:
            raise KeyError(f"unknown behavior {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._behaviors

    def names(self) -> list[str]:
        return sorted(self._behaviors)

    def copy(self) -> "BehaviorRegistry":
        return BehaviorRegistry(self._behaviors)


DEFAULT_REGISTRY = BehaviorRegistry({"lif": lif})


def register_behavior(name: str, behavior: SpikingBehavior,
                      registry: BehaviorRegistry | None = None) -> BehaviorRegistry:
    registry = DEFAULT_REGISTRY if registry is None else registry
    return registry.register(name, behavior)


@dataclass
class _Registers:
    """Ring buffer of in-flight spikes for a set of same-length registers.

    Slot ``t % length`` is written at step ``t``; the slot read at the end of
    step ``t`` is ``(t + 1) % length``, i.e. what was written ``length - 1``
    steps earlier, so a push at ``t`` pops at ``t + length - 1``.
    """

    length: int
    ring: np.ndarray  # (length, count) bool

    def push(self, t: int, values: np.ndarray) -> None:
        self.ring[t % self.length] = values

    def pop(self, t: int) -> np.ndarray:
        slot = self.ring[(t + 1) % self.length]
        out = slot.copy()
        slot[:] = False
        return out

    def shift_out(self, t: int) -> np.ndarray:
        # axon variant: read what entered `length` steps ago, then overwrite with the new value
        return self.ring[t % self.length].copy()

    @property
    def occupancy(self) -> int:
        return int(self.ring.sum())


@dataclass
class _ChannelGroup:
    pre: np.ndarray
    post: np.ndarray
    weight: np.ndarray
    registers: _Registers


@dataclass
class _AxonGroup:
    ids: np.ndarray
    registers: _Registers


@dataclass(eq=False)
class World:
    """All agents, synapse channels and registers of one run."""

    net: NetworkDef
    cfg: SimulationConfig
    stim: StimulusSchedule = field(default_factory=StimulusSchedule)
    registry: BehaviorRegistry | None = None

    def __post_init__(self):
        net = self.net
        check_network(net)
        registry = DEFAULT_REGISTRY if self.registry is None else self.registry
        n = net.neuron_count
        self.t = 0
        self.membrane = net.reset.copy()
        self.refractory_counter = np.zeros(n, dtype=np.int64)
        self.pending_input = np.zeros(n)
        self._ext = np.zeros(n)
        self._ext_by_step = self.stim.per_step(n, self.cfg.steps)

        self.groups: list[tuple[str, SpikingBehavior, np.ndarray]] = []
        tags = np.array(net.behavior, dtype=object)
        for name in sorted(set(net.behavior)):
            if name not in registry:
                raise KeyError(f"unknown behavior {name!r}; register it first")
            self.groups.append((name, registry.get(name), np.flatnonzero(tags == name)))

        self.axons: list[_AxonGroup] = []
        for a in np.unique(net.axonal_delay[net.axonal_delay > 0]):
            ids = np.flatnonzero(net.axonal_delay == a)
            self.axons.append(_AxonGroup(ids, _Registers(int(a), np.zeros((a, ids.size), bool))))

        self.channels: list[_ChannelGroup] = []
        for d in np.unique(net.delay):
            sel = np.flatnonzero(net.delay == d)
            self.channels.append(_ChannelGroup(
                pre=net.pre[sel],
                post=net.post[sel],
                weight=net.weight[sel],
                registers=_Registers(int(d), np.zeros((d, sel.size), bool)),
            ))

    @property
    def neuron_count(self) -> int:
        return self.net.neuron_count

    def register_occupancy(self) -> int:
        return sum(c.registers.occupancy for c in self.channels)

    def neuron_step(self) -> np.ndarray:
        """Phase 1. Returns the boolean vector of agents that fired this step."""
        net, t = self.net, self.t
        ext = self._ext_by_step.get(t, self._ext)
        u = np.empty_like(self.membrane)
        fired = np.zeros(self.neuron_count, dtype=bool)
        for _, behavior, ids in self.groups:
            batch = AgentBatch(
                ids=ids,
                membrane=self.membrane[ids],
                synaptic=self.pending_input[ids],
                external=ext[ids],
                threshold=net.threshold[ids],
                leak=net.leak[ids],
                reset=net.reset[ids],
                stream=AgentStream(self.cfg.seed, ids, t),
            )
            u[ids], fired[ids] = behavior(batch)
        self.pending_input[:] = 0.0

        held = self.refractory_counter > 0
        if held.any():
            fired &= ~held
            self.refractory_counter[held] -= 1
            u[held] = net.reset[held]
        self.membrane = np.where(fired, net.reset, u)
        self.refractory_counter[fired] = net.refractory[fired]

        emitted = fired.copy()
        for axon in self.axons:
            emitted[axon.ids] = axon.registers.shift_out(t)
            axon.registers.push(t, fired[axon.ids])
        for ch in self.channels:
            ch.registers.push(t, emitted[ch.pre])
        return fired

    def synapse_step(self) -> None:
        """Phase 2: pop register tails into the post-neurons' next-step input."""
        for ch in self.channels:
            arrived = np.flatnonzero(ch.registers.pop(self.t))
            if arrived.size:
                self.pending_input += np.bincount(
                    ch.post[arrived], weights=ch.weight[arrived], minlength=self.neuron_count
                )


def abm_step(world: World) -> np.ndarray:
    """Run both phases of one step; returns the ids that spiked."""
    fired = world.neuron_step()
    world.synapse_step()
    world.t += 1
    return np.flatnonzero(fired)


def abm_run(
    net: NetworkDef,
    cfg: SimulationConfig,
    stim: StimulusSchedule | None = None,
    *,
    registry: BehaviorRegistry | None = None,
    timeout: float | None = None,
) -> RunResult:
    world = World(net, cfg, stim or StimulusSchedule(), registry)
    return run_world(world, timeout=timeout)


def run_world(world: World, timeout: float | None = None) -> RunResult:
    steps = world.cfg.steps
    fired: list[np.ndarray] = []
    trace = np.empty((steps, world.neuron_count)) if world.cfg.record_membrane else None
    start = time.perf_counter()
    for t in range(steps):
        fired.append(abm_step(world))
        if trace is not None:
            trace[t] = world.membrane
        if timeout is not None and time.perf_counter() - start > timeout:
            raise SimulationTimeout(time.perf_counter() - start, t)
    elapsed = time.perf_counter() - start
    counts = np.fromiter((f.size for f in fired), dtype=np.int64, count=steps)
    raster = SpikeRaster(np.repeat(np.arange(steps), counts),
                         np.concatenate(fired), world.neuron_count, steps)
    return RunResult(raster=raster, elapsed=elapsed, membrane=trace)
