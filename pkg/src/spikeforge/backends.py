"""One entry point over the three simulators."""

from __future__ import annotations

import logging

from .abm import DEFAULT_REGISTRY, BehaviorRegistry, World, run_world
from .lowering import lower_delays
from .mat import mat_init, run_loop
from .model import (
    DEFAULT_BEHAVIOR,
    NetworkDef,
    RunResult,
    SimulationConfig,
    SpikeRaster,
    StimulusSchedule,
)
from .oracle import oracle_run

log = logging.getLogger(__name__)

BACKENDS = ("mat", "abm", "oracle")


def needs_lowering(net: NetworkDef) -> bool:
    return bool((net.delay != 1).any() or (net.axonal_delay != 0).any())


def check_backend(net: NetworkDef, backend: str, cfg: SimulationConfig | None = None,
                  registry: BehaviorRegistry | None = None) -> None:
    """Raise ``ValueError`` if ``backend`` cannot simulate ``net`` as configured."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}")
    foreign = sorted({b for b in net.behavior if b != DEFAULT_BEHAVIOR})
    if backend in ("mat", "oracle") and foreign:
        raise ValueError(f"{backend} backend only runs 'lif' neurons; network uses {foreign}")
    if backend == "abm":
        reg = registry or DEFAULT_REGISTRY
        missing = [b for b in sorted(set(net.behavior)) if b not in reg]
        if missing:
            raise ValueError(f"unregistered behavior(s) {missing}")
    if cfg is not None and cfg.stdp is not None and backend != "mat":
        raise ValueError(f"{backend} backend has no built-in learning; STDP needs the mat backend")


def simulate(
    net: NetworkDef,
    cfg: SimulationConfig,
    stim: StimulusSchedule | None = None,
    backend: str = "mat",
    *,
    registry: BehaviorRegistry | None = None,
    timeout: float | None = None,
) -> RunResult:
    """Run ``net`` on ``backend``.

    The mat backend lowers synaptic and axonal delays first when needed and
    reports only the original neurons' spikes.
    """
    return prepare(net, cfg, stim or StimulusSchedule(), backend, registry)(timeout)


def prepare(net: NetworkDef, cfg: SimulationConfig, stim: StimulusSchedule, backend: str,
            registry: BehaviorRegistry | None = None):
    """Untimed setup for ``backend``; returns a zero-argument callable running the timed loop."""
    check_backend(net, backend, cfg, registry)
    if backend == "mat":
        original = net.neuron_count
        if needs_lowering(net):
            log.info("lowering delays: adding proxy neurons for the matrix backend")
            net = lower_delays(net).net
        state = mat_init(net, cfg)

        def go(timeout=None):
            result = run_loop(state, cfg.steps, stim, cfg.stdp, cfg.record_membrane, timeout)
            if net.neuron_count != original:
                r = result.raster.restrict(range(original))
                result.raster = SpikeRaster(r.steps, r.neurons, original, cfg.steps)
                if result.membrane is not None:
                    result.membrane = result.membrane[:, :original]
            return result

        return go
    if backend == "abm":
        world = World(net, cfg, stim, registry)
        return lambda timeout=None: run_world(world, timeout)
    # the oracle is not a timed contender; it ignores the budget
    return lambda timeout=None: oracle_run(net, cfg, stim)
