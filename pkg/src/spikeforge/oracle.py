"""Naive scalar event-queue simulator used as ground truth for the fast backends.

Nothing here is shared with the matrix or agent kernels; each neuron is
updated with plain Python floats and every spike schedules explicit
deliveries on a per-step queue.
"""

from __future__ import annotations

import time
from collections import defaultdict
from typing import NamedTuple

import numpy as np

from .model import (
    DEFAULT_BEHAVIOR,
    NetworkDef,
    RunResult,
    SimulationConfig,
    SpikeRaster,
    StimulusSchedule,
    check_network,
)


class PendingDelivery(NamedTuple):
    arrival: int
    post: int
    amount: float


def oracle_run(net: NetworkDef, cfg: SimulationConfig, stim: StimulusSchedule | None = None) -> RunResult:
    check_network(net)
    other = sorted({b for b in net.behavior if b != DEFAULT_BEHAVIOR})
    if other:
        raise ValueError(f"oracle only simulates 'lif' neurons; got {other}")
    stim = stim or StimulusSchedule()
    problems = stim.validate(net.neuron_count, cfg.steps)
    if problems:
        raise ValueError(f"invalid stimulus: {problems[0]}")

    n = net.neuron_count
    threshold = net.threshold.tolist()
    leak = net.leak.tolist()
    reset = net.reset.tolist()
    refractory = net.refractory.tolist()
    axonal = net.axonal_delay.tolist()

    outgoing = [[] for _ in range(n)]
    for pre, post, w, d in zip(net.pre.tolist(), net.post.tolist(), net.weight.tolist(),
                               net.delay.tolist()):
        outgoing[pre].append((post, w, d + axonal[pre]))

    external = defaultdict(list)
    for t, i, amp in stim.entries:
        external[t].append((i, amp))

    membrane = list(reset)
    counter = [0] * n
    queue: dict[int, list[PendingDelivery]] = defaultdict(list)
    events = []
    trace = [] if cfg.record_membrane else None

    start = time.perf_counter()
    for t in range(cfg.steps):
        synaptic = [0.0] * n
        for delivery in queue.pop(t, ()):
            synaptic[delivery.post] += delivery.amount
        ext = [0.0] * n
        for i, amp in external.get(t, ()):
            ext[i] += amp

        fired = []
        for i in range(n):
            v = membrane[i]
            r = reset[i]
            if v > r:
                v = max(v - leak[i], r)
            elif v < r:
                v = min(v + leak[i], r)
            v = v + synaptic[i]
            v = v + ext[i]
            spiked = v > threshold[i]
            if counter[i] > 0:
                spiked = False
                counter[i] -= 1
                v = r
            if spiked:
                membrane[i] = r
                counter[i] = refractory[i]
                fired.append(i)
            else:
                membrane[i] = v

        for i in fired:
            events.append((t, i))
            for post, w, delay in outgoing[i]:
                queue[t + delay].append(PendingDelivery(t + delay, post, w))
        if trace is not None:
            trace.append(list(membrane))
    elapsed = time.perf_counter() - start

    raster = SpikeRaster.from_events(events, n, cfg.steps)
    membrane_trace = None
    if trace is not None:
        membrane_trace = np.array(trace, dtype=float).reshape(cfg.steps, n)
    return RunResult(raster=raster, elapsed=elapsed, membrane=membrane_trace)
