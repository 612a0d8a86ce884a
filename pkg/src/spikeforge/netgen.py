"""Seeded random networks and the benchmark scenarios built from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NetworkDef, SimulationConfig, StimulusSchedule

__all__ = [
    "BenchScenario",
    "BENCH_PROBS",
    "BENCH_SIZES",
    "build_scenario",
    "erdos_renyi",
    "bench_matrix",
]

BENCH_SIZES = (100, 1000, 10000)
BENCH_PROBS = (0.25, 0.5, 0.75, 1.0)

# spawn keys of the independent random streams used per scenario
EDGE_STREAM = 1
INPUT_STREAM = 2

_ROW_BLOCK = 256


def component_rng(seed: int, component: int) -> np.random.Generator:
    """Counter-based (Philox) generator dedicated to one scenario component."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(component,))))


def erdos_renyi(n: int, p: float, seed: int = 0, **neuron_params) -> NetworkDef:
    """Directed G(n, p) without self-loops, every synapse weight 1 and delay 1.

    Neurons default to threshold 1, reset 0, refractory 0, leak 0 and no axonal
    delay; keyword arguments override them (see :meth:`NetworkDef.uniform`).
    Rows are drawn in fixed-size blocks, so memory stays bounded for large ``n``
    and the result depends only on ``(n, p, seed)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = component_rng(seed, EDGE_STREAM)
    pres, posts = [], []
    for lo in range(0, n, _ROW_BLOCK):
        hi = min(lo + _ROW_BLOCK, n)
        mask = rng.random((hi - lo, n)) < p
        rows = np.arange(hi - lo)
        mask[rows, rows + lo] = False
        r, c = np.nonzero(mask)
        pres.append(r + lo)
        posts.append(c)
    pre = np.concatenate(pres).astype(np.int64)
    post = np.concatenate(posts).astype(np.int64)
    params = dict(threshold=1.0, leak=0.0, reset=0.0, refractory=0, axonal_delay=0)
    params.update(neuron_params)
    metadata = {"generator": "erdos_renyi", "n": str(n), "p": repr(float(p)), "seed": str(seed)}
    return NetworkDef.uniform(n, pre, post, weight=1.0, delay=1, metadata=metadata, **params)


@dataclass(frozen=True)
class BenchScenario:
    neuron_count: int
    connection_probability: float
    steps: int = 1000
    input_neuron_count: int = 3
    input_period: int = 10
    amplitude: float | None = None  # None: threshold + 1
    seed: int = 0
    threshold: float = 1.0

    def __post_init__(self):
        if self.neuron_count < 1:
            raise ValueError("neuron_count must be >= 1")
        if not 0.0 <= self.connection_probability <= 1.0:
            raise ValueError("connection_probability must lie in [0, 1]")

    @property
    def stimulus_amplitude(self) -> float:
        return self.threshold + 1.0 if self.amplitude is None else float(self.amplitude)


def build_scenario(s: BenchScenario):
    """Network, config and stimulus for one benchmark cell.

    ``input_neuron_count`` distinct neurons, picked with their own seeded
    stream, are stimulated at steps 0, period, 2*period, ...
    """
    if s.neuron_count < s.input_neuron_count:
        raise ValueError(
            f"need at least {s.input_neuron_count} neurons for the input set, got {s.neuron_count}"
        )
    net = erdos_renyi(s.neuron_count, s.connection_probability, s.seed, threshold=s.threshold)
    rng = component_rng(s.seed, INPUT_STREAM)
    inputs = np.sort(rng.choice(s.neuron_count, size=s.input_neuron_count, replace=False))
    times = np.arange(0, s.steps, s.input_period)
    stim = StimulusSchedule(
        steps=np.repeat(times, inputs.size),
        neurons=np.tile(inputs, times.size),
        amplitudes=np.full(times.size * inputs.size, s.stimulus_amplitude),
    )
    cfg = SimulationConfig(steps=s.steps, seed=s.seed)
    return net, cfg, stim


def bench_matrix(sizes=BENCH_SIZES, probs=BENCH_PROBS, **kwargs) -> list[BenchScenario]:
    return [BenchScenario(n, p, **kwargs) for n in sizes for p in probs]
