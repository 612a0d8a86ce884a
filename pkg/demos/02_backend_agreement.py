"""Differential check of the agent-based and matrix backends against the oracle.

Random networks with mixed delays are run on every backend; any disagreement
is reported as the first (step, neuron) where the rasters part ways.
"""

import numpy as np

from spikeforge import SimulationConfig, StimulusSchedule, simulate
from spikeforge.model import first_divergence
from spikeforge.netgen import erdos_renyi

rng = np.random.default_rng(2024)
for n, p in [(20, 0.3), (60, 0.1), (100, 0.05)]:
    net = erdos_renyi(n, p, seed=int(rng.integers(1 << 31)), leak=0.25, refractory=2)
    net = net.replace(delay=rng.integers(1, 6, net.synapse_count),
                      weight=rng.choice([0.5, 1.0, 1.5], net.synapse_count))
    k = 4 * n
    stim = StimulusSchedule(rng.integers(0, 300, k), rng.integers(0, n, k), rng.choice([0.5, 1.5], k))
    cfg = SimulationConfig(steps=300)

    ref = simulate(net, cfg, stim, "oracle").raster
    for backend in ("mat", "abm"):
        div = first_divergence(ref, simulate(net, cfg, stim, backend).raster)
        verdict = "identical" if div is None else f"diverges at step {div[0]}, neuron {div[1]}"
        print(f"n={n:3d} p={p:.2f} {backend:3s}: {len(ref):5d} spikes, {verdict}")
