"""Plugging a new neuron behavior into the agent-based backend.

Half the network uses the built-in deterministic LIF rule, the other half a
stochastic variant that only fires with probability p once above threshold.
Each agent draws from its own counter-based stream, so reruns with the same
seed are identical while a different seed changes the raster.
"""

import numpy as np

from spikeforge import DEFAULT_REGISTRY, SimulationConfig, StochasticLIF, abm_run, register_behavior
from spikeforge.netgen import BenchScenario, build_scenario

registry = register_behavior("noisy", StochasticLIF(p=0.6), DEFAULT_REGISTRY.copy())

net, _, stim = build_scenario(BenchScenario(200, 0.05, steps=300, seed=5))
behavior = np.where(np.arange(net.neuron_count) % 2 == 0, "lif", "noisy")
net = net.replace(behavior=tuple(behavior), refractory=np.full(net.neuron_count, 1))

a = abm_run(net, SimulationConfig(steps=300, seed=1), stim, registry=registry).raster
b = abm_run(net, SimulationConfig(steps=300, seed=1), stim, registry=registry).raster
c = abm_run(net, SimulationConfig(steps=300, seed=2), stim, registry=registry).raster
print(f"seed 1: {len(a)} spikes; rerun identical: {a == b}")
print(f"seed 2: {len(c)} spikes; same as seed 1: {a == c}")
