"""Pairwise STDP on the matrix backend.

Two neurons are driven so that the presynaptic one always fires two steps
before the postsynaptic one. The forward synapse potentiates steadily while
the reverse synapse, which sees post-before-pre pairs, depresses toward the
lower bound.
"""

import numpy as np

from spikeforge import NetworkDef, NeuronParams, SimulationConfig, StdpConfig, StimulusSchedule, SynapseDef, mat_run

net = NetworkDef.build(
    [NeuronParams(threshold=1.0), NeuronParams(threshold=1.0)],
    [SynapseDef(0, 1, weight=0.2, stdp_enabled=True), SynapseDef(1, 0, weight=0.2, stdp_enabled=True)],
)


def paired_drive(steps, period=20, lag=2):
    times = np.arange(0, steps - lag, period)
    return StimulusSchedule(
        steps=np.concatenate([times, times + lag]),
        neurons=np.repeat([0, 1], times.size),
        amplitudes=np.full(2 * times.size, 2.0),
    )


stdp = StdpConfig.exponential()
print(f"window={stdp.window} a_plus[:3]={np.round(stdp.a_plus[:3], 4)}")

for steps in (50, 100, 200, 400):
    w = mat_run(net, SimulationConfig(steps=steps, stdp=stdp), paired_drive(steps)).weights
    print(f"after {steps:3d} steps: w(0->1)={w[0]:.4f}  w(1->0)={w[1]:.4f}")
