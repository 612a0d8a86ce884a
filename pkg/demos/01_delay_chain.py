"""A single delayed synapse, simulated three ways.

Neuron 0 is kicked at step 0 and projects onto neuron 1 through a synapse
with delay 3. The matrix backend only understands unit delays, so the network
is first lowered: the delay becomes a chain of two relay neurons that fire on
any positive input and forget everything at once.
"""

from spikeforge import (
    NetworkDef,
    NeuronParams,
    SimulationConfig,
    StimulusSchedule,
    SynapseDef,
    abm_run,
    lower_delays,
    mat_run,
    oracle_run,
)

net = NetworkDef.build(
    [NeuronParams(threshold=0.5), NeuronParams(threshold=0.5)],
    [SynapseDef(0, 1, weight=1.0, delay=3)],
)
stim = StimulusSchedule.from_entries([(0, 0, 1.0)])
cfg = SimulationConfig(steps=8)

lowered = lower_delays(net)
print(f"lowered network: {lowered.net.neuron_count} neurons ({lowered.proxy_total} relays)")
for pid, (pre, post, pos) in sorted(lowered.proxy_map.items()):
    print(f"  neuron {pid} relays {pre}->{post}, hop {pos}")

mat = mat_run(lowered.net, cfg, stim).raster
print("mat, all neurons:      ", mat.events)
print("mat, original neurons: ", mat.restrict(lowered.original_ids).events)
print("abm:                   ", abm_run(net, cfg, stim).raster.events)
print("oracle:                ", oracle_run(net, cfg, stim).raster.events)
