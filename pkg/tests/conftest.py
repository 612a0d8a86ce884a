import numpy as np
import pytest

from spikeforge import NetworkDef, NeuronParams, SimulationConfig, StimulusSchedule, SynapseDef
from spikeforge.netgen import erdos_renyi


def chain(threshold=0.5, weight=1.0, delay=1, axonal=0, refractory=0, leak=0.0):
    """Two neurons, one synapse 0 -> 1."""
    neurons = [
        NeuronParams(threshold=threshold, leak=leak, refractory_period=refractory, axonal_delay=axonal),
        NeuronParams(threshold=threshold, leak=leak, refractory_period=refractory),
    ]
    return NetworkDef.build(neurons, [SynapseDef(0, 1, weight=weight, delay=delay)])


def kick(*entries):
    return StimulusSchedule.from_entries(entries)


def random_lif_net(rng, n, p, *, max_delay=1, max_axonal=0, integer_weights=True):
    """ER topology with randomised integer-valued parameters (exact in float64)."""
    net = erdos_renyi(n, p, seed=int(rng.integers(2**32)))
    m = net.synapse_count
    weight = rng.integers(-1, 4, m).astype(float) if integer_weights else rng.normal(size=m)
    return net.replace(
        threshold=rng.integers(0, 4, n).astype(float),
        leak=np.where(rng.random(n) < 0.1, np.inf, rng.integers(0, 3, n)),
        reset=rng.integers(-1, 1, n).astype(float),
        refractory=rng.integers(0, 4, n),
        axonal_delay=rng.integers(0, max_axonal + 1, n),
        weight=weight,
        delay=rng.integers(1, max_delay + 1, m),
    )


def random_stimulus(rng, n, steps, count):
    return StimulusSchedule(
        steps=rng.integers(0, steps, count),
        neurons=rng.integers(0, n, count),
        amplitudes=rng.integers(1, 5, count).astype(float),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def cfg10():
    return SimulationConfig(steps=10)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
