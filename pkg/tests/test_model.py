import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spikeforge import (
    INFINITE,
    NetworkDef,
    NeuronParams,
    SimulationConfig,
    SpikeRaster,
    StdpConfig,
    StimulusSchedule,
    SynapseDef,
    first_divergence,
    raster_equal,
    validate_network,
)

from conftest import chain


def test_valid_chain_has_no_violations():
    assert validate_network(chain()) == []


def test_bad_endpoint_is_reported():
    net = NetworkDef.build([NeuronParams()] * 3, [SynapseDef(0, 7)])
    (v,) = validate_network(net)
    assert v.kind == "endpoint" and v.element == "synapse[0]"


def test_duplicate_pair_is_reported():
    net = NetworkDef.build([NeuronParams()] * 2, [SynapseDef(0, 1), SynapseDef(0, 1)])
    (v,) = validate_network(net)
    assert v.kind == "duplicate"
    assert "(0, 1)" in v.message


@pytest.mark.parametrize(
    "neuron, kind",
    [
        (NeuronParams(refractory_period=-1), "refractory"),
        (NeuronParams(leak=-0.5), "leak"),
        (NeuronParams(leak=float("nan")), "leak"),
        (NeuronParams(axonal_delay=-2), "axonal_delay"),
        (NeuronParams(threshold=float("inf")), "threshold"),
        (NeuronParams(behavior=""), "behavior"),
    ],
)
def test_neuron_violations(neuron, kind):
    (v,) = validate_network(NetworkDef.build([neuron]))
    assert v.kind == kind and v.element == "neuron[0]"


def test_zero_delay_rejected():
    net = NetworkDef.build([NeuronParams()] * 2, [SynapseDef(0, 1, delay=0)])
    assert [v.kind for v in validate_network(net)] == ["delay"]


def test_infinite_leak_is_valid():
    assert validate_network(NetworkDef.build([NeuronParams(leak=INFINITE)])) == []


def test_shape_mismatch_is_reported_not_raised():
    net = chain().replace(leak=[0.0])
    assert validate_network(net)[0].kind == "shape"


@given(
    n=st.integers(0, 6),
    pairs=st.lists(st.tuples(st.integers(-2, 8), st.integers(-2, 8)), max_size=12),
    delays=st.lists(st.integers(-3, 5), min_size=12, max_size=12),
    refr=st.lists(st.integers(-2, 3), min_size=6, max_size=6),
)
def test_validation_is_total(n, pairs, delays, refr):
    net = NetworkDef.build(
        [NeuronParams(refractory_period=refr[i]) for i in range(n)],
        [SynapseDef(a, b, delay=delays[k]) for k, (a, b) in enumerate(pairs)],
    )
    problems = validate_network(net)
    expect_ok = (
        all(r >= 0 for r in refr[:n])
        and all(0 <= a < n and 0 <= b < n for a, b in pairs)
        and all(d >= 1 for d in delays[: len(pairs)])
        and len(set(pairs)) == len(pairs)
    )
    assert (problems == []) == expect_ok


def test_network_is_immutable():
    net = chain()
    with pytest.raises(ValueError):
        net.weight[0] = 3.0


def test_neuron_and_synapse_views_round_trip():
    net = chain(weight=2.5, delay=4, axonal=1)
    assert NetworkDef.build(net.neurons, net.synapses) == net


def test_config_invariants():
    with pytest.raises(ValueError):
        SimulationConfig(steps=0)
    with pytest.raises(ValueError):
        SimulationConfig(steps=1, seed=-1)
    SimulationConfig(steps=1, seed=2**64 - 1)


def test_stdp_config_invariants():
    with pytest.raises(ValueError):
        StdpConfig(a_plus=(), a_minus=())
    with pytest.raises(ValueError):
        StdpConfig(a_plus=(0.1,), a_minus=(0.1, 0.2))
    with pytest.raises(ValueError):
        StdpConfig(a_plus=(0.1,), a_minus=(0.1,), w_min=1.0, w_max=0.0)
    cfg = StdpConfig.exponential()
    assert cfg.window == 20
    assert cfg.a_plus[0] == pytest.approx(0.01 * np.exp(-1 / 5))
    assert cfg.a_minus[4] == pytest.approx(0.012 * np.exp(-1))


def test_stimulus_per_step_sums_duplicates():
    stim = StimulusSchedule.from_entries([(2, 1, 1.5), (2, 1, 0.5), (0, 0, 1.0)])
    dense = stim.per_step(3, 5)
    assert sorted(dense) == [0, 2]
    assert dense[2].tolist() == [0.0, 2.0, 0.0]


def test_stimulus_out_of_range():
    stim = StimulusSchedule.from_entries([(5, 0, 1.0)])
    assert stim.validate(1, 5)
    with pytest.raises(ValueError):
        stim.per_step(1, 5)


def test_raster_sorts_and_deduplicates():
    r = SpikeRaster.from_events([(3, 1), (0, 2), (3, 0), (0, 2)], 3, 4)
    assert r.events == [(0, 2), (3, 0), (3, 1)]


def test_raster_equal_basics():
    a = SpikeRaster.from_events([(0, 0), (1, 1)], 2, 2)
    b = SpikeRaster.from_events([(0, 0), (1, 1)], 2, 2)
    c = SpikeRaster.from_events([(0, 0)], 2, 2)
    assert raster_equal(a, a) and raster_equal(a, b)
    assert not raster_equal(a, c)
    assert raster_equal(a, c, restrict_to={0})
    assert first_divergence(a, c) == (1, 1, True)
    assert first_divergence(c, a) == (1, 1, False)
    assert first_divergence(a, b) is None


events_st = st.lists(st.tuples(st.integers(0, 9), st.integers(0, 4)), max_size=20)


@settings(max_examples=60)
@given(events_st, events_st, events_st)
def test_raster_equal_is_an_equivalence(x, y, z):
    a, b, c = (SpikeRaster.from_events(e, 5, 10) for e in (x, y, z))
    assert raster_equal(a, a)
    assert raster_equal(a, b) == raster_equal(b, a)
    if raster_equal(a, b) and raster_equal(b, c):
        assert raster_equal(a, c)
    assert raster_equal(a, b) == (set(x) == set(y))
