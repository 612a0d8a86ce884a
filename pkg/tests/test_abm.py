import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spikeforge import (
    BehaviorRegistry,
    NetworkDef,
    NeuronParams,
    SimulationConfig,
    StochasticLIF,
    SynapseDef,
    World,
    abm_run,
    abm_step,
    lower_delays,
    mat_run,
    oracle_run,
    register_behavior,
)
from spikeforge.abm import DEFAULT_REGISTRY, AgentStream, lif
from spikeforge.netgen import erdos_renyi

from conftest import chain, kick, random_lif_net, random_stimulus


@pytest.fixture
def registry():
    reg = DEFAULT_REGISTRY.copy()
    reg.register("stochastic_lif", StochasticLIF(p=1.0))
    return reg


def test_lif_registered_by_default():
    assert "lif" in DEFAULT_REGISTRY
    assert DEFAULT_REGISTRY.get("lif") is lif


def test_duplicate_registration_fails():
    reg = DEFAULT_REGISTRY.copy()
    with pytest.raises(ValueError, match="already registered"):
        register_behavior("lif", lif, reg)


def test_register_returns_registry():
    reg = BehaviorRegistry()
    assert register_behavior("coin", StochasticLIF(0.5), reg) is reg
    assert "coin" in reg and reg.names() == ["coin"]


def test_unknown_behavior_rejected_at_construction():
    net = NetworkDef.build([NeuronParams(behavior="mystery")])
    with pytest.raises(KeyError, match="mystery"):
        World(net, SimulationConfig(steps=1))


def test_chain_matches_matrix_backend():
    res = abm_run(chain(), SimulationConfig(steps=5), kick((0, 0, 1.0)))
    assert res.raster.events == [(0, 0), (1, 1)]


def test_native_synaptic_delay():
    res = abm_run(chain(threshold=1.0, weight=2.0, delay=3), SimulationConfig(steps=6), kick((0, 0, 2.0)))
    assert res.raster.events == [(0, 0), (3, 1)]


def test_axonal_delay_adds_to_synaptic():
    res = abm_run(chain(threshold=1.0, weight=2.0, axonal=2), SimulationConfig(steps=6), kick((0, 0, 2.0)))
    assert res.raster.events == [(0, 0), (3, 1)]


def test_phase_isolation():
    # 0 -> 1 -> 2, all delay 1: a spike advances one hop per step, never more
    net = NetworkDef.build([NeuronParams(threshold=0.5)] * 3, [SynapseDef(0, 1), SynapseDef(1, 2)])
    world = World(net, SimulationConfig(steps=3), kick((0, 0, 1.0)))
    assert [abm_step(world).tolist() for _ in range(3)] == [[0], [1], [2]]


def test_register_conservation(rng):
    net = random_lif_net(rng, 20, 0.4, max_delay=5, max_axonal=2)
    world = World(net, SimulationConfig(steps=80), random_stimulus(rng, 20, 80, 60))

    def slot_total(offset):
        return sum(int(ch.registers.ring[(world.t + offset) % ch.registers.length].sum())
                   for ch in world.channels)

    for _ in range(80):
        before = world.register_occupancy()
        assert slot_total(0) == 0  # head slot was emptied by the previous pop
        world.neuron_step()
        pushed = slot_total(0)
        assert world.register_occupancy() == before + pushed
        tail = slot_total(1)
        world.synapse_step()
        assert world.register_occupancy() == before + pushed - tail
        world.t += 1


def test_mixed_with_certain_firing_equals_all_lif(registry):
    base = erdos_renyi(40, 0.3, seed=3)
    stim = kick(*[(t, i, 2.0) for t in range(0, 200, 10) for i in (0, 5, 9)])
    cfg = SimulationConfig(steps=200, seed=11)
    mixed = base.replace(behavior=["lif", "stochastic_lif"] * 20)
    assert abm_run(mixed, cfg, stim, registry=registry).raster == abm_run(base, cfg, stim).raster


def test_stochastic_is_seed_deterministic():
    reg = DEFAULT_REGISTRY.copy()
    reg.register("coin", StochasticLIF(p=0.5))
    net = erdos_renyi(40, 0.3, seed=3).replace(behavior=["coin"] * 40)
    stim = kick(*[(t, i, 2.0) for t in range(0, 200, 5) for i in range(10)])
    runs = [abm_run(net, SimulationConfig(steps=200, seed=s), stim, registry=reg).raster for s in (1, 1, 2)]
    assert runs[0] == runs[1]
    assert runs[0] != runs[2]
    assert 0 < len(runs[0])


def test_agent_streams_are_independent_of_batching():
    ids = np.arange(50)
    whole = AgentStream(7, ids, 3).uniform()
    parts = np.concatenate([AgentStream(7, ids[:20], 3).uniform(), AgentStream(7, ids[20:], 3).uniform()])
    assert np.array_equal(whole, parts)
    assert np.all((0 <= whole) & (whole < 1))
    other_step = AgentStream(7, ids, 4).uniform()
    assert not np.array_equal(whole, other_step)


def test_agent_stream_is_roughly_uniform():
    u = AgentStream(123, np.arange(200_000), 0).uniform()
    # mean of U(0,1) has sd 1/sqrt(12 n)
    assert abs(u.mean() - 0.5) < 4 / np.sqrt(12 * u.size)


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(1, 15),
    p=st.sampled_from([0.2, 0.5, 1.0]),
    steps=st.integers(1, 120),
    seed=st.integers(0, 2**32 - 1),
)
def test_equivalent_to_lowered_matrix_and_oracle(n, p, steps, seed):
    rng = np.random.default_rng(seed)
    net = random_lif_net(rng, n, p, max_delay=5, max_axonal=3)
    stim = random_stimulus(rng, n, steps, 3 * n)
    cfg = SimulationConfig(steps=steps)
    abm = abm_run(net, cfg, stim).raster
    low = lower_delays(net)
    assert abm == mat_run(low.net, cfg, stim).raster.restrict(low.original_ids)
    assert abm == oracle_run(net, cfg, stim).raster
