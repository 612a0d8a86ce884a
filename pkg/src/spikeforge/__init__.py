"""Discrete-time spiking network simulation with a matrix backend and an agent backend."""

from .abm import (
    DEFAULT_REGISTRY,
    BehaviorRegistry,
    StochasticLIF,
    World,
    abm_run,
    abm_step,
    register_behavior,
)
from .backends import simulate
from .lowering import LoweredNetwork, lower_delays, proxy_count
from .mat import MatState, SimulationTimeout, apply_leak, apply_stdp, mat_init, mat_run, mat_step
from .model import (
    INFINITE,
    NetworkDef,
    NeuronParams,
    RunResult,
    SimulationConfig,
    SpikeRaster,
    StdpConfig,
    StimulusSchedule,
    SynapseDef,
    Violation,
    first_divergence,
    raster_equal,
    validate_network,
)
from .netgen import BenchScenario, build_scenario, erdos_renyi
from .oracle import oracle_run

__version__ = "0.1.0"
