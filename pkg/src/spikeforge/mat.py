"""Homogeneous LIF backend: dense state vectors and one matrix-vector product per step."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .model import (
    DEFAULT_BEHAVIOR,
    NetworkDef,
    RunResult,
    SimulationConfig,
    SpikeRaster,
    StdpConfig,
    StimulusSchedule,
    check_network,
)

__all__ = [
    "MatState",
    "SimulationTimeout",
    "apply_leak",
    "apply_stdp",
    "mat_init",
    "mat_run",
    "mat_step",
]

# Below this fill fraction the weight matrix is stored as CSR.
DENSE_MIN_DENSITY = 1 / 16


class SimulationTimeout(RuntimeError):
    def __init__(self, elapsed: float, step: int):
        super().__init__(f"simulation exceeded its time budget after {elapsed:.2f}s at step {step}")
        self.elapsed = elapsed
        self.step = step


def apply_leak(membrane, leaks, resets):
    """Move each membrane value toward its reset state by its leak, never past it.

    An infinite leak lands exactly on the reset state.

    >>> float(apply_leak(5.0, 2.0, 0.0))
    3.0
    >>> float(apply_leak(1.0, 5.0, 0.0))
    0.0
    """
    v = np.asarray(membrane, dtype=np.float64)
    lam = np.asarray(leaks, dtype=np.float64)
    r = np.asarray(resets, dtype=np.float64)
    down = np.maximum(v - lam, r)
    up = np.minimum(v + lam, r)
    return np.where(v > r, down, np.where(v < r, up, v))


@dataclass(eq=False)
class MatState:
    membrane: np.ndarray
    thresholds: np.ndarray
    leaks: np.ndarray
    resets: np.ndarray
    refractory_periods: np.ndarray
    refractory_counters: np.ndarray
    spikes_prev: np.ndarray
    # synapse list, sorted by (post, pre); ``weights`` is the source of truth for STDP
    syn_pre: np.ndarray
    syn_post: np.ndarray
    weights: np.ndarray
    plastic: np.ndarray
    syn_order: np.ndarray
    # dense (N, N) array indexed [pre, post], or CSR of the transpose indexed [post, pre]
    _matrix: np.ndarray | sparse.csr_matrix
    spike_history: np.ndarray | None = None
    history_len: int = 0
    step_index: int = 0
    stdp_clipped: bool = False

    @property
    def neuron_count(self) -> int:
        return int(self.membrane.size)

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self._matrix)

    @property
    def weight_matrix(self) -> np.ndarray:
        """Dense view with entry (i, j) holding the weight of synapse i -> j."""
        if self.is_sparse:
            return self._matrix.T.toarray()
        return self._matrix

    def propagate(self, spikes: np.ndarray) -> np.ndarray:
        """Input to each neuron from ``spikes``: element j gets sum_i W(i, j) s(i)."""
        s = spikes.astype(np.float64)
        if self.is_sparse:
            return self._matrix @ s
        return s @ self._matrix

    def network_weights(self) -> np.ndarray:
        """Current weights in the synapse order of the originating network."""
        out = np.empty_like(self.weights)
        out[self.syn_order] = self.weights
        return out


def mat_init(net: NetworkDef, cfg: SimulationConfig, storage: str = "auto") -> MatState:
    """Build the initial state. ``storage`` is ``"auto"``, ``"dense"`` or ``"sparse"``."""
    check_network(net)
    if net.synapse_count and np.any(net.delay != 1):
        raise ValueError("unit delays required: lower the network with lower_delays() first")
    if np.any(net.axonal_delay != 0):
        raise ValueError("zero axonal delays required: lower the network with lower_delays() first")
    foreign = sorted({b for b in net.behavior if b != DEFAULT_BEHAVIOR})
    if foreign:
        raise ValueError(f"matrix backend is homogeneous ('lif' only); got behaviors {foreign}")

    n = net.neuron_count
    order = np.lexsort((net.pre, net.post))
    pre, post = net.pre[order], net.post[order]
    weights = net.weight[order].copy()
    plastic = net.stdp[order].copy()

    if storage == "auto":
        storage = "dense" if net.synapse_count >= DENSE_MIN_DENSITY * n * n else "sparse"
    if storage == "dense":
        matrix = np.zeros((n, n))
        matrix[pre, post] = weights
    elif storage == "sparse":
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(post, minlength=n), out=indptr[1:])
        matrix = sparse.csr_matrix((weights.copy(), pre.copy(), indptr), shape=(n, n))
    else:
        raise ValueError(f"unknown storage {storage!r}")

    history = None
    if cfg.stdp is not None:
        history = np.zeros((cfg.stdp.window, n))

    return MatState(
        membrane=net.reset.copy(),
        thresholds=net.threshold.copy(),
        leaks=net.leak.copy(),
        resets=net.reset.copy(),
        refractory_periods=net.refractory.copy(),
        refractory_counters=np.zeros(n, dtype=np.int64),
        spikes_prev=np.zeros(n, dtype=bool),
        syn_pre=pre,
        syn_post=post,
        weights=weights,
        plastic=plastic,
        syn_order=order,
        _matrix=matrix,
        spike_history=history,
    )


def mat_step(state: MatState, ext: np.ndarray | None = None) -> tuple[MatState, np.ndarray]:
    """Advance one step in place; returns the state and the boolean spike vector."""
    u = apply_leak(state.membrane, state.leaks, state.resets)
    if state.spikes_prev.any():
        u += state.propagate(state.spikes_prev)
    if ext is not None:
        u += ext
    spikes = u > state.thresholds

    held = state.refractory_counters > 0
    if held.any():
        spikes &= ~held
        state.refractory_counters[held] -= 1
        u[held] = state.resets[held]

    state.membrane = np.where(spikes, state.resets, u)
    state.refractory_counters[spikes] = state.refractory_periods[spikes]

    if state.spike_history is not None:
        if state.step_index > 0:
            h = state.spike_history
            h[1:] = h[:-1]
            h[0] = state.spikes_prev
            state.history_len = min(state.history_len + 1, h.shape[0])
    state.spikes_prev = spikes
    state.step_index += 1
    return state, spikes


def apply_stdp(state: MatState, cfg: StdpConfig) -> MatState:
    """Windowed pairwise STDP on the most recent spike vector, in place.

    For each plastic synapse i -> j the change is
    ``sum_k a_plus[k] s_i[t-k] s_j[t] - sum_k a_minus[k] s_j[t-k] s_i[t]``,
    followed by clipping to ``[w_min, w_max]``.
    """
    if state.spike_history is None or state.spike_history.shape[0] != cfg.window:
        raise ValueError("state was not initialised with a matching STDP window")
    if not state.stdp_clipped:
        # first call: bring every plastic weight into bounds, as the zero-change update would
        idx = np.flatnonzero(state.plastic)
        state.weights[idx] = np.clip(state.weights[idx], cfg.w_min, cfg.w_max)
        _write_back(state, idx)
        state.stdp_clipped = True
    now = state.spikes_prev
    if not now.any() or not state.plastic.any():
        return state
    s = now.astype(np.float64)
    pot_trace = np.asarray(cfg.a_plus) @ state.spike_history
    dep_trace = np.asarray(cfg.a_minus) @ state.spike_history

    idx = np.flatnonzero(state.plastic & (now[state.syn_pre] | now[state.syn_post]))
    if idx.size == 0:
        return state
    pre, post = state.syn_pre[idx], state.syn_post[idx]
    delta = pot_trace[pre] * s[post] - s[pre] * dep_trace[post]
    state.weights[idx] = np.clip(state.weights[idx] + delta, cfg.w_min, cfg.w_max)
    _write_back(state, idx)
    return state


def _write_back(state: MatState, idx: np.ndarray) -> None:
    if state.is_sparse:
        state._matrix.data[idx] = state.weights[idx]
    else:
        state._matrix[state.syn_pre[idx], state.syn_post[idx]] = state.weights[idx]


def run_loop(
    state: MatState,
    steps: int,
    stim: StimulusSchedule,
    stdp: StdpConfig | None = None,
    record_membrane: bool = False,
    timeout: float | None = None,
) -> RunResult:
    """Step ``state`` ``steps`` times and collect the raster; only this loop is timed."""
    n = state.neuron_count
    ext_by_step = stim.per_step(n, steps)
    fired: list[np.ndarray] = []
    trace = np.empty((steps, n)) if record_membrane else None

    start = time.perf_counter()
    for t in range(steps):
        _, spikes = mat_step(state, ext_by_step.get(t))
        if stdp is not None:
            apply_stdp(state, stdp)
        fired.append(np.flatnonzero(spikes))
        if trace is not None:
            trace[t] = state.membrane
        if timeout is not None and time.perf_counter() - start > timeout:
            raise SimulationTimeout(time.perf_counter() - start, t)
    elapsed = time.perf_counter() - start

    counts = np.fromiter((f.size for f in fired), dtype=np.int64, count=steps)
    raster = SpikeRaster(
        np.repeat(np.arange(steps), counts),
        np.concatenate(fired) if fired else np.zeros(0, np.int64),
        n,
        steps,
    )
    return RunResult(raster=raster, elapsed=elapsed, membrane=trace,
                     weights=state.network_weights() if stdp is not None else None)


def mat_run(
    net: NetworkDef,
    cfg: SimulationConfig,
    stim: StimulusSchedule | None = None,
    *,
    storage: str = "auto",
    timeout: float | None = None,
) -> RunResult:
    """Simulate a unit-delay LIF network for ``cfg.steps`` steps.

    Networks with longer synaptic or axonal delays must go through
    :func:`spikeforge.lowering.lower_delays` first. With STDP configured,
    ``result.weights`` holds the final weights in ``net``'s synapse order.
    """
    state = mat_init(net, cfg, storage=storage)
    return run_loop(state, cfg.steps, stim or StimulusSchedule(), cfg.stdp,
                    cfg.record_membrane, timeout)
