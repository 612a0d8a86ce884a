"""Network description, run configuration and spike raster types shared by all backends."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

# Leak value that returns a neuron to its reset state in a single step.
INFINITE = math.inf

DEFAULT_BEHAVIOR = "lif"


@dataclass(frozen=True)
class NeuronParams:
    threshold: float = 1.0
    leak: float = 0.0
    reset_state: float = 0.0
    refractory_period: int = 0
    axonal_delay: int = 0
    behavior: str = DEFAULT_BEHAVIOR


@dataclass(frozen=True)
class SynapseDef:
    pre: int
    post: int
    weight: float = 1.0
    delay: int = 1
    stdp_enabled: bool = False


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def _same_bits(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()


@dataclass(frozen=True, eq=False)
class NetworkDef:
    """Directed synaptic graph with per-neuron and per-synapse parameters.

    Storage is columnar: one read-only array per field, so networks with tens of
    millions of synapses stay cheap. Neuron ids are the dense range
    ``0..neuron_count-1``. Use :meth:`build` to construct from parameter
    objects, and :attr:`neurons` / :attr:`synapses` to get them back.
    """

    threshold: np.ndarray
    leak: np.ndarray
    reset: np.ndarray
    refractory: np.ndarray
    axonal_delay: np.ndarray
    behavior: tuple[str, ...]
    pre: np.ndarray
    post: np.ndarray
    weight: np.ndarray
    delay: np.ndarray
    stdp: np.ndarray
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        set_ = object.__setattr__
        for name in ("threshold", "leak", "reset", "weight"):
            set_(self, name, _frozen(getattr(self, name), np.float64))
        for name in ("refractory", "axonal_delay", "pre", "post", "delay"):
            set_(self, name, _frozen(getattr(self, name), np.int64))
        set_(self, "stdp", _frozen(self.stdp, bool))
        set_(self, "behavior", tuple(str(b) for b in self.behavior))
        set_(self, "metadata", {str(k): str(v) for k, v in dict(self.metadata).items()})

    @classmethod
    def build(
        cls,
        neurons: Sequence[NeuronParams],
        synapses: Iterable[SynapseDef] = (),
        metadata: Mapping[str, str] | None = None,
    ) -> "NetworkDef":
        synapses = list(synapses)
        return cls(
            threshold=[n.threshold for n in neurons],
            leak=[n.leak for n in neurons],
            reset=[n.reset_state for n in neurons],
            refractory=[n.refractory_period for n in neurons],
            axonal_delay=[n.axonal_delay for n in neurons],
            behavior=[n.behavior for n in neurons],
            pre=[s.pre for s in synapses],
            post=[s.post for s in synapses],
            weight=[s.weight for s in synapses],
            delay=[s.delay for s in synapses],
            stdp=[s.stdp_enabled for s in synapses],
            metadata=metadata or {},
        )

    @classmethod
    def uniform(
        cls,
        neuron_count: int,
        pre,
        post,
        *,
        weight=1.0,
        delay=1,
        stdp=False,
        threshold=1.0,
        leak=0.0,
        reset=0.0,
        refractory=0,
        axonal_delay=0,
        behavior: str = DEFAULT_BEHAVIOR,
        metadata: Mapping[str, str] | None = None,
    ) -> "NetworkDef":
        """Network whose per-element parameters are scalars or arrays broadcast to size."""
        pre = np.asarray(pre, dtype=np.int64).reshape(-1)
        m = pre.size
        n = neuron_count
        return cls(
            threshold=np.broadcast_to(np.asarray(threshold, dtype=np.float64), (n,)),
            leak=np.broadcast_to(np.asarray(leak, dtype=np.float64), (n,)),
            reset=np.broadcast_to(np.asarray(reset, dtype=np.float64), (n,)),
            refractory=np.broadcast_to(np.asarray(refractory, dtype=np.int64), (n,)),
            axonal_delay=np.broadcast_to(np.asarray(axonal_delay, dtype=np.int64), (n,)),
            behavior=(behavior,) * n,
            pre=pre,
            post=post,
            weight=np.broadcast_to(np.asarray(weight, dtype=np.float64), (m,)),
            delay=np.broadcast_to(np.asarray(delay, dtype=np.int64), (m,)),
            stdp=np.broadcast_to(np.asarray(stdp, dtype=bool), (m,)),
            metadata=metadata or {},
        )

    @property
    def neuron_count(self) -> int:
        return int(self.threshold.size)

    @property
    def synapse_count(self) -> int:
        return int(self.pre.size)

    @property
    def neurons(self) -> list[NeuronParams]:
        return [
            NeuronParams(
                threshold=float(self.threshold[i]),
                leak=float(self.leak[i]),
                reset_state=float(self.reset[i]),
                refractory_period=int(self.refractory[i]),
                axonal_delay=int(self.axonal_delay[i]),
                behavior=self.behavior[i],
            )
            for i in range(self.neuron_count)
        ]

    @property
    def synapses(self) -> list[SynapseDef]:
        return [
            SynapseDef(
                pre=int(self.pre[k]),
                post=int(self.post[k]),
                weight=float(self.weight[k]),
                delay=int(self.delay[k]),
                stdp_enabled=bool(self.stdp[k]),
            )
            for k in range(self.synapse_count)
        ]

    def replace(self, **changes) -> "NetworkDef":
        fields = {
            name: getattr(self, name)
            for name in (
                "threshold", "leak", "reset", "refractory", "axonal_delay", "behavior",
                "pre", "post", "weight", "delay", "stdp", "metadata",
            )
        }
        fields.update(changes)
        return NetworkDef(**fields)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NetworkDef):
            return NotImplemented
        arrays = ("threshold", "leak", "reset", "refractory", "axonal_delay",
                  "pre", "post", "weight", "delay", "stdp")
        return (
            all(_same_bits(getattr(self, a), getattr(other, a)) for a in arrays)
            and self.behavior == other.behavior
            and dict(self.metadata) == dict(other.metadata)
        )

    __hash__ = None


@dataclass(frozen=True)
class Violation:
    kind: str
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.message}"


def validate_network(net: NetworkDef) -> list[Violation]:
    """Return every invariant violation in ``net``; an empty list means valid."""
    out: list[Violation] = []
    n = net.neuron_count

    sizes = {a: getattr(net, a).size for a in ("leak", "reset", "refractory", "axonal_delay")}
    sizes["behavior"] = len(net.behavior)
    for name, size in sizes.items():
        if size != n:
            out.append(Violation("shape", name, f"has {size} entries for {n} neurons"))
    m = net.pre.size
    for name in ("post", "weight", "delay", "stdp"):
        size = getattr(net, name).size
        if size != m:
            out.append(Violation("shape", name, f"has {size} entries for {m} synapses"))
    if out:
        return out

    def _each(mask: np.ndarray, kind: str, what: str, message: str):
        for i in np.flatnonzero(mask):
            out.append(Violation(kind, f"{what}[{i}]", message))

    _each(~np.isfinite(net.threshold), "threshold", "neuron", "threshold must be finite")
    _each(~np.isfinite(net.reset), "reset", "neuron", "reset state must be finite")
    _each(~((net.leak >= 0) | (net.leak == INFINITE)), "leak", "neuron",
          "leak must be non-negative or INFINITE")
    _each(net.refractory < 0, "refractory", "neuron", "refractory period must be >= 0")
    _each(net.axonal_delay < 0, "axonal_delay", "neuron", "axonal delay must be >= 0")
    for i, b in enumerate(net.behavior):
        if not b:
            out.append(Violation("behavior", f"neuron[{i}]", "behavior tag is empty"))

    bad_pre = (net.pre < 0) | (net.pre >= n)
    bad_post = (net.post < 0) | (net.post >= n)
    for k in np.flatnonzero(bad_pre | bad_post):
        out.append(Violation(
            "endpoint", f"synapse[{k}]",
            f"endpoint ({net.pre[k]}, {net.post[k]}) outside 0..{n - 1}",
        ))
    _each(net.delay < 1, "delay", "synapse", "delay must be >= 1")
    _each(~np.isfinite(net.weight), "weight", "synapse", "weight must be finite")

    if m > 1:
        keys = net.pre * max(n, 1) + net.post
        if not np.all(keys[1:] > keys[:-1]):
            order = np.argsort(keys, kind="stable")
            sk = keys[order]
            dup = np.flatnonzero(sk[1:] == sk[:-1]) + 1
            for k in order[dup]:
                out.append(Violation(
                    "duplicate", f"synapse[{k}]",
                    f"duplicate pair ({net.pre[k]}, {net.post[k]})",
                ))
    return out


def check_network(net: NetworkDef) -> None:
    """Raise ``ValueError`` listing the violations if ``net`` is invalid."""
    problems = validate_network(net)
    if problems:
        shown = "; ".join(str(p) for p in problems[:10])
        more = f" (+{len(problems) - 10} more)" if len(problems) > 10 else ""
        raise ValueError(f"invalid network: {shown}{more}")


@dataclass(frozen=True, eq=False)
class StimulusSchedule:
    """External input: ``amplitude`` added to the membrane of ``neuron`` at ``step``."""

    steps: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    neurons: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    amplitudes: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "steps", _frozen(self.steps, np.int64))
        object.__setattr__(self, "neurons", _frozen(self.neurons, np.int64))
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes, np.float64))
        if not (self.steps.size == self.neurons.size == self.amplitudes.size):
            raise ValueError("stimulus columns must have equal length")

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, int, float]]) -> "StimulusSchedule":
        entries = list(entries)
        if not entries:
            return cls()
        s, n, a = zip(*entries)
        return cls(s, n, a)

    @property
    def entries(self) -> list[tuple[int, int, float]]:
        return [(int(s), int(n), float(a))
                for s, n, a in zip(self.steps, self.neurons, self.amplitudes)]

    def __len__(self) -> int:
        return int(self.steps.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StimulusSchedule):
            return NotImplemented
        return (_same_bits(self.steps, other.steps) and _same_bits(self.neurons, other.neurons)
                and _same_bits(self.amplitudes, other.amplitudes))

    __hash__ = None

    def validate(self, neuron_count: int, step_count: int) -> list[Violation]:
        out = []
        for k in np.flatnonzero((self.steps < 0) | (self.steps >= step_count)):
            out.append(Violation("stimulus", f"stimulus[{k}]",
                                 f"step {self.steps[k]} outside [0, {step_count})"))
        for k in np.flatnonzero((self.neurons < 0) | (self.neurons >= neuron_count)):
            out.append(Violation("stimulus", f"stimulus[{k}]",
                                 f"neuron {self.neurons[k]} outside 0..{neuron_count - 1}"))
        return out

    def per_step(self, neuron_count: int, step_count: int) -> dict[int, np.ndarray]:
        """Dense external-input vectors keyed by the steps that have any input.

        Entries hitting the same (step, neuron) are summed in schedule order.
        """
        problems = self.validate(neuron_count, step_count)
        if problems:
            raise ValueError(f"invalid stimulus: {problems[0]}")
        out: dict[int, np.ndarray] = {}
        for t in np.unique(self.steps):
            sel = self.steps == t
            vec = np.zeros(neuron_count)
            np.add.at(vec, self.neurons[sel], self.amplitudes[sel])
            out[int(t)] = vec
        return out


@dataclass(frozen=True)
class StdpConfig:
    """Windowed pairwise STDP.

    ``a_plus[k-1]`` is the potentiation for a presynaptic spike ``k`` steps
    before a postsynaptic one; ``a_minus[k-1]`` the depression for the
    reverse order. Plastic weights are clipped to ``[w_min, w_max]``.
    """

    a_plus: tuple[float, ...]
    a_minus: tuple[float, ...]
    w_min: float = 0.0
    w_max: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a_plus", tuple(float(x) for x in self.a_plus))
        object.__setattr__(self, "a_minus", tuple(float(x) for x in self.a_minus))
        if len(self.a_plus) < 1 or len(self.a_plus) != len(self.a_minus):
            raise ValueError("a_plus and a_minus must be non-empty and of equal length")
        if any(x < 0 for x in self.a_plus + self.a_minus):
            raise ValueError("STDP amplitudes must be non-negative")
        if not self.w_min <= self.w_max:
            raise ValueError("w_min must not exceed w_max")

    @property
    def window(self) -> int:
        return len(self.a_plus)

    @classmethod
    def exponential(
        cls,
        window: int = 20,
        a_plus: float = 0.01,
        a_minus: float = 0.012,
        tau_plus: float = 5.0,
        tau_minus: float = 5.0,
        w_min: float = 0.0,
        w_max: float = 1.0,
    ) -> "StdpConfig":
        k = np.arange(1, window + 1)
        return cls(
            a_plus=tuple(a_plus * np.exp(-k / tau_plus)),
            a_minus=tuple(a_minus * np.exp(-k / tau_minus)),
            w_min=w_min,
            w_max=w_max,
        )


@dataclass(frozen=True)
class SimulationConfig:
    steps: int
    seed: int = 0
    stdp: StdpConfig | None = None
    record_membrane: bool = False

    def __post_init__(self):
        if int(self.steps) < 1:
            raise ValueError("steps must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class SpikeRaster:
    """Spike events sorted by (step, neuron id), without duplicates."""

    steps: np.ndarray
    neurons: np.ndarray
    neuron_count: int
    step_count: int

    def __post_init__(self):
        steps = np.asarray(self.steps, dtype=np.int64).reshape(-1)
        neurons = np.asarray(self.neurons, dtype=np.int64).reshape(-1)
        if steps.size != neurons.size:
            raise ValueError("steps and neurons must have equal length")
        if steps.size:
            order = np.lexsort((neurons, steps))
            steps, neurons = steps[order], neurons[order]
            keep = np.ones(steps.size, bool)
            keep[1:] = (steps[1:] != steps[:-1]) | (neurons[1:] != neurons[:-1])
            steps, neurons = steps[keep], neurons[keep]
        object.__setattr__(self, "steps", _frozen(steps, np.int64))
        object.__setattr__(self, "neurons", _frozen(neurons, np.int64))

    @classmethod
    def from_events(cls, events: Iterable[tuple[int, int]], neuron_count: int,
                    step_count: int) -> "SpikeRaster":
        events = list(events)
        if not events:
            return cls(np.zeros(0, np.int64), np.zeros(0, np.int64), neuron_count, step_count)
        s, n = zip(*events)
        return cls(s, n, neuron_count, step_count)

    @property
    def events(self) -> list[tuple[int, int]]:
        return list(zip(self.steps.tolist(), self.neurons.tolist()))

    def __len__(self) -> int:
        return int(self.steps.size)

    def restrict(self, ids) -> "SpikeRaster":
        """Events of the neurons in ``ids`` only (counts are kept)."""
        ids = np.asarray(sorted(ids) if isinstance(ids, (set, frozenset)) else ids,
                         dtype=np.int64)
        keep = np.isin(self.neurons, ids)
        return SpikeRaster(self.steps[keep], self.neurons[keep], self.neuron_count,
                           self.step_count)

    def spikes_of(self, neuron: int) -> np.ndarray:
        return self.steps[self.neurons == neuron]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpikeRaster):
            return NotImplemented
        return raster_equal(self, other)

    __hash__ = None

    def __repr__(self) -> str:
        head = self.events[:6]
        tail = ", ..." if len(self) > 6 else ""
        return (f"SpikeRaster({len(self)} events, neurons={self.neuron_count}, "
                f"steps={self.step_count}: {head}{tail})")


def raster_equal(a: SpikeRaster, b: SpikeRaster, restrict_to=None) -> bool:
    """True iff the event sets of ``a`` and ``b`` match, optionally only over ``restrict_to``."""
    if restrict_to is not None:
        a, b = a.restrict(restrict_to), b.restrict(restrict_to)
    return np.array_equal(a.steps, b.steps) and np.array_equal(a.neurons, b.neurons)


def first_divergence(a: SpikeRaster, b: SpikeRaster):
    """Earliest event present in exactly one raster, as ``(step, neuron, in_a)``; None if equal."""
    n = max(a.neuron_count, b.neuron_count, int(a.neurons.max(initial=-1)) + 1,
            int(b.neurons.max(initial=-1)) + 1, 1)
    ka = a.steps * n + a.neurons
    kb = b.steps * n + b.neurons
    only_a = np.setdiff1d(ka, kb, assume_unique=True)
    only_b = np.setdiff1d(kb, ka, assume_unique=True)
    candidates = []
    if only_a.size:
        candidates.append((int(only_a.min()), True))
    if only_b.size:
        candidates.append((int(only_b.min()), False))
    if not candidates:
        return None
    key, in_a = min(candidates)
    return key // n, key % n, in_a


@dataclass
class RunResult:
    """Output of a backend run.

    ``elapsed`` covers the step loop only; setup such as building the weight
    matrix or the agent world is excluded.
    """

    raster: SpikeRaster
    elapsed: float
    membrane: np.ndarray | None = None
    weights: np.ndarray | None = None
