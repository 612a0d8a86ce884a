"""Rewrite delayed synapses as chains of relay ("proxy") neurons with unit delays."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import DEFAULT_BEHAVIOR, INFINITE, NetworkDef, check_network

__all__ = ["LoweredNetwork", "lower_delays", "proxy_count", "PROXY_PARAMS"]

# threshold, leak, reset, refractory of every proxy neuron
PROXY_PARAMS = (0.0, INFINITE, 0.0, 0)


@dataclass(frozen=True, eq=False)
class LoweredNetwork:
    """Unit-delay network plus the bookkeeping that maps proxies back to synapses.

    ``proxy_pre[k]``, ``proxy_post[k]`` and ``proxy_position[k]`` describe
    neuron ``original_count + k``: the original synapse it relays for and its
    1-based place in that synapse's chain.
    """

    net: NetworkDef
    original_count: int
    proxy_pre: np.ndarray
    proxy_post: np.ndarray
    proxy_position: np.ndarray

    @property
    def proxy_total(self) -> int:
        return int(self.proxy_pre.size)

    @property
    def proxy_map(self) -> dict[int, tuple[int, int, int]]:
        base = self.original_count
        return {
            base + k: (int(a), int(b), int(c))
            for k, (a, b, c) in enumerate(zip(self.proxy_pre, self.proxy_post, self.proxy_position))
        }

    @property
    def original_ids(self) -> np.ndarray:
        return np.arange(self.original_count)


def _effective_delays(net: NetworkDef) -> np.ndarray:
    return net.delay + net.axonal_delay[net.pre] if net.synapse_count else net.delay.copy()


def proxy_count(net: NetworkDef) -> int:
    """Number of proxy neurons :func:`lower_delays` would add to ``net``."""
    return int(np.maximum(_effective_delays(net) - 1, 0).sum())


def lower_delays(net: NetworkDef) -> LoweredNetwork:
    """Fold axonal delays into synapses, then expand every delay-d synapse into d unit hops.

    A synapse ``i -> j`` with weight ``w`` and effective delay ``d > 1`` becomes
    ``i -> p1 -> ... -> p(d-1) -> j``. Hops into proxies carry weight 1; the
    final hop carries ``w``, so a sub-threshold weight is still delivered intact
    rather than being swallowed by a proxy's zero threshold. Only the final hop
    keeps the synapse's STDP flag.
    """
    check_network(net)
    n = net.neuron_count
    d = _effective_delays(net)
    extra = np.maximum(d - 1, 0)
    hops = extra + 1
    total = int(hops.sum())

    syn = np.repeat(np.arange(net.synapse_count), hops)
    starts = np.cumsum(hops) - hops
    pos = np.arange(total) - np.repeat(starts, hops)
    first_proxy = n + np.cumsum(extra) - extra
    last = pos == extra[syn]

    src = np.where(pos == 0, net.pre[syn], first_proxy[syn] + pos - 1)
    dst = np.where(last, net.post[syn], first_proxy[syn] + pos)
    weight = np.where(last, net.weight[syn], 1.0)
    stdp = net.stdp[syn] & last

    n_proxy = int(extra.sum())
    proxy_syn = np.repeat(np.arange(net.synapse_count), extra)
    proxy_position = np.arange(n_proxy) - np.repeat(np.cumsum(extra) - extra, extra) + 1

    thr, leak, reset, refr = PROXY_PARAMS
    metadata = dict(net.metadata)
    metadata["original_count"] = str(n)
    metadata["proxy_map"] = json.dumps(
        [[n + k, int(net.pre[s]), int(net.post[s]), int(p)]
         for k, (s, p) in enumerate(zip(proxy_syn, proxy_position))],
        separators=(",", ":"),
    )

    lowered = NetworkDef(
        threshold=np.concatenate([net.threshold, np.full(n_proxy, thr)]),
        leak=np.concatenate([net.leak, np.full(n_proxy, leak)]),
        reset=np.concatenate([net.reset, np.full(n_proxy, reset)]),
        refractory=np.concatenate([net.refractory, np.full(n_proxy, refr, dtype=np.int64)]),
        axonal_delay=np.zeros(n + n_proxy, dtype=np.int64),
        behavior=net.behavior + (DEFAULT_BEHAVIOR,) * n_proxy,
        pre=src,
        post=dst,
        weight=weight,
        delay=np.ones(total, dtype=np.int64),
        stdp=stdp,
        metadata=metadata,
    )
    return LoweredNetwork(
        net=lowered,
        original_count=n,
        proxy_pre=net.pre[proxy_syn],
        proxy_post=net.post[proxy_syn],
        proxy_position=proxy_position,
    )
