"""File formats: JSON networks, CSV stimuli / rasters / benchmark results, JSON STDP settings.

Every writer is a deterministic function of its input (fixed key order,
shortest round-trip float rendering, ``\\n`` line endings), so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import IO, Union

import numpy as np

from .model import (
    INFINITE,
    NetworkDef,
    SpikeRaster,
    StdpConfig,
    StimulusSchedule,
    validate_network,
)

FORMAT_VERSION = 1
RASTER_HEADER = "step,neuron_id"
STIMULUS_HEADER = "step,neuron_id,amplitude"
BENCH_HEADER = "backend,neurons,connection_probability,steps,wall_time_seconds,spike_count,seed"
TIMEOUT_MARK = "timeout"

Source = Union[str, bytes, os.PathLike, IO]


class FormatError(ValueError):
    """Malformed or invalid file content; the message says where."""


def _read_text(data) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8")
    if isinstance(data, str):
        return data
    return data.read()


def _num(x: float) -> str:
    x = float(x)
    if x == INFINITE:
        return '"inf"'
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite number {x}")
    return repr(x)


# -- networks -----------------------------------------------------------------

def network_to_json(net: NetworkDef) -> str:
    lines = ["{", f'  "version": {FORMAT_VERSION},', '  "neurons": [']
    n = net.neuron_count
    for i in range(n):
        leak = float(net.leak[i])
        leak_txt = '"inf"' if leak == INFINITE else _num(leak)
        lines.append(
            f'    {{"threshold": {_num(net.threshold[i])}, "leak": {leak_txt}, '
            f'"reset": {_num(net.reset[i])}, "refractory": {int(net.refractory[i])}, '
            f'"axonal_delay": {int(net.axonal_delay[i])}, '
            f'"behavior": {json.dumps(net.behavior[i])}}}' + ("," if i < n - 1 else "")
        )
    lines.append("  ],")
    lines.append('  "synapses": [')
    m = net.synapse_count
    pre, post, w = net.pre.tolist(), net.post.tolist(), net.weight.tolist()
    d, st = net.delay.tolist(), net.stdp.tolist()
    for k in range(m):
        lines.append(
            f'    {{"pre": {pre[k]}, "post": {post[k]}, "weight": {_num(w[k])}, '
            f'"delay": {d[k]}, "stdp": {"true" if st[k] else "false"}}}'
            + ("," if k < m - 1 else "")
        )
    lines.append("  ],")
    meta = json.dumps(dict(sorted(net.metadata.items())), ensure_ascii=False)
    lines.append(f'  "metadata": {meta}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _expect_number(value, where: str, *, allow_inf: bool = False) -> float:
    if allow_inf and value == "inf":
        return INFINITE
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _expect_int(value, where: str, *, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise FormatError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise FormatError(f"{where}: must be >= {minimum}, got {value}")
    return value


def parse_network(data) -> NetworkDef:
    """Parse and validate a network document (text, bytes or a readable file)."""
    text = _read_text(data)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError("top level: expected a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError(f"version: expected {FORMAT_VERSION}, got {doc.get('version')!r}")
    neurons = doc.get("neurons")
    synapses = doc.get("synapses", [])
    metadata = doc.get("metadata", {})
    if not isinstance(neurons, list):
        raise FormatError("neurons: expected a list")
    if not isinstance(synapses, list):
        raise FormatError("synapses: expected a list")
    if not isinstance(metadata, dict) or not all(isinstance(v, str) for v in metadata.values()):
        raise FormatError("metadata: expected an object of string values")

    cols = {k: [] for k in ("threshold", "leak", "reset", "refractory", "axonal_delay", "behavior")}
    for i, nd in enumerate(neurons):
        where = f"neurons[{i}]"
        if not isinstance(nd, dict):
            raise FormatError(f"{where}: expected an object")
        unknown = set(nd) - set(cols)
        if unknown:
            raise FormatError(f"{where}: unknown field(s) {sorted(unknown)}")
        if "threshold" not in nd:
            raise FormatError(f"{where}.threshold: missing")
        cols["threshold"].append(_expect_number(nd["threshold"], f"{where}.threshold"))
        leak = _expect_number(nd.get("leak", 0.0), f"{where}.leak", allow_inf=True)
        if leak < 0:
            raise FormatError(f"{where}.leak: must be >= 0 or \"inf\", got {leak}")
        cols["leak"].append(leak)
        cols["reset"].append(_expect_number(nd.get("reset", 0.0), f"{where}.reset"))
        cols["refractory"].append(
            _expect_int(nd.get("refractory", 0), f"{where}.refractory", minimum=0))
        cols["axonal_delay"].append(
            _expect_int(nd.get("axonal_delay", 0), f"{where}.axonal_delay", minimum=0))
        behavior = nd.get("behavior", "lif")
        if not isinstance(behavior, str) or not behavior:
            raise FormatError(f"{where}.behavior: expected a non-empty string")
        cols["behavior"].append(behavior)

    scols = {k: [] for k in ("pre", "post", "weight", "delay", "stdp")}
    for k, sd in enumerate(synapses):
        where = f"synapses[{k}]"
        if not isinstance(sd, dict):
            raise FormatError(f"{where}: expected an object")
        unknown = set(sd) - set(scols)
        if unknown:
            raise FormatError(f"{where}: unknown field(s) {sorted(unknown)}")
        for key in ("pre", "post"):
            if key not in sd:
                raise FormatError(f"{where}.{key}: missing")
            scols[key].append(_expect_int(sd[key], f"{where}.{key}"))
        scols["weight"].append(_expect_number(sd.get("weight", 1.0), f"{where}.weight"))
        scols["delay"].append(_expect_int(sd.get("delay", 1), f"{where}.delay", minimum=1))
        stdp = sd.get("stdp", False)
        if not isinstance(stdp, bool):
            raise FormatError(f"{where}.stdp: expected true or false")
        scols["stdp"].append(stdp)

    net = NetworkDef(
        threshold=np.array(cols["threshold"], dtype=np.float64),
        leak=np.array(cols["leak"], dtype=np.float64),
        reset=np.array(cols["reset"], dtype=np.float64),
        refractory=np.array(cols["refractory"], dtype=np.int64),
        axonal_delay=np.array(cols["axonal_delay"], dtype=np.int64),
        behavior=cols["behavior"],
        pre=np.array(scols["pre"], dtype=np.int64),
        post=np.array(scols["post"], dtype=np.int64),
        weight=np.array(scols["weight"], dtype=np.float64),
        delay=np.array(scols["delay"], dtype=np.int64),
        stdp=np.array(scols["stdp"], dtype=bool),
        metadata=metadata,
    )
    problems = validate_network(net)
    if problems:
        raise FormatError("; ".join(str(p) for p in problems[:10]))
    return net


def write_network(net: NetworkDef, path) -> None:
    _write_text(path, network_to_json(net))


def read_network(path) -> NetworkDef:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# -- CSV helpers ----------------------------------------------------------------

def _write_text(sink, text: str) -> None:
    if hasattr(sink, "write"):
        sink.write(text)
        return
    with open(sink, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _rows(data, header: str):
    text = _read_text(data)
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise FormatError(f"line 1: missing header {header!r}") from None
    if ",".join(first) != header:
        raise FormatError(f"line 1: expected header {header!r}, got {','.join(first)!r}")
    width = header.count(",") + 1
    for row in reader:
        if not row:
            continue
        if len(row) != width:
            raise FormatError(f"line {reader.line_num}: expected {width} fields, got {len(row)}")
        yield reader.line_num, row


def _int_field(text: str, line: int, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"line {line}: {name} {text!r} is not an integer") from None


def _float_field(text: str, line: int, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"line {line}: {name} {text!r} is not a number") from None


# -- rasters --------------------------------------------------------------------

def raster_to_csv(r: SpikeRaster) -> str:
    body = "".join(f"{s},{n}\n" for s, n in zip(r.steps.tolist(), r.neurons.tolist()))
    return RASTER_HEADER + "\n" + body


def write_raster(r: SpikeRaster, sink) -> None:
    _write_text(sink, raster_to_csv(r))


def parse_raster(data, neuron_count: int | None = None, step_count: int | None = None) -> SpikeRaster:
    """Parse raster CSV. Missing counts are inferred as one past the largest id / step."""
    steps, ids = [], []
    prev = None
    for line, (s, n) in _rows(data, RASTER_HEADER):
        key = (_int_field(s, line, "step"), _int_field(n, line, "neuron_id"))
        if key[0] < 0 or key[1] < 0:
            raise FormatError(f"line {line}: negative step or neuron id")
        if prev is not None and key <= prev:
            raise FormatError(f"line {line}: rows must be strictly sorted by (step, neuron_id)")
        prev = key
        steps.append(key[0])
        ids.append(key[1])
    if neuron_count is None:
        neuron_count = max(ids, default=-1) + 1
    if step_count is None:
        step_count = max(steps, default=-1) + 1
    if ids and (max(ids) >= neuron_count or max(steps) >= step_count):
        raise FormatError("raster events exceed the declared neuron or step count")
    return SpikeRaster(np.array(steps, np.int64), np.array(ids, np.int64), neuron_count, step_count)


def read_raster(path, neuron_count: int | None = None, step_count: int | None = None) -> SpikeRaster:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_raster(fh.read(), neuron_count, step_count)


# -- stimuli --------------------------------------------------------------------

def stimulus_to_csv(stim: StimulusSchedule) -> str:
    body = "".join(
        f"{s},{n},{_num(a)}\n"
        for s, n, a in zip(stim.steps.tolist(), stim.neurons.tolist(), stim.amplitudes.tolist())
    )
    return STIMULUS_HEADER + "\n" + body


def write_stimulus(stim: StimulusSchedule, sink) -> None:
    _write_text(sink, stimulus_to_csv(stim))


def parse_stimulus(data) -> StimulusSchedule:
    entries = []
    for line, (s, n, a) in _rows(data, STIMULUS_HEADER):
        amp = _float_field(a, line, "amplitude")
        if not math.isfinite(amp):
            raise FormatError(f"line {line}: amplitude must be finite")
        entries.append((_int_field(s, line, "step"), _int_field(n, line, "neuron_id"), amp))
    return StimulusSchedule.from_entries(entries)


def read_stimulus(path) -> StimulusSchedule:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_stimulus(fh.read())


# -- benchmark results ----------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    backend: str
    neurons: int
    connection_probability: float
    steps: int
    wall_time_seconds: float | None  # None: the cell hit its timeout
    spike_count: int | None
    seed: int

    @property
    def timed_out(self) -> bool:
        return self.wall_time_seconds is None


def bench_to_csv(rows, *, include_timing: bool = True) -> str:
    out = [BENCH_HEADER]
    for r in rows:
        if r.wall_time_seconds is None:
            wall = TIMEOUT_MARK
        elif include_timing:
            wall = repr(float(r.wall_time_seconds))
        else:
            wall = ""
        spikes = "" if r.spike_count is None else str(r.spike_count)
        out.append(f"{r.backend},{r.neurons},{_num(r.connection_probability)},{r.steps},"
                   f"{wall},{spikes},{r.seed}")
    return "\n".join(out) + "\n"


def write_bench(rows, sink) -> None:
    _write_text(sink, bench_to_csv(rows))


def parse_bench(data) -> list[BenchRow]:
    rows = []
    for line, (backend, n, p, steps, wall, spikes, seed) in _rows(data, BENCH_HEADER):
        if wall == TIMEOUT_MARK:
            wall_v = None
        else:
            wall_v = _float_field(wall, line, "wall_time_seconds")
            if not wall_v > 0:
                raise FormatError(f"line {line}: wall_time_seconds must be positive")
        rows.append(BenchRow(
            backend=backend,
            neurons=_int_field(n, line, "neurons"),
            connection_probability=_float_field(p, line, "connection_probability"),
            steps=_int_field(steps, line, "steps"),
            wall_time_seconds=wall_v,
            spike_count=None if spikes == "" else _int_field(spikes, line, "spike_count"),
            seed=_int_field(seed, line, "seed"),
        ))
    return rows


def read_bench(path) -> list[BenchRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_bench(fh.read())


# -- STDP settings --------------------------------------------------------------

def parse_stdp(data) -> StdpConfig:
    """STDP settings as JSON.

    Either explicit per-offset vectors ``{"a_plus": [...], "a_minus": [...]}``
    or the exponential form ``{"window", "A_plus", "A_minus", "tau_plus",
    "tau_minus"}``; both accept ``w_min`` / ``w_max``. Missing keys take the
    library defaults.
    """
    try:
        doc = json.loads(_read_text(data))
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError("top level: expected a JSON object")
    try:
        bounds = {k: float(doc[k]) for k in ("w_min", "w_max") if k in doc}
        if "a_plus" in doc or "a_minus" in doc:
            return StdpConfig(a_plus=doc["a_plus"], a_minus=doc["a_minus"], **bounds)
        exp_keys = {"window": "window", "A_plus": "a_plus", "A_minus": "a_minus",
                    "tau_plus": "tau_plus", "tau_minus": "tau_minus"}
        unknown = set(doc) - set(exp_keys) - {"w_min", "w_max"}
        if unknown:
            raise FormatError(f"unknown STDP field(s) {sorted(unknown)}")
        kwargs = {exp_keys[k]: doc[k] for k in exp_keys if k in doc}
        return StdpConfig.exponential(**kwargs, **bounds)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"invalid STDP settings: {exc}") from None


def read_stdp(path) -> StdpConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_stdp(fh.read())
