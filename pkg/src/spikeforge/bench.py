"""Benchmark harness: run backends over a grid of random-network scenarios and time them."""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor

from .backends import prepare
from .formats import BenchRow
from .mat import SimulationTimeout
from .netgen import BENCH_PROBS, BenchScenario, build_scenario

log = logging.getLogger(__name__)


def run_cell(scenario: BenchScenario, backends, timeout: float | None = None) -> list[BenchRow]:
    """Build one scenario and time each backend on it.

    Generation and per-backend setup are outside the timed region; only the
    step loop counts.
    """
    net, cfg, stim = build_scenario(scenario)
    rows = []
    for backend in backends:
        run = prepare(net, cfg, stim, backend)
        try:
            result = run(timeout)
        except SimulationTimeout as exc:
            log.warning("%s n=%d p=%g timed out after %.1fs", backend, scenario.neuron_count,
                        scenario.connection_probability, exc.elapsed)
            wall, spikes = None, None
        else:
            wall, spikes = max(result.elapsed, 1e-9), len(result.raster)
        rows.append(BenchRow(backend, scenario.neuron_count, scenario.connection_probability,
                             scenario.steps, wall, spikes, scenario.seed))
        del run
    return rows


def run_bench(
    sizes=(100, 1000),
    probs=BENCH_PROBS,
    steps: int = 1000,
    backends=("mat", "abm"),
    seed: int = 0,
    amplitude: float | None = None,
    timeout: float | None = None,
    parallel: bool = False,
) -> list[BenchRow]:
    """Rows ordered by size, then probability, then the given backend order."""
    scenarios = [BenchScenario(n, p, steps=steps, amplitude=amplitude, seed=seed)
                 for n in sizes for p in probs]
    if parallel:
        warnings.warn("cells run concurrently; wall times include interference", stacklevel=2)
        with ThreadPoolExecutor() as pool:
            chunks = list(pool.map(lambda s: run_cell(s, backends, timeout), scenarios))
    else:
        chunks = [run_cell(s, backends, timeout) for s in scenarios]
    return [row for chunk in chunks for row in chunk]


def format_table(rows) -> str:
    """Times in a backend-by-(size, probability) grid; timed-out cells read "> limit"."""
    sizes = sorted({r.neurons for r in rows})
    probs = sorted({r.connection_probability for r in rows})
    backends = list(dict.fromkeys(r.backend for r in rows))
    cell = {(r.backend, r.neurons, r.connection_probability): r for r in rows}
    cols = [(n, p) for n in sizes for p in probs]

    width = 9
    head1 = "Number of neurons".ljust(24) + "".join(
        str(n).center(width * len(probs)) + " |" for n in sizes)
    head2 = "Connection probability".ljust(24) + "".join(
        "".join(f"{p:.2f}".rjust(width) for p in probs) + " |" for _ in sizes)
    lines = [head1, head2, "-" * len(head2)]
    for b in backends:
        parts = []
        for i, (n, p) in enumerate(cols):
            r = cell.get((b, n, p))
            if r is None:
                txt = "-"
            elif r.timed_out:
                txt = "> limit"
            else:
                txt = f"{r.wall_time_seconds:.2f}"
            parts.append(txt.rjust(width))
            if (i + 1) % len(probs) == 0:
                parts.append(" |")
        lines.append(b.upper().ljust(24) + "".join(parts))
    return "\n".join(lines)
