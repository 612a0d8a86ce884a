"""Command-line entry point: ``spikeforge {run,gen,lower,compare,bench}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import formats
from .backends import BACKENDS, check_backend, needs_lowering, simulate
from .bench import format_table, run_bench
from .lowering import lower_delays
from .model import SimulationConfig, StimulusSchedule, first_divergence
from .netgen import BenchScenario, build_scenario

SEED_ENV = "SPIKEFORGE_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV}={raw!r} is not an integer")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _backend_list(text: str) -> list[str]:
    names = [x.strip() for x in text.split(",") if x.strip()]
    bad = [x for x in names if x not in BACKENDS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown backend(s) {bad}; choose from {', '.join(BACKENDS)}")
    return names


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _load_inputs(args):
    net = formats.read_network(args.network)
    stim = formats.read_stimulus(args.stimulus) if args.stimulus else StimulusSchedule()
    return net, stim


def cmd_run(args) -> int:
    net, stim = _load_inputs(args)
    stdp = formats.read_stdp(args.stdp) if args.stdp else None
    cfg = SimulationConfig(steps=args.steps, seed=args.seed, stdp=stdp)
    check_backend(net, args.backend, cfg)
    if args.backend == "mat" and needs_lowering(net):
        print("notice: network has delays > 1; lowering to proxy neurons for the mat backend",
              file=sys.stderr)
    result = simulate(net, cfg, stim, args.backend)
    formats.write_raster(result.raster, args.out)
    print(f"backend={args.backend} steps={args.steps} spikes={len(result.raster)} "
          f"wall_time_seconds={result.elapsed:.6f}")
    return 0


def cmd_gen(args) -> int:
    scenario = BenchScenario(args.neurons, args.prob, steps=args.steps, amplitude=args.amplitude,
                             seed=args.seed)
    net, _, stim = build_scenario(scenario)
    formats.write_network(net, args.network_out)
    if args.stimulus_out:
        formats.write_stimulus(stim, args.stimulus_out)
    print(f"neurons={net.neuron_count} synapses={net.synapse_count} stimulus_entries={len(stim)}")
    return 0


def cmd_lower(args) -> int:
    net = formats.read_network(args.network)
    lowered = lower_delays(net)
    formats.write_network(lowered.net, args.out)
    print(f"original_neurons={lowered.original_count} proxies={lowered.proxy_total} "
          f"synapses={lowered.net.synapse_count}")
    return 0


def cmd_compare(args) -> int:
    if len(args.backends) < 2:
        raise ValueError("compare needs at least two backends")
    net, stim = _load_inputs(args)
    cfg = SimulationConfig(steps=args.steps, seed=args.seed)
    for b in args.backends:
        check_backend(net, b, cfg)
    rasters = {b: simulate(net, cfg, stim, b).raster for b in args.backends}
    ref_name = args.backends[0]
    ref = rasters[ref_name]
    identical = True
    for name in args.backends[1:]:
        div = first_divergence(ref, rasters[name])
        if div is None:
            continue
        identical = False
        step, neuron, in_ref = div
        has, lacks = (ref_name, name) if in_ref else (name, ref_name)
        print(f"divergence {ref_name} vs {name}: step {step} neuron {neuron} "
              f"spikes in {has} but not in {lacks}")
    if identical:
        print("identical")
        return 0
    return 1


def cmd_bench(args) -> int:
    rows = run_bench(
        sizes=args.sizes,
        probs=args.probs,
        steps=args.steps,
        backends=args.backends,
        seed=args.seed,
        amplitude=args.amplitude,
        timeout=args.timeout,
        parallel=args.parallel,
    )
    if args.out:
        formats.write_bench(rows, args.out)
    print(format_table(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spikeforge", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    p = sub.add_parser("run", help="simulate a network and write its spike raster")
    p.add_argument("--network", required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--backend", choices=BACKENDS, default="mat")
    p.add_argument("--stimulus")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--out", required=True)
    p.add_argument("--stdp", help="JSON STDP settings (mat backend only)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="generate a benchmark network and stimulus")
    p.add_argument("--neurons", type=_positive_int, required=True)
    p.add_argument("--prob", type=float, required=True)
    p.add_argument("--steps", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--amplitude", type=float, default=None,
                   help="stimulus amplitude (default: threshold + 1)")
    p.add_argument("--network-out", required=True)
    p.add_argument("--stimulus-out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("lower", help="replace delayed synapses with proxy-neuron chains")
    p.add_argument("--network", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("compare", help="run several backends and diff their rasters")
    p.add_argument("--network", required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--stimulus")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--backends", type=_backend_list, default=list(BACKENDS))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="time backends over a grid of random networks")
    p.add_argument("--sizes", type=_int_list, default=[100, 1000])
    p.add_argument("--probs", type=_float_list, default=[0.25, 0.5, 0.75, 1.0])
    p.add_argument("--steps", type=_positive_int, default=1000)
    p.add_argument("--backends", type=_backend_list, default=["mat", "abm"])
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--amplitude", type=float, default=None,
                   help="stimulus amplitude (default: threshold + 1)")
    p.add_argument("--timeout", type=float, default=None,
                   help="per-cell budget in seconds; exceeded cells are recorded as 'timeout'")
    p.add_argument("--parallel", action="store_true", help="run cells concurrently")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (formats.FormatError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
