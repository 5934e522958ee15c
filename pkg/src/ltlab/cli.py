"""Command-line front end.

Subcommands: simulate (Monte-Carlo experiments, CSV output), encode / decode
(file fountain coding), dist (inspect a degree distribution), capacity
(channel capacity numbers).  Exit status: 0 success, 1 decode
failure/incomplete, 2 invalid configuration or format error.
"""

from __future__ import annotations

import argparse
import sys

from .channels import Channel, biawgn_capacity, bsc_capacity
from .distributions import analytic_symbol_bound, mean_degree
from .fileio import StreamFormatError, decode_file, encode_file
from .harness import (
    ConfigError,
    DistributionSpec,
    ExperimentConfig,
    emit_results,
    format_decimal,
    run_experiment,
)

EXIT_OK = 0
EXIT_DECODE_FAILURE = 1
EXIT_BAD_CONFIG = 2


def _parse_channel(text: str) -> Channel:
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "perfect" and len(parts) == 1:
            return Channel.perfect()
        if kind == "erasure" and len(parts) == 2:
            return Channel.erasure(float(parts[1]))
        if kind == "bsc" and len(parts) == 3 and parts[2] in ("blind", "discard"):
            return Channel.bsc(float(parts[1]), discard=parts[2] == "discard")
        if kind == "awgn" and len(parts) == 2:
            return Channel.biawgn(float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"bad channel spec {text!r}: {exc}") from exc
    raise ConfigError(
        f"bad channel spec {text!r}; expected perfect, erasure:EPS, "
        "bsc:P:blind, bsc:P:discard or awgn:DB"
    )


def _dist_spec(args) -> DistributionSpec:
    return DistributionSpec(kind=args.dist, c=args.c, delta=args.delta)


def _add_dist_flags(parser, required=True):
    parser.add_argument(
        "--dist", choices=("ideal", "rsol", "table"), required=required,
        help="degree distribution",
    )
    parser.add_argument("--c", type=float, default=0.1, help="robust soliton c")
    parser.add_argument("--delta", type=float, default=0.5, help="robust soliton delta")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltlab", description="LT fountain-code library and channel testbed"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo experiment, emit CSVs")
    sim.add_argument("--k", type=int, required=True)
    sim.add_argument("--symbol-bits", type=int, default=1)
    _add_dist_flags(sim)
    sim.add_argument("--channel", type=_parse_channel, required=True)
    sim.add_argument("--decoder", choices=("peel", "bp"), default="peel")
    sim.add_argument("--max-iters", type=int, default=100)
    sim.add_argument("--trials", type=int, required=True)
    sim.add_argument("--seed", type=lambda s: int(s, 0), required=True)
    sim.add_argument("--n-start", type=int, default=None)
    sim.add_argument("--n-step", type=int, default=None)
    sim.add_argument("--n-max", type=int, default=None)
    sim.add_argument("--out", required=True, help="output directory for CSV files")

    enc = sub.add_parser("encode", help="fountain-encode a file into a packet stream")
    enc.add_argument("--in", dest="in_path", required=True)
    enc.add_argument("--out", dest="out_path", required=True)
    enc.add_argument("--k", type=int, required=True)
    enc.add_argument("--symbol-bits", type=int, default=64)
    _add_dist_flags(enc)
    enc.add_argument("--expansion", type=float, required=True)

    dec = sub.add_parser("decode", help="decode a packet stream back to a file")
    dec.add_argument("--in", dest="in_path", required=True)
    dec.add_argument("--out", dest="out_path", required=True)

    dst = sub.add_parser("dist", help="print a degree distribution as CSV")
    dst.add_argument("--k", type=int, required=True)
    dst.add_argument("dist", choices=("ideal", "rsol", "table"))
    dst.add_argument("--c", type=float, default=0.1)
    dst.add_argument("--delta", type=float, default=0.5)

    cap = sub.add_parser("capacity", help="print a channel capacity")
    cap.add_argument("channel", help="bsc:P or awgn:DB")
    return parser


def _cmd_simulate(args) -> int:
    cfg = ExperimentConfig(
        k=args.k,
        symbol_bits=args.symbol_bits,
        dist=_dist_spec(args),
        channel=args.channel,
        decoder=args.decoder,
        max_iters=args.max_iters,
        trials=args.trials,
        master_seed=args.seed,
        n_start=args.n_start,
        n_step=args.n_step,
        n_max=args.n_max,
    )
    cfg.validate()
    summary, records = run_experiment(cfg)
    emit_results(cfg, summary, records, args.out)
    mean = format_decimal(summary.mean_k_prime) or "n/a"
    print(
        f"k={cfg.k} dist={cfg.dist.label()} channel={cfg.channel.label()} "
        f"decoder={cfg.decoder} trials={cfg.trials} mean_k_prime={mean} "
        f"completion_rate={format_decimal(summary.completion_rate)}"
    )
    return EXIT_OK


def _cmd_encode(args) -> int:
    with open(args.in_path, "rb") as f:
        data = f.read()
    stream = encode_file(data, args.k, args.symbol_bits, _dist_spec(args), args.expansion)
    with open(args.out_path, "wb") as f:
        f.write(stream)
    print(f"encoded {len(data)} bytes into {len(stream)} stream bytes")
    return EXIT_OK


def _cmd_decode(args) -> int:
    with open(args.in_path, "rb") as f:
        stream = f.read()
    result = decode_file(stream)
    if not result.ok:
        for index in sorted(result.unrecovered_per_block):
            count = result.unrecovered_per_block[index]
            print(f"block {index}: {count} symbols unrecovered", file=sys.stderr)
        print("decode failed", file=sys.stderr)
        return EXIT_DECODE_FAILURE
    with open(args.out_path, "wb") as f:
        f.write(result.data)
    print(f"decoded {len(result.data)} bytes")
    return EXIT_OK


def _cmd_dist(args) -> int:
    spec = DistributionSpec(kind=args.dist, c=args.c, delta=args.delta)
    params, dist = spec.build(args.k)
    print(f"# distribution={spec.label()} k={args.k}")
    print(f"# mean_degree={format_decimal(mean_degree(dist))}")
    if params is not None:
        print(f"# R={format_decimal(params.R)}")
        print(f"# beta={format_decimal(params.beta)}")
        print(f"# spike_degree={params.spike_degree}")
        print(f"# analytic_bound={format_decimal(analytic_symbol_bound(params))}")
    print("degree,probability")
    for d, p in zip(dist.degrees, dist.probabilities):
        print(f"{d},{format_decimal(p)}")
    return EXIT_OK


def _cmd_capacity(args) -> int:
    parts = args.channel.split(":")
    if len(parts) == 2 and parts[0] == "bsc":
        value = bsc_capacity(float(parts[1]))
    elif len(parts) == 2 and parts[0] == "awgn":
        value = biawgn_capacity(float(parts[1]))
    else:
        raise ConfigError(f"bad capacity spec {args.channel!r}; expected bsc:P or awgn:DB")
    print(format_decimal(value))
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "dist": _cmd_dist,
    "capacity": _cmd_capacity,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except StreamFormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
