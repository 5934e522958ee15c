"""Monte-Carlo experiment orchestration: decode curves, k' statistics, CSV output.

A trial generates a random message block, encodes with consecutive keys
starting at 0, pushes every symbol through the configured channel, and feeds
non-erased receptions to the configured decoder.  n_used counts the symbols
actually used in decoding (non-erased receptions), which is the x-axis of
every decode curve.  (cfg, master_seed) fully determine every trial and
every CSV byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .channels import Channel, bsc_llr, transmit
from .codec import MessageBlock, encode_symbol
from .decoding import PeelingDecoder, SoftBPDecoder
from .distributions import (
    DegreeDistribution,
    RobustSolitonParams,
    analytic_symbol_bound,
    ideal_soliton,
    robust_soliton,
    shokrollahi_table,
)
from .prng import MASK64, KeyedRandom, stream_seed

__all__ = [
    "ConfigError",
    "DistributionSpec",
    "ExperimentConfig",
    "TrialRecord",
    "ExperimentSummary",
    "run_trial",
    "run_experiment",
    "emit_results",
    "format_decimal",
]


class ConfigError(ValueError):
    """Invalid experiment configuration, caught before any work starts."""


@dataclass(frozen=True)
class DistributionSpec:
    """Which degree distribution to build for a given k."""

    kind: str  # "ideal" | "rsol" | "table"
    c: float = 0.1
    delta: float = 0.5

    def build(self, k: int) -> tuple[RobustSolitonParams | None, DegreeDistribution]:
        if self.kind == "ideal":
            return None, ideal_soliton(k)
        if self.kind == "rsol":
            return robust_soliton(k, self.c, self.delta)
        if self.kind == "table":
            if k < 66:
                raise ConfigError("the table distribution needs k >= 66 (its max degree)")
            return None, shokrollahi_table()
        raise ConfigError(f"unknown distribution kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "rsol":
            return f"rsol(c={self.c:g},delta={self.delta:g})"
        return self.kind


@dataclass
class ExperimentConfig:
    k: int
    symbol_bits: int
    dist: DistributionSpec
    channel: Channel
    decoder: str = "peel"  # "peel" | "bp"
    max_iters: int = 100
    clip: float = 30.0
    trials: int = 1
    master_seed: int = 0
    n_start: int | None = None  # default k
    n_step: int | None = None  # default 1 for peel, ceil(k/20) for bp
    n_max: int | None = None  # default 3k

    def __post_init__(self):
        if self.n_start is None:
            self.n_start = self.k
        if self.n_step is None:
            self.n_step = 1 if self.decoder == "peel" else max(1, math.ceil(self.k / 20))
        if self.n_max is None:
            self.n_max = 3 * self.k

    def validate(self):
        if self.k < 2:
            raise ConfigError("k must be at least 2")
        if self.symbol_bits < 1:
            raise ConfigError("symbol_bits must be positive")
        if self.decoder not in ("peel", "bp"):
            raise ConfigError(f"unknown decoder {self.decoder!r}")
        if self.decoder == "bp" and self.symbol_bits != 1:
            raise ConfigError("the soft BP decoder requires 1-bit symbols")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")
        if self.clip <= 0.0:
            raise ConfigError("clip must be positive")
        if self.n_start > self.n_max:
            raise ConfigError("n_start must not exceed n_max")
        if self.n_step < 1:
            raise ConfigError("n_step must be at least 1")
        if not 0 <= self.master_seed <= MASK64:
            raise ConfigError("master_seed must fit in 64 bits")
        self.dist.build(self.k)  # surfaces distribution/k inconsistencies early

    def checkpoints(self) -> list[int]:
        return list(range(self.n_start, self.n_max + 1, self.n_step))


@dataclass(frozen=True)
class TrialRecord:
    """Decode curve and completion point of one trial.

    final_k_prime is the n_used at which decoding completed, or None when
    n_max was reached incomplete.  residual_bit_errors counts bits among the
    decoder's outputs that differ from the true message (nonzero only in
    blind modes where corrupted payloads enter the decoder).
    """

    trial_index: int
    curve: tuple[tuple[int, float], ...]
    final_k_prime: int | None
    residual_bit_errors: int


@dataclass(frozen=True)
class ExperimentSummary:
    """Aggregates over all trials of one configuration.

    mean_k_prime averages completing trials only (None when no trial
    completed); completion_rate is completed/trials; mean_curve holds
    (n_used, mean unrecovered fraction, trials completed by n) rows, where
    trials that completed early contribute fraction 0 from then on.
    """

    k: int
    mean_k_prime: float | None
    overhead_percent: float | None
    completion_rate: float
    mean_curve: tuple[tuple[int, float, int], ...]
    analytic_bound: float | None


def _hard_bits_from_llrs(llrs) -> int:
    value = 0
    for llr in llrs:
        value = (value << 1) | (1 if llr < 0.0 else 0)
    return value


def _check_llr(channel: Channel, received, clip: float) -> float:
    """Channel LLR of a received single-bit symbol for the soft decoder."""
    if received.llrs is not None:
        return received.llrs[0]
    bit = received.payload & 1
    if channel.kind == "bsc" and not channel.discard_corrupted:
        return bsc_llr(channel.flip_prob, bit)
    # Perfect, erasure survivors and discard-mode survivors are exact.
    return clip if bit == 0 else -clip


def _popcount_errors(values, truth) -> int:
    errors = 0
    for got, want in zip(values, truth):
        if got is not None:
            errors += (got ^ want).bit_count()
    return errors


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialRecord:
    """One independent Monte-Carlo trial; deterministic in (cfg, trial_index)."""
    cfg.validate()
    if trial_index < 0:
        raise ConfigError("trial_index must be non-negative")
    _, dist = cfg.dist.build(cfg.k)
    rng = KeyedRandom(stream_seed(cfg.master_seed, trial_index))
    truth = [rng.next_bits(cfg.symbol_bits) for _ in range(cfg.k)]
    block = MessageBlock(cfg.k, cfg.symbol_bits, tuple(truth))
    # Per-trial key offset: consecutive keys, but a fresh decode graph each
    # trial, otherwise the perfect-channel k' would be one fixed number.
    first_key = rng.next_u64()

    checkpoints = cfg.checkpoints()
    curve: list[tuple[int, float]] = []
    final_k_prime: int | None = None
    residual_bit_errors = 0

    peel = PeelingDecoder(cfg.k, cfg.symbol_bits) if cfg.decoder == "peel" else None
    bp = SoftBPDecoder(cfg.k, clip=cfg.clip) if cfg.decoder == "bp" else None
    bp_bits = None

    n_used = 0
    key = first_key
    sent = 0
    # Guard against channels that erase (almost) everything.
    max_transmissions = 100 * cfg.n_max + 1000
    cp_pos = 0

    while n_used < cfg.n_max and final_k_prime is None and sent < max_transmissions:
        symbol = encode_symbol(block, key, dist)
        key = (key + 1) & MASK64
        sent += 1
        received = transmit(cfg.channel, symbol, cfg.symbol_bits, rng)
        if received.erased:
            continue
        n_used += 1

        if peel is not None:
            payload = received.payload
            if payload is None:  # soft channel into the hard decoder: decide by sign
                payload = _hard_bits_from_llrs(received.llrs)
            report = peel.add(symbol.degree, symbol.neighbors, payload)
            while cp_pos < len(checkpoints) and checkpoints[cp_pos] == n_used:
                curve.append((n_used, report.unrecovered_fraction))
                cp_pos += 1
            if report.complete:
                final_k_prime = n_used
        else:
            bp.add_check(symbol.neighbors, _check_llr(cfg.channel, received, cfg.clip))
            if cp_pos < len(checkpoints) and checkpoints[cp_pos] == n_used:
                cp_pos += 1
                bits, converged, _ = bp.decode(max_iters=cfg.max_iters)
                bp_bits = bits
                errors = sum(1 for i in range(cfg.k) if int(bits[i]) != truth[i])
                curve.append((n_used, errors / cfg.k))
                if converged and errors == 0:
                    final_k_prime = n_used

    if peel is not None:
        residual_bit_errors = _popcount_errors(peel.extract(), truth)
    elif bp_bits is not None:
        residual_bit_errors = sum(1 for i in range(cfg.k) if int(bp_bits[i]) != truth[i])
    return TrialRecord(
        trial_index=trial_index,
        curve=tuple(curve),
        final_k_prime=final_k_prime,
        residual_bit_errors=residual_bit_errors,
    )


def run_experiment(cfg: ExperimentConfig) -> tuple[ExperimentSummary, list[TrialRecord]]:
    """Run cfg.trials independent trials and aggregate them."""
    cfg.validate()
    records = [run_trial(cfg, i) for i in range(cfg.trials)]

    finals = [r.final_k_prime for r in records if r.final_k_prime is not None]
    mean_k_prime = math.fsum(finals) / len(finals) if finals else None
    overhead = 100.0 * (mean_k_prime / cfg.k - 1.0) if mean_k_prime is not None else None
    completion_rate = len(finals) / cfg.trials

    by_n = []
    for r in records:
        lookup = dict(r.curve)
        by_n.append((lookup, r.final_k_prime))

    # Curve rows stop once every trial has finished (completed or hit n_max).
    last_active = max(
        (r.final_k_prime if r.final_k_prime is not None else cfg.n_max) for r in records
    )
    mean_curve = []
    for n in cfg.checkpoints():
        if n > last_active:
            break
        total = 0.0
        completed = 0
        for lookup, final in by_n:
            if final is not None and final <= n:
                completed += 1
                continue
            if n in lookup:
                total += lookup[n]
            else:
                # Starved channel guard tripped before this checkpoint: carry
                # the trial's last known fraction (1.0 if it never reported).
                total += lookup[max(m for m in lookup)] if lookup else 1.0
        mean_curve.append((n, total / cfg.trials, completed))

    params, _ = cfg.dist.build(cfg.k)
    bound = analytic_symbol_bound(params) if params is not None else None
    summary = ExperimentSummary(
        k=cfg.k,
        mean_k_prime=mean_k_prime,
        overhead_percent=overhead,
        completion_rate=completion_rate,
        mean_curve=tuple(mean_curve),
        analytic_bound=bound,
    )
    return summary, records


def format_decimal(x) -> str:
    """Plain-decimal text for CSV cells: no exponent notation, no trailing zeros."""
    if x is None:
        return ""
    if isinstance(x, bool):
        raise TypeError("booleans have no CSV representation here")
    if isinstance(x, int):
        return str(x)
    s = f"{float(x):.12f}".rstrip("0").rstrip(".")
    return s if s else "0"


def emit_results(
    cfg: ExperimentConfig,
    summary: ExperimentSummary,
    records: list[TrialRecord],
    out_dir,
) -> list[Path]:
    """Write curve.csv, trials.csv and summary.csv under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    curve_path = out / "curve.csv"
    lines = ["n_used,mean_unrecovered_fraction,trials_completed"]
    for n, frac, completed in summary.mean_curve:
        lines.append(f"{n},{format_decimal(frac)},{completed}")
    curve_path.write_text("\n".join(lines) + "\n")

    trials_path = out / "trials.csv"
    lines = ["trial_index,final_k_prime,residual_bit_errors"]
    for r in records:
        final = "" if r.final_k_prime is None else str(r.final_k_prime)
        lines.append(f"{r.trial_index},{final},{r.residual_bit_errors}")
    trials_path.write_text("\n".join(lines) + "\n")

    summary_path = out / "summary.csv"
    header = (
        "k,distribution,channel,decoder,mean_k_prime,overhead_percent,"
        "completion_rate,analytic_bound"
    )
    row = ",".join(
        [
            str(cfg.k),
            cfg.dist.label(),
            cfg.channel.label(),
            cfg.decoder,
            format_decimal(summary.mean_k_prime),
            format_decimal(summary.overhead_percent),
            format_decimal(summary.completion_rate),
            format_decimal(summary.analytic_bound),
        ]
    )
    summary_path.write_text(header + "\n" + row + "\n")
    return [curve_path, trials_path, summary_path]
