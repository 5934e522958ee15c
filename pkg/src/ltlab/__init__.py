"""LT fountain-code library and channel-simulation testbed."""

from .channels import (
    Channel,
    ReceivedSymbol,
    biawgn_capacity,
    bsc_capacity,
    bsc_llr,
    es_n0_to_sigma,
    transmit,
)
from .codec import (
    BlockStreamer,
    EncodedSymbol,
    MessageBlock,
    Packet,
    encode_stream,
    encode_symbol,
    expand_key,
    pack_packet,
    unpack_packet,
    xor_fold,
)
from .decoding import DecodeReport, GEResult, PeelingDecoder, SoftBPDecoder, ge_solve
from .distributions import (
    DegreeDistribution,
    RobustSolitonParams,
    analytic_symbol_bound,
    ideal_soliton,
    mean_degree,
    robust_soliton,
    sample_degree,
    shokrollahi_table,
)
from .fileio import DecodedFile, StreamFormatError, decode_file, encode_file
from .harness import (
    ConfigError,
    DistributionSpec,
    ExperimentConfig,
    ExperimentSummary,
    TrialRecord,
    emit_results,
    run_experiment,
    run_trial,
)
from .prng import KeyedRandom, mix64, stream_seed

__version__ = "0.1.0"

__all__ = [
    "BlockStreamer",
    "Channel",
    "ConfigError",
    "DecodeReport",
    "DecodedFile",
    "DegreeDistribution",
    "DistributionSpec",
    "EncodedSymbol",
    "ExperimentConfig",
    "ExperimentSummary",
    "GEResult",
    "KeyedRandom",
    "MessageBlock",
    "Packet",
    "PeelingDecoder",
    "ReceivedSymbol",
    "RobustSolitonParams",
    "SoftBPDecoder",
    "StreamFormatError",
    "TrialRecord",
    "analytic_symbol_bound",
    "biawgn_capacity",
    "bsc_capacity",
    "bsc_llr",
    "decode_file",
    "emit_results",
    "encode_file",
    "encode_stream",
    "encode_symbol",
    "es_n0_to_sigma",
    "expand_key",
    "ge_solve",
    "ideal_soliton",
    "mean_degree",
    "mix64",
    "pack_packet",
    "robust_soliton",
    "run_experiment",
    "run_trial",
    "sample_degree",
    "shokrollahi_table",
    "stream_seed",
    "transmit",
    "unpack_packet",
    "xor_fold",
]
