"""File encode/decode over the packet wire format.

A file is treated as a bit string (MSB-first within each byte), split into
L-bit symbols and grouped into k-symbol blocks, zero-padding the tail.  Each
block is expanded into ceil(expansion * k) packets with keys starting at 0.
The packet stream is prefixed by a stream header carrying enough to decode
with no side channel:

  magic "LTFH" | version 0x01 | k u32 | symbol_len_bits u16 |
  total_length_bytes u64 | block_count u32 |
  dist kind u8 (0 ideal, 1 rsol, 2 table) | c f64 | delta f64

All integers and floats are big-endian.  CRC failures at the packet level
are erasures, not errors; a bad stream header is a format error.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from .codec import (
    BlockStreamer,
    encode_symbol,
    expand_key,
    pack_packet,
    packet_size,
    unpack_packet,
)
from .decoding import PeelingDecoder
from .harness import DistributionSpec

__all__ = [
    "StreamFormatError",
    "DecodedFile",
    "encode_file",
    "decode_file",
    "STREAM_MAGIC",
    "STREAM_VERSION",
]

STREAM_MAGIC = b"LTFH"
STREAM_VERSION = 1
_STREAM_HEAD = struct.Struct(">4sBIHQIBdd")
_DIST_KIND_CODES = {"ideal": 0, "rsol": 1, "table": 2}
_DIST_KIND_NAMES = {v: k for k, v in _DIST_KIND_CODES.items()}


class StreamFormatError(ValueError):
    """Bad stream header magic, version or geometry."""


@dataclass(frozen=True)
class DecodedFile:
    """Either the reassembled bytes or a per-block failure report."""

    data: bytes | None
    unrecovered_per_block: dict[int, int]

    @property
    def ok(self) -> bool:
        return self.data is not None


def _read_bits(data: bytes, pos: int, length: int) -> int:
    """length bits starting at bit offset pos, MSB-first; past-the-end bits are 0."""
    total = len(data) * 8
    take = min(length, max(total - pos, 0))
    if take <= 0:
        return 0
    start = pos >> 3
    end = (pos + take + 7) >> 3
    chunk = int.from_bytes(data[start:end], "big")
    shift = end * 8 - (pos + take)
    value = (chunk >> shift) & ((1 << take) - 1)
    return value << (length - take)  # zero-pad the tail symbol


def encode_file(
    data: bytes,
    k: int,
    symbol_len_bits: int,
    dist_spec: DistributionSpec,
    expansion: float,
) -> bytes:
    """Encode a file into a self-describing packet stream."""
    if not data:
        raise ValueError("cannot encode an empty input")
    if expansion < 1.0:
        raise ValueError("expansion factor must be at least 1")
    _, dist = dist_spec.build(k)

    streamer = BlockStreamer(k, symbol_len_bits)
    blocks = []
    total_bits = len(data) * 8
    for pos in range(0, total_bits, symbol_len_bits):
        block = streamer.push(_read_bits(data, pos, symbol_len_bits))
        if block is not None:
            blocks.append(block)
    flushed = streamer.flush()
    if flushed is not None:
        blocks.append(flushed[0])

    header = _STREAM_HEAD.pack(
        STREAM_MAGIC,
        STREAM_VERSION,
        k,
        symbol_len_bits,
        len(data),
        len(blocks),
        _DIST_KIND_CODES[dist_spec.kind],
        dist_spec.c,
        dist_spec.delta,
    )
    per_block = math.ceil(expansion * k)
    chunks = [header]
    for block in blocks:
        for key in range(per_block):
            sym = encode_symbol(block, key, dist)
            chunks.append(
                pack_packet(block.index, k, symbol_len_bits, sym.key, sym.payload)
            )
    return b"".join(chunks)


def decode_file(stream: bytes) -> DecodedFile:
    """Decode a packet stream back to file bytes, or report unrecovered blocks."""
    if len(stream) < _STREAM_HEAD.size:
        raise StreamFormatError("stream shorter than its header")
    (
        magic,
        version,
        k,
        symbol_len_bits,
        total_length_bytes,
        block_count,
        dist_kind,
        c,
        delta,
    ) = _STREAM_HEAD.unpack(stream[: _STREAM_HEAD.size])
    if magic != STREAM_MAGIC:
        raise StreamFormatError(f"bad stream magic {magic!r}")
    if version != STREAM_VERSION:
        raise StreamFormatError(f"unsupported stream version {version}")
    if dist_kind not in _DIST_KIND_NAMES:
        raise StreamFormatError(f"unknown distribution code {dist_kind}")
    if block_count < 1 or k < 2 or symbol_len_bits < 1:
        raise StreamFormatError("implausible stream geometry")
    needed_bits = total_length_bytes * 8
    if needed_bits > block_count * k * symbol_len_bits:
        raise StreamFormatError("stream header claims more payload than its blocks hold")

    dist_spec = DistributionSpec(kind=_DIST_KIND_NAMES[dist_kind], c=c, delta=delta)
    _, dist = dist_spec.build(k)

    decoders: dict[int, PeelingDecoder] = {}
    psize = packet_size(symbol_len_bits)
    offset = _STREAM_HEAD.size
    while offset + psize <= len(stream):
        packet = unpack_packet(stream[offset : offset + psize])
        offset += psize
        if packet is None:
            continue  # CRC failure: an erasure
        if packet.k != k or packet.symbol_len_bits != symbol_len_bits:
            continue  # stray packet from another stream
        if not 0 <= packet.block_index < block_count:
            continue
        dec = decoders.get(packet.block_index)
        if dec is None:
            dec = decoders[packet.block_index] = PeelingDecoder(k, symbol_len_bits)
        if dec.complete:
            continue
        degree, neighbors = expand_key(packet.key, k, dist)
        dec.add(degree, neighbors, packet.payload)

    unrecovered = {}
    for index in range(block_count):
        dec = decoders.get(index)
        if dec is None:
            unrecovered[index] = k
        elif not dec.complete:
            unrecovered[index] = k - dec.recovered_count
    if unrecovered:
        return DecodedFile(data=None, unrecovered_per_block=unrecovered)

    # Reassemble the bit stream block-major and truncate to the true length.
    acc = 0
    acc_bits = 0
    out = bytearray()
    for index in range(block_count):
        for value in decoders[index].extract():
            acc = (acc << symbol_len_bits) | value
            acc_bits += symbol_len_bits
            while acc_bits >= 8:
                acc_bits -= 8
                out.append((acc >> acc_bits) & 0xFF)
                acc &= (1 << acc_bits) - 1
            if len(out) >= total_length_bytes:
                break
        if len(out) >= total_length_bytes:
            break
    if acc_bits and len(out) < total_length_bytes:
        out.append((acc << (8 - acc_bits)) & 0xFF)
    return DecodedFile(data=bytes(out[:total_length_bytes]), unrecovered_per_block={})
