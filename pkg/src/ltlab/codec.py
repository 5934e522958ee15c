"""Key-driven LT encoding and the packet wire format.

An encoded symbol is the XOR of `degree` message symbols, where the degree
and the neighbor set are expanded deterministically from a 64-bit key.  The
receiver regenerates the same (degree, neighbors) from the key alone, so the
only per-symbol wire overhead is the key itself.

Payloads are L-bit strings represented as Python ints (value < 2**L); the
first bit of the string is the most significant bit of the int.
"""

from __future__ import annotations

import struct
import zlib
from collections import deque
from dataclasses import dataclass

from .distributions import DegreeDistribution, sample_degree
from .prng import MASK64, KeyedRandom

__all__ = [
    "MessageBlock",
    "EncodedSymbol",
    "BlockStreamer",
    "Packet",
    "expand_key",
    "xor_fold",
    "encode_symbol",
    "encode_stream",
    "payload_to_bytes",
    "payload_from_bytes",
    "pack_packet",
    "unpack_packet",
    "packet_size",
    "PACKET_MAGIC",
    "PACKET_VERSION",
]


@dataclass(frozen=True)
class MessageBlock:
    """One block of k message symbols, each exactly symbol_len_bits wide."""

    k: int
    symbol_len_bits: int
    symbols: tuple[int, ...]
    index: int = 0  # position of this block in a stream; 0 for standalone blocks

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("a block needs k >= 2 message symbols")
        if self.symbol_len_bits < 1:
            raise ValueError("symbol_len_bits must be positive")
        if len(self.symbols) != self.k:
            raise ValueError(f"expected {self.k} symbols, got {len(self.symbols)}")
        limit = 1 << self.symbol_len_bits
        for i, s in enumerate(self.symbols):
            if not 0 <= s < limit:
                raise ValueError(f"symbol {i} does not fit in {self.symbol_len_bits} bits")


@dataclass(frozen=True)
class EncodedSymbol:
    """Output of the fountain: key, expanded graph edge set, and XOR payload."""

    key: int
    degree: int
    neighbors: tuple[int, ...]
    payload: int


def expand_key(
    key: int, k: int, dist: DegreeDistribution
) -> tuple[int, tuple[int, ...]]:
    """Expand a key into (degree, sorted distinct neighbor indices).

    A generator seeded from the key supplies one uniform float for the degree
    draw, then one integer draw per neighbor via a partial Fisher-Yates
    shuffle over the implicit range 0..k-1 (O(degree) memory, fixed draw
    count).  Identical (key, k, dist) always yields identical output.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if dist.max_degree > k:
        raise ValueError(
            f"distribution support (max degree {dist.max_degree}) exceeds block size k={k}"
        )
    rng = KeyedRandom(key)
    degree = sample_degree(dist, rng.next_float())
    picked = []
    swaps: dict[int, int] = {}
    for i in range(degree):
        j = i + rng.next_below(k - i)
        vi = swaps.get(i, i)
        vj = swaps.get(j, j)
        picked.append(vj)
        swaps[j] = vi
    return degree, tuple(sorted(picked))


def xor_fold(payloads, length_bits: int | None = None) -> int:
    """Bitwise XOR reduction of payload ints; order-independent.

    When length_bits is given, every payload must fit in that width
    (the int representation of a longer bit string cannot match).
    """
    if not payloads:
        raise ValueError("xor_fold needs at least one payload")
    if length_bits is not None:
        limit = 1 << length_bits
        for p in payloads:
            if not 0 <= p < limit:
                raise ValueError(f"payload {p:#x} does not fit in {length_bits} bits")
    acc = 0
    for p in payloads:
        acc ^= p
    return acc


def encode_symbol(block: MessageBlock, key: int, dist: DegreeDistribution) -> EncodedSymbol:
    """Degree selection, neighbor association and XOR calculation for one key."""
    degree, neighbors = expand_key(key, block.k, dist)
    payload = xor_fold([block.symbols[i] for i in neighbors])
    return EncodedSymbol(key=key & MASK64, degree=degree, neighbors=neighbors, payload=payload)


def encode_stream(
    block: MessageBlock, dist: DegreeDistribution, first_key: int, count: int
) -> list[EncodedSymbol]:
    """Symbols for the consecutive keys first_key .. first_key+count-1 (mod 2**64)."""
    if count < 1:
        raise ValueError("count must be positive")
    return [encode_symbol(block, (first_key + i) & MASK64, dist) for i in range(count)]


class BlockStreamer:
    """Accumulates streamed payloads into fixed-size message blocks.

    Incoming symbols queue in an input buffer; every k-th push completes a
    block, which is returned with a sequential block index.  Single-owner
    mutable state: one writer at a time.
    """

    def __init__(self, k: int, symbol_len_bits: int):
        if k < 2:
            raise ValueError("a block needs k >= 2 message symbols")
        if symbol_len_bits < 1:
            raise ValueError("symbol_len_bits must be positive")
        self.k = k
        self.symbol_len_bits = symbol_len_bits
        self.block_index = 0
        self._input_buffer: deque[int] = deque()

    @property
    def pending(self) -> int:
        return len(self._input_buffer)

    def push(self, payload: int) -> MessageBlock | None:
        """Queue one payload; returns a completed MessageBlock every k pushes."""
        if not 0 <= payload < (1 << self.symbol_len_bits):
            raise ValueError(f"payload does not fit in {self.symbol_len_bits} bits")
        self._input_buffer.append(payload)
        if len(self._input_buffer) < self.k:
            return None
        symbols = tuple(self._input_buffer.popleft() for _ in range(self.k))
        block = MessageBlock(self.k, self.symbol_len_bits, symbols, index=self.block_index)
        self.block_index += 1
        return block

    def flush(self) -> tuple[MessageBlock, int] | None:
        """Complete a trailing partial block with zero padding.

        Returns (block, pad_count), or None when nothing is pending.
        """
        if not self._input_buffer:
            return None
        pad = self.k - len(self._input_buffer)
        symbols = tuple(self._input_buffer) + (0,) * pad
        self._input_buffer.clear()
        block = MessageBlock(self.k, self.symbol_len_bits, symbols, index=self.block_index)
        self.block_index += 1
        return block, pad


# ---------------------------------------------------------------------------
# Packet wire format (big-endian):
#   magic "LTPK" | version 0x01 | block_index u32 | k u32 | symbol_len_bits
#   u16 | key u64 | payload ceil(L/8) bytes (zero-padded in the low-order
#   bits of the final byte) | CRC-32 (IEEE) over all preceding bytes.
# Packets failing the CRC are discarded, i.e. treated as erased.
# ---------------------------------------------------------------------------

PACKET_MAGIC = b"LTPK"
PACKET_VERSION = 1
_PACKET_HEAD = struct.Struct(">4sBIIHQ")
_CRC = struct.Struct(">I")


@dataclass(frozen=True)
class Packet:
    block_index: int
    k: int
    symbol_len_bits: int
    key: int
    payload: int


def payload_to_bytes(payload: int, length_bits: int) -> bytes:
    """Pack an L-bit payload MSB-first, zero-padding the low bits of the last byte."""
    nbytes = (length_bits + 7) // 8
    return (payload << (8 * nbytes - length_bits)).to_bytes(nbytes, "big")


def payload_from_bytes(data: bytes, length_bits: int) -> int:
    nbytes = (length_bits + 7) // 8
    if len(data) != nbytes:
        raise ValueError(f"expected {nbytes} payload bytes, got {len(data)}")
    return int.from_bytes(data, "big") >> (8 * nbytes - length_bits)


def packet_size(symbol_len_bits: int) -> int:
    return _PACKET_HEAD.size + (symbol_len_bits + 7) // 8 + _CRC.size


def pack_packet(
    block_index: int, k: int, symbol_len_bits: int, key: int, payload: int
) -> bytes:
    body = _PACKET_HEAD.pack(
        PACKET_MAGIC, PACKET_VERSION, block_index, k, symbol_len_bits, key
    ) + payload_to_bytes(payload, symbol_len_bits)
    return body + _CRC.pack(zlib.crc32(body) & 0xFFFFFFFF)


def unpack_packet(buf: bytes) -> Packet | None:
    """Parse one packet; returns None (an erasure) on CRC or framing mismatch."""
    if len(buf) < _PACKET_HEAD.size + _CRC.size:
        return None
    body, crc = buf[: -_CRC.size], buf[-_CRC.size :]
    if _CRC.unpack(crc)[0] != (zlib.crc32(body) & 0xFFFFFFFF):
        return None
    magic, version, block_index, k, symbol_len_bits, key = _PACKET_HEAD.unpack(
        body[: _PACKET_HEAD.size]
    )
    if magic != PACKET_MAGIC or version != PACKET_VERSION:
        return None
    expected = (symbol_len_bits + 7) // 8
    payload_bytes = body[_PACKET_HEAD.size :]
    if len(payload_bytes) != expected:
        return None
    return Packet(
        block_index=block_index,
        k=k,
        symbol_len_bits=symbol_len_bits,
        key=key,
        payload=payload_from_bytes(payload_bytes, symbol_len_bits),
    )
