"""Message recovery: incremental peeling, a GF(2) elimination oracle, soft BP.

The peeling decoder is the erasure-channel workhorse: any encoded symbol
whose remaining degree drops to 1 recovers its neighbor, the recovered value
is XOR'ed out of every other symbol that lists it, and the chain reaction
runs until no degree-1 symbol is left.  Gaussian elimination over GF(2)
serves as a ground-truth decodability oracle, and the soft decoder runs
flooding sum-product iterations on per-bit channel LLRs for noisy channels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DecodeReport",
    "PeelingDecoder",
    "GEResult",
    "ge_solve",
    "SoftBPDecoder",
]


@dataclass(frozen=True)
class DecodeReport:
    """Snapshot of decoding progress after some number of ingested symbols."""

    recovered_count: int
    unrecovered_fraction: float
    complete: bool
    symbols_used: int
    residual_bit_errors: int | None = None  # filled by the harness when truth is known


class _Buffered:
    __slots__ = ("neighbors", "payload")

    def __init__(self, neighbors: set[int], payload: int):
        self.neighbors = neighbors
        self.payload = payload


class PeelingDecoder:
    """Incremental degree-1 ripple decoder over one message block.

    Symbols are ingested one at a time; already-recovered neighbors are
    substituted out on entry.  Symbols whose remaining degree reaches 0 are
    redundant and discarded; duplicates of earlier symbols are accepted and
    become redundant the same way.  Single-owner mutable state: one decode
    session per instance.
    """

    def __init__(self, k: int, symbol_len_bits: int):
        if k < 2:
            raise ValueError("peeling decoder needs k >= 2")
        if symbol_len_bits < 1:
            raise ValueError("symbol_len_bits must be positive")
        self.k = k
        self.symbol_len_bits = symbol_len_bits
        self._payload_limit = 1 << symbol_len_bits
        self._recovered: list[int | None] = [None] * k
        self._recovered_count = 0
        self._symbols_used = 0
        self._store: dict[int, _Buffered] = {}
        self._next_id = 0
        self._adjacency: list[set[int]] = [set() for _ in range(k)]
        self._ripple: deque[int] = deque()

    @property
    def recovered_count(self) -> int:
        return self._recovered_count

    @property
    def symbols_used(self) -> int:
        return self._symbols_used

    @property
    def complete(self) -> bool:
        return self._recovered_count == self.k

    def report(self) -> DecodeReport:
        return DecodeReport(
            recovered_count=self._recovered_count,
            unrecovered_fraction=1.0 - self._recovered_count / self.k,
            complete=self._recovered_count == self.k,
            symbols_used=self._symbols_used,
        )

    def add(self, degree: int, neighbors, payload: int) -> DecodeReport:
        """Ingest one encoded symbol and drain the ripple to exhaustion."""
        neighbors = tuple(neighbors)
        if degree != len(neighbors):
            raise ValueError(f"degree {degree} does not match {len(neighbors)} neighbors")
        seen = set()
        for idx in neighbors:
            if not 0 <= idx < self.k:
                raise ValueError(f"neighbor index {idx} outside [0, {self.k})")
            if idx in seen:
                raise ValueError(f"duplicate neighbor index {idx}")
            seen.add(idx)
        if not 0 <= payload < self._payload_limit:
            raise ValueError(f"payload does not fit in {self.symbol_len_bits} bits")

        self._symbols_used += 1

        # Substitute out neighbors that are already known.
        remaining = set()
        value = payload
        for idx in neighbors:
            known = self._recovered[idx]
            if known is None:
                remaining.add(idx)
            else:
                value ^= known
        if remaining:
            sid = self._next_id
            self._next_id += 1
            self._store[sid] = _Buffered(remaining, value)
            for idx in remaining:
                self._adjacency[idx].add(sid)
            if len(remaining) == 1:
                self._ripple.append(sid)
                self._drain()
        return self.report()

    def extract(self) -> list[int | None]:
        """Recovered values in index order; unrecovered indices are None."""
        return list(self._recovered)

    def _drain(self):
        while self._ripple:
            sid = self._ripple.popleft()
            buf = self._store.get(sid)
            if buf is None or len(buf.neighbors) != 1:
                continue  # stale queue entry: the symbol was reduced or consumed
            idx = next(iter(buf.neighbors))
            value = buf.payload
            del self._store[sid]
            self._adjacency[idx].discard(sid)
            if self._recovered[idx] is not None:
                continue  # redundant copy of an already-recovered symbol
            self._recovered[idx] = value
            self._recovered_count += 1
            for other_id in list(self._adjacency[idx]):
                other = self._store[other_id]
                other.payload ^= value
                other.neighbors.discard(idx)
                if len(other.neighbors) == 1:
                    self._ripple.append(other_id)
                elif not other.neighbors:
                    del self._store[other_id]
            self._adjacency[idx].clear()


@dataclass(frozen=True)
class GEResult:
    """Outcome of GF(2) elimination: per-index values (None where not uniquely
    determined), matrix rank, and whether inconsistent rows were dropped."""

    values: list[int | None]
    rank: int
    inconsistent: bool

    @property
    def recovered_count(self) -> int:
        return sum(1 for v in self.values if v is not None)


def ge_solve(equations, k: int, symbol_len_bits: int) -> GEResult:
    """Gaussian elimination over GF(2) with L-bit right-hand sides.

    Equations are (neighbors, payload) pairs, processed in arrival order.
    A row that reduces to 0 = nonzero conflicts with earlier rows (possible
    only with corrupted payloads); it is dropped greedily and flagged.  The
    basis is brought to reduced row-echelon form, and an index is reported
    iff its value is uniquely determined, i.e. its reduced row is a unit row.
    """
    if k < 1:
        raise ValueError("k must be positive")
    limit = 1 << symbol_len_bits
    pivot_rows: dict[int, tuple[int, int]] = {}
    inconsistent = False
    for neighbors, payload in equations:
        mask = 0
        for idx in neighbors:
            if not 0 <= idx < k:
                raise ValueError(f"neighbor index {idx} outside [0, {k})")
            bit = 1 << idx
            if mask & bit:
                raise ValueError(f"duplicate neighbor index {idx}")
            mask |= bit
        if not 0 <= payload < limit:
            raise ValueError(f"payload does not fit in {symbol_len_bits} bits")
        rhs = payload
        while mask:
            p = (mask & -mask).bit_length() - 1  # lowest set bit: pivot column
            if p in pivot_rows:
                pm, pr = pivot_rows[p]
                mask ^= pm
                rhs ^= pr
            else:
                pivot_rows[p] = (mask, rhs)
                break
        else:
            if rhs != 0:
                inconsistent = True  # dropped: conflicts with rows kept so far

    # Jordan sweep to reduced form: clear every pivot column from other rows.
    for p in sorted(pivot_rows, reverse=True):
        pm, pr = pivot_rows[p]
        for q in pivot_rows:
            if q != p and (pivot_rows[q][0] >> p) & 1:
                qm, qr = pivot_rows[q]
                pivot_rows[q] = (qm ^ pm, qr ^ pr)

    values: list[int | None] = [None] * k
    for p, (pm, pr) in pivot_rows.items():
        if pm == (1 << p):
            values[p] = pr
    return GEResult(values=values, rank=len(pivot_rows), inconsistent=inconsistent)


class SoftBPDecoder:
    """Flooding sum-product decoder for single-bit symbols on noisy channels.

    Each received encoded bit becomes a check node carrying its channel LLR
    (positive favors bit 0); message bits are variable nodes with zero prior.
    Check-to-variable messages use the product-of-tanh-halves rule over the
    check's other incoming messages and its own channel LLR; variable-to-check
    messages sum the variable's other incoming messages.  All messages are
    clipped to +/- clip.  Checks accumulate across add_check calls, so the
    decoder can be re-run as more symbols arrive.
    """

    def __init__(self, k: int, clip: float = 30.0):
        if k < 2:
            raise ValueError("soft decoder needs k >= 2")
        if clip <= 0.0:
            raise ValueError("clip bound must be positive")
        self.k = k
        self.clip = float(clip)
        self._neighbors: list[tuple[int, ...]] = []
        self._llrs: list[float] = []
        self.last_posterior: np.ndarray | None = None

    @property
    def checks_used(self) -> int:
        return len(self._llrs)

    def add_check(self, neighbors, channel_llr: float):
        neighbors = tuple(neighbors)
        if not neighbors:
            raise ValueError("a check node needs at least one neighbor")
        for idx in neighbors:
            if not 0 <= idx < self.k:
                raise ValueError(f"neighbor index {idx} outside [0, {self.k})")
        if not np.isfinite(channel_llr):
            raise ValueError("channel LLR must be finite")
        self._neighbors.append(neighbors)
        self._llrs.append(float(np.clip(channel_llr, -self.clip, self.clip)))

    def decode(self, max_iters: int = 100) -> tuple[np.ndarray, bool, int]:
        """Run flooding iterations from scratch over all accumulated checks.

        Returns (hard_bits, converged, iterations).  Convergence means the
        hard decisions satisfy every check's parity against the hard decision
        of its channel observation, or the decisions were unchanged for 3
        consecutive iterations; hitting max_iters without either returns
        converged=False with the current decisions.  LLR ties decide bit 0.
        """
        if max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self._llrs:
            raise ValueError("no checks to decode")
        n = len(self._llrs)
        degrees = np.array([len(nb) for nb in self._neighbors], dtype=np.int64)
        var_idx = np.fromiter(
            (idx for nb in self._neighbors for idx in nb),
            dtype=np.int64,
            count=int(degrees.sum()),
        )
        chk_idx = np.repeat(np.arange(n, dtype=np.int64), degrees)
        channel = np.array(self._llrs)
        t_channel = np.tanh(0.5 * channel)
        chan_neg = (t_channel < 0.0).astype(np.int64)
        chan_logmag = np.log(np.maximum(np.abs(t_channel), 1e-300))
        check_bits = (channel < 0.0).astype(np.int64)

        m_c2v = np.zeros(var_idx.size)
        prev_bits: np.ndarray | None = None
        stable = 0
        bits = np.zeros(self.k, dtype=np.uint8)
        iteration = 0
        for iteration in range(1, max_iters + 1):
            # Variable update: sum of the other incoming check messages (zero prior).
            var_sum = np.bincount(var_idx, weights=m_c2v, minlength=self.k)
            m_v2c = np.clip(var_sum[var_idx] - m_c2v, -self.clip, self.clip)

            # Check update in sign/log-magnitude form to dodge 0/0 in the
            # exclusive product.
            t = np.tanh(0.5 * m_v2c)
            neg = (t < 0.0).astype(np.int64)
            logmag = np.log(np.maximum(np.abs(t), 1e-300))
            neg_total = np.bincount(chk_idx, weights=neg, minlength=n) + chan_neg
            log_total = np.bincount(chk_idx, weights=logmag, minlength=n) + chan_logmag
            excl_neg = neg_total[chk_idx] - neg
            excl_log = log_total[chk_idx] - logmag
            sign = 1.0 - 2.0 * (excl_neg.astype(np.int64) % 2)
            prod = sign * np.exp(np.minimum(excl_log, 0.0))
            prod = np.clip(prod, -1.0 + 1e-15, 1.0 - 1e-15)
            m_c2v = np.clip(2.0 * np.arctanh(prod), -self.clip, self.clip)

            posterior = np.bincount(var_idx, weights=m_c2v, minlength=self.k)
            bits = (posterior < 0.0).astype(np.uint8)

            parity = np.bincount(
                chk_idx, weights=bits[var_idx].astype(np.float64), minlength=n
            ).astype(np.int64) % 2
            if np.array_equal(parity, check_bits):
                self.last_posterior = posterior
                return bits, True, iteration
            if prev_bits is not None and np.array_equal(bits, prev_bits):
                stable += 1
                if stable >= 3:
                    self.last_posterior = posterior
                    return bits, True, iteration
            else:
                stable = 0
            prev_bits = bits
            self.last_posterior = posterior
        return bits, False, iteration
