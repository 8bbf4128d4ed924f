"""Encoding, gap emission, and the sequential decode oracle.

The encoder is single-pass sequential per stream: codeword start positions
must be globally consistent, and knowing every start for free is also what
makes exact gap emission possible at encode time.  ``oracle_decode`` is the
single-cursor ground truth every parallel decoding path is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from ._dispatch import _trie_next, decode_args
from .bitstream import DEFAULT_LAYOUT, BitWriter, EncodedStream, LayoutConfig
from .codebook import Codebook
from .errors import GapOverflow, InvalidCode, Truncated, UnknownSymbol


@dataclass
class OracleResult:
    """Ground truth for one stream: decoded symbols, the sorted set of
    absolute bit indices where codewords begin, and how many codewords
    start inside each subsequence."""

    symbols: np.ndarray
    starts: np.ndarray
    per_subseq_counts: np.ndarray


def encode(
    symbols,
    codebook: Codebook,
    layout: LayoutConfig = DEFAULT_LAYOUT,
    with_gap: bool = False,
) -> EncodedStream:
    """Concatenate codewords MSB-first; optionally emit the gap array."""
    syms = np.ascontiguousarray(symbols, dtype=np.uint16)
    codes, lens = codebook.encode_arrays()
    if syms.size and int(syms.max()) >= len(lens):
        raise UnknownSymbol(
            f"symbol {int(syms.max())} outside the codebook's {codebook.symbol_width}-bit range"
        )
    sym_lens = lens[syms]
    if syms.size and not sym_lens.all():
        missing = int(syms[sym_lens == 0][0])
        raise UnknownSymbol(f"symbol {missing} has no codeword")
    total_bits = int(sym_lens.sum(dtype=np.int64))

    units = np.zeros(-(-total_bits // layout.unit_bits), dtype=np.uint32)
    num_subseqs = -(-total_bits // layout.subseq_bits)
    gap_scratch = np.full(num_subseqs if with_gap else 0, -1, dtype=np.int64)
    if with_gap and num_subseqs:
        gap_scratch[0] = 0

    if codebook.kind == "canonical":
        written = kernels.encode_pack(
            syms, codes, lens, units,
            layout.unit_bits_log2, layout.unit_bits, layout.subseq_bits, gap_scratch,
        )
        assert written == total_bits
    else:
        writer = BitWriter(layout.unit_bits)
        pos = 0
        nb = 1
        for s in syms:
            if with_gap:
                while nb < num_subseqs and pos >= nb * layout.subseq_bits:
                    gap_scratch[nb] = pos - nb * layout.subseq_bits
                    nb += 1
            code, ln = codebook.entries[int(s)]
            writer.write(code, ln)
            pos += ln
        packed = writer.getvalue()
        units[: len(packed)] = packed

    gap = None
    if with_gap:
        # Boundaries past the last codeword start skip to end of stream.
        unfilled = gap_scratch < 0
        if unfilled.any():
            idx = np.nonzero(unfilled)[0]
            gap_scratch[idx] = total_bits - idx * layout.subseq_bits
        if gap_scratch.size and int(gap_scratch.max()) >= 256:
            raise GapOverflow("gap entry does not fit in one byte")
        gap = gap_scratch.astype(np.uint8)

    return EncodedStream(
        layout=layout,
        units=units,
        total_bits=total_bits,
        symbol_count=int(syms.size),
        codebook=codebook,
        gap=gap,
    )


def emit_gap(starts: np.ndarray, layout: LayoutConfig, total_bits: int) -> np.ndarray:
    """Forward-skip gap array from a codeword start set.

    g[i] is the distance from subsequence boundary i to the first codeword
    start at or past it (the end of the stream acts as a final virtual
    start).  The encoder computes the same values inline; this form exists
    for recomputing gaps from an oracle start set.
    """
    num_subseqs = -(-total_bits // layout.subseq_bits)
    boundaries = np.arange(num_subseqs, dtype=np.int64) * layout.subseq_bits
    starts_plus = np.append(np.asarray(starts, dtype=np.int64), total_bits)
    gap = starts_plus[np.searchsorted(starts_plus, boundaries)] - boundaries
    if gap.size and int(gap.max()) >= 256:
        raise GapOverflow("gap entry does not fit in one byte")
    return gap.astype(np.uint8)


def signed_gaps(starts: np.ndarray, layout: LayoutConfig, total_bits: int) -> np.ndarray:
    """Gap array in the signed convention: for each subsequence boundary,
    the start of the codeword overlapping the boundary minus the boundary
    (zero when the boundary itself is a start).  Interconvertible with the
    forward-skip form given the start set."""
    num_subseqs = -(-total_bits // layout.subseq_bits)
    boundaries = np.arange(num_subseqs, dtype=np.int64) * layout.subseq_bits
    s = np.asarray(starts, dtype=np.int64)
    idx = np.searchsorted(s, boundaries, side="right") - 1
    return s[idx] - boundaries


def oracle_decode(stream: EncodedStream) -> OracleResult:
    """Decode the whole stream with a single cursor from bit 0."""
    n = stream.symbol_count
    symbols = np.empty(n, dtype=np.uint16)
    starts = np.empty(n, dtype=np.int64)
    if stream.codebook.kind == "canonical":
        status, k = kernels.oracle_decode(
            *decode_args(stream), stream.total_bits, n, symbols, starts
        )
        if status == kernels.ERR_INVALID:
            raise InvalidCode(f"no codeword matches bits for symbol {k}")
        if status == kernels.ERR_TRUNCATED:
            raise Truncated(f"stream ended after {k} of {n} symbols")
    else:
        table = stream.codebook.decode_table()
        pos = 0
        for k in range(n):
            if pos >= stream.total_bits:
                raise Truncated(f"stream ended after {k} of {n} symbols")
            sym, ln = _trie_next(stream, table, pos)
            if ln == 0:
                raise InvalidCode(f"no codeword matches bits for symbol {k}")
            if pos + ln > stream.total_bits:
                raise Truncated(f"stream ended after {k} of {n} symbols")
            symbols[k] = sym
            starts[k] = pos
            pos += ln

    boundaries = np.arange(stream.num_subseqs + 1, dtype=np.int64) * stream.layout.subseq_bits
    per_subseq = np.diff(np.searchsorted(starts, boundaries))
    return OracleResult(symbols=symbols, starts=starts, per_subseq_counts=per_subseq)


def mis_sync_decode(stream: EncodedStream, start_bit: int) -> np.ndarray:
    """Decode from an arbitrary (possibly misaligned) bit offset to stream
    end, discarding a trailing partial codeword.  Demonstrates and tests
    self-synchronization."""
    if not 0 <= start_bit < max(stream.total_bits, 1):
        raise ValueError(f"start bit {start_bit} outside stream")
    out = np.empty(max(stream.total_bits - start_bit, 1), dtype=np.uint16)
    if stream.codebook.kind == "canonical":
        status, n = kernels.mis_sync_decode(
            *decode_args(stream), start_bit, stream.total_bits, out
        )
        if status != kernels.OK:
            raise InvalidCode("no codeword matches bits")
        return out[:n]
    table = stream.codebook.decode_table()
    pos = start_bit
    n = 0
    while pos < stream.total_bits:
        sym, ln = _trie_next(stream, table, pos)
        if ln == 0:
            raise InvalidCode("no codeword matches bits")
        if pos + ln > stream.total_bits:
            break
        out[n] = sym
        n += 1
        pos += ln
    return out[:n]
