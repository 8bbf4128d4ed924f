"""Compiled hot loops shared by the encoder and both decoders.

Everything here operates on plain numpy arrays: the packed unit words plus
the canonical decode-table arrays (per-length first code / first index /
count and the canonically sorted symbol array).  Explicit (trie) codebooks
take the pure-Python reference paths in their modules instead; they exist
only for reproducing externally specified code tables on tiny inputs.

Status codes returned by decode kernels: 0 ok, 1 invalid code, 2 truncated.
Kernels never raise; callers translate statuses into exceptions.

Bit order is MSB-first within each unit word.  Reads past the end of the
unit array yield zero bits, which is what speculative synchronization
decoding beyond ``total_bits`` relies on.
"""

from __future__ import annotations

import numpy as np
from numba import njit

OK = 0
ERR_INVALID = 1
ERR_TRUNCATED = 2


@njit(cache=True, nogil=True, inline="always")
def _read_bit(units, ulog2, unit_bits, pos):
    w = pos >> ulog2
    if w >= units.shape[0]:
        return 0
    return (units[w] >> (unit_bits - 1 - (pos & (unit_bits - 1)))) & 1


@njit(cache=True, nogil=True, inline="always")
def _next_codeword(units, ulog2, unit_bits, fc, lc, fidx, syms, max_len, pos):
    """Decode one codeword at ``pos``; returns (symbol, length) or (-1, 0)."""
    code = 0
    for ln in range(1, max_len + 1):
        code = (code << 1) | _read_bit(units, ulog2, unit_bits, pos + ln - 1)
        d = code - fc[ln]
        if 0 <= d < lc[ln]:
            return syms[fidx[ln] + d], ln
    return np.uint16(0), 0


@njit(cache=True, nogil=True)
def count_windows(
    units, ulog2, unit_bits, fc, lc, fidx, syms, max_len,
    entries, stops, i0, i1, total_bits, counts, exits,
):
    """Count codewords starting in [entries[i], stops[i]) for slots i0..i1.

    The decode from entries[i] runs until the cursor crosses stops[i] or
    total_bits; exits[i] records where it crossed.  Returns
    (status, slot of failure or -1, bits decoded).
    """
    bits = 0
    for i in range(i0, i1):
        pos = entries[i]
        stop = stops[i]
        n = 0
        while pos < stop and pos < total_bits:
            sym, ln = _next_codeword(
                units, ulog2, unit_bits, fc, lc, fidx, syms, max_len, pos
            )
            if ln == 0:
                counts[i] = n
                exits[i] = pos
                return ERR_INVALID, i, bits
            pos += ln
            bits += ln
            n += 1
        counts[i] = n
        exits[i] = pos
    return OK, -1, bits


@njit(cache=True, nogil=True)
def decode_counted(
    units, ulog2, unit_bits, fc, lc, fidx, syms, max_len,
    entries, counts, dest_offsets, out, i0, i1,
):
    """Decode exactly counts[i] symbols from entries[i] into out at
    dest_offsets[i], for slots i0..i1.  Returns (status, slot, bits)."""
    bits = 0
    for i in range(i0, i1):
        pos = entries[i]
        off = dest_offsets[i]
        for k in range(counts[i]):
            sym, ln = _next_codeword(
                units, ulog2, unit_bits, fc, lc, fidx, syms, max_len, pos
            )
            if ln == 0:
                return ERR_INVALID, i, bits
            out[off + k] = sym
            pos += ln
            bits += ln
    return OK, -1, bits


@njit(cache=True, nogil=True)
def oracle_decode(
    units, ulog2, unit_bits, fc, lc, fidx, syms, max_len,
    total_bits, symbol_count, out, starts,
):
    """Sequential reference decode from bit 0, recording codeword starts."""
    pos = 0
    for k in range(symbol_count):
        if pos >= total_bits:
            return ERR_TRUNCATED, k
        sym, ln = _next_codeword(
            units, ulog2, unit_bits, fc, lc, fidx, syms, max_len, pos
        )
        if ln == 0:
            return ERR_INVALID, k
        if pos + ln > total_bits:
            return ERR_TRUNCATED, k
        out[k] = sym
        starts[k] = pos
        pos += ln
    return OK, symbol_count


@njit(cache=True, nogil=True)
def mis_sync_decode(
    units, ulog2, unit_bits, fc, lc, fidx, syms, max_len,
    start_bit, total_bits, out,
):
    """Decode from an arbitrary bit offset to stream end.

    A trailing partial codeword is discarded; returns (status, count).
    ``out`` must be able to hold total_bits symbols (worst case 1-bit codes).
    """
    pos = start_bit
    n = 0
    while pos < total_bits:
        sym, ln = _next_codeword(
            units, ulog2, unit_bits, fc, lc, fidx, syms, max_len, pos
        )
        if ln == 0:
            return ERR_INVALID, n
        if pos + ln > total_bits:
            break
        out[n] = sym
        n += 1
        pos += ln
    return OK, n


@njit(cache=True, nogil=True)
def encode_pack(symbols, codes, lens, units, ulog2, unit_bits, subseq_bits, gap):
    """Pack codewords MSB-first into ``units`` (preallocated, zeroed).

    When ``gap`` is non-empty, entry i receives the forward skip from
    subsequence boundary i to the first codeword start at or past it;
    entries past the last start are left at -1 for the caller to finish.
    Returns total bits written.
    """
    nsub = gap.shape[0]
    nb = 1
    pos = 0
    for idx in range(symbols.shape[0]):
        s = symbols[idx]
        ln = lens[s]
        c = codes[s]
        while nb < nsub and pos >= nb * subseq_bits:
            gap[nb] = pos - nb * subseq_bits
            nb += 1
        rem = ln
        while rem > 0:
            off = pos & (unit_bits - 1)
            space = unit_bits - off
            take = min(rem, space)
            chunk = (c >> (rem - take)) & ((1 << take) - 1)
            units[pos >> ulog2] |= np.uint32(chunk << (space - take))
            pos += take
            rem -= take
    return pos


@njit(cache=True, nogil=True)
def quantize_chain(data, twice_eb, midpoint, ncodes, codes, outliers):
    """Predecessor-predicted quantization with round-half-away-from-zero.

    Reconstructions are rounded to float32 so a round trip through raw
    float32 files reproduces them bit for bit.  A residual whose code falls
    outside the code range, or whose rounded reconstruction misses the
    error bound, is flagged in ``outliers`` and coded as the midpoint;
    reconstruction is exact at those points.  Returns the outlier count.
    """
    eb = 0.5 * twice_eb
    pred = 0.0
    n_out = 0
    for i in range(data.shape[0]):
        d = (data[i] - pred) / twice_eb
        if d >= 0.0:
            q = np.floor(d + 0.5)
        else:
            q = np.ceil(d - 0.5)
        code = int(q) + midpoint
        if 0 <= code < ncodes:
            recon = np.float64(np.float32(pred + twice_eb * (code - midpoint)))
            if np.abs(data[i] - recon) <= eb:
                codes[i] = code
                outliers[i] = False
                pred = recon
                continue
        codes[i] = midpoint
        outliers[i] = True
        n_out += 1
        pred = data[i]
    return n_out


@njit(cache=True, nogil=True)
def dequantize_chain(codes, outlier_idx, outlier_val, twice_eb, midpoint, out):
    pred = 0.0
    j = 0
    for i in range(codes.shape[0]):
        if j < outlier_idx.shape[0] and outlier_idx[j] == i:
            pred = outlier_val[j]
            j += 1
        else:
            pred = np.float64(np.float32(pred + twice_eb * (codes[i] - midpoint)))
        out[i] = pred
    return out
