"""Internal dispatch between compiled canonical kernels and the Python
trie path used by explicit codebooks.

Both paths implement identical window semantics: a window decode starts at
an entry bit and stops once the cursor crosses the stop bit or total_bits,
counting every codeword whose start lies inside the window.  The Python
side doubles as a readable reference for the kernels and is exercised by
the worked-example reproduction tests; it is not meant for bulk data.
"""

from __future__ import annotations

from . import kernels
from .bitstream import EncodedStream
from .errors import InvalidCode
from .codebook import DecodeTable


def decode_args(stream: EncodedStream):
    """Positional prefix shared by every canonical kernel call."""
    t = stream.codebook.decode_table()
    return (
        stream.units,
        stream.layout.unit_bits_log2,
        stream.layout.unit_bits,
        t.first_code,
        t.len_count,
        t.first_index,
        t.symbols,
        t.max_len,
    )


def _trie_next(stream: EncodedStream, table: DecodeTable, pos: int) -> tuple[int, int]:
    """Explicit-book codeword at ``pos``; zero bits beyond storage."""
    node = 0
    storage = stream.storage_bits
    for consumed in range(1, table.max_len + 1):
        p = pos + consumed - 1
        bit = stream.read_bits(p, 1) if p < storage else 0
        node = int(table.trie_child[node, bit])
        if node < 0:
            return -1, 0
        sym = int(table.trie_symbol[node])
        if sym >= 0:
            return sym, consumed
    return -1, 0


def count_windows(stream, entries, stops, i0, i1, counts, exits) -> int:
    """Fill counts/exits for slots [i0, i1); returns bits decoded."""
    if stream.codebook.kind == "canonical":
        status, slot, bits = kernels.count_windows(
            *decode_args(stream), entries, stops, i0, i1, stream.total_bits, counts, exits
        )
        if status != kernels.OK:
            raise InvalidCode(f"no codeword matches bits in subsequence {slot}")
        return bits
    table = stream.codebook.decode_table()
    bits = 0
    for i in range(i0, i1):
        pos = int(entries[i])
        stop = int(stops[i])
        n = 0
        while pos < stop and pos < stream.total_bits:
            sym, ln = _trie_next(stream, table, pos)
            if ln == 0:
                counts[i] = n
                exits[i] = pos
                raise InvalidCode(f"no codeword matches bits in subsequence {i}")
            pos += ln
            bits += ln
            n += 1
        counts[i] = n
        exits[i] = pos
    return bits


def decode_counted(stream, entries, counts, dest_offsets, out, i0, i1) -> int:
    """Decode counts[i] symbols per slot into ``out``; returns bits decoded."""
    if stream.codebook.kind == "canonical":
        status, slot, bits = kernels.decode_counted(
            *decode_args(stream), entries, counts, dest_offsets, out, i0, i1
        )
        if status != kernels.OK:
            raise InvalidCode(f"no codeword matches bits in subsequence {slot}")
        return bits
    table = stream.codebook.decode_table()
    bits = 0
    for i in range(i0, i1):
        pos = int(entries[i])
        off = int(dest_offsets[i])
        for k in range(int(counts[i])):
            sym, ln = _trie_next(stream, table, pos)
            if ln == 0:
                raise InvalidCode(f"no codeword matches bits in subsequence {i}")
            out[off + k] = sym
            pos += ln
            bits += ln
    return bits
