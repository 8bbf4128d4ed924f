"""Huffman codebooks: length assignment, canonical codes, decode tables.

Symbols are unsigned integers of width 8 or 16 bits.  Codeword lengths are
capped at 32 bits so no codeword ever spans more than two 32-bit units;
frequency maps skewed enough to exceed the cap raise LengthOverflow instead
of being rebalanced.

Two codebook kinds exist:

* ``canonical`` -- the production path.  Codes are fully determined by the
  length of each symbol plus symbol order, so a codebook serializes as one
  length byte per symbol.
* ``explicit`` -- an arbitrary prefix-free symbol -> (code, length) map.
  Kept so that externally specified code tables can be reproduced bit for
  bit; decoding uses a binary trie instead of canonical arrays.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import (
    EmptyInput,
    InvalidCode,
    KraftViolation,
    LengthOverflow,
    NotPrefixFree,
    Truncated,
)

MAX_CODE_LEN = 32


def build_lengths(freqs: Mapping[int, int]) -> dict[int, int]:
    """Assign optimal prefix-code lengths to symbols by frequency.

    Ties are broken by (count, symbol value), with merged subtrees ordered
    after same-count leaves, so results are identical across platforms.
    A single-symbol alphabet gets a 1-bit code; zero-length codes would
    break bitstream framing.
    """
    items = sorted((s, c) for s, c in freqs.items() if c > 0)
    if not items:
        raise EmptyInput("no symbol has a nonzero count")
    if len(items) == 1:
        return {items[0][0]: 1}

    # Heap entries are (count, order, payload); leaf orders follow symbol
    # order, merged nodes are created later and therefore lose ties.
    heap: list[tuple[int, int, object]] = [
        (count, order, sym) for order, (sym, count) in enumerate(items)
    ]
    heapq.heapify(heap)
    order = len(items)
    while len(heap) > 1:
        c1, _, n1 = heapq.heappop(heap)
        c2, _, n2 = heapq.heappop(heap)
        heapq.heappush(heap, (c1 + c2, order, (n1, n2)))
        order += 1

    lengths: dict[int, int] = {}
    stack = [(heap[0][2], 0)]
    while stack:
        node, depth = stack.pop()
        if isinstance(node, tuple):
            stack.append((node[0], depth + 1))
            stack.append((node[1], depth + 1))
        else:
            lengths[node] = depth
    if max(lengths.values()) > MAX_CODE_LEN:
        raise LengthOverflow(
            f"optimal code needs {max(lengths.values())} bits (cap {MAX_CODE_LEN})"
        )
    return lengths


def _kraft_scaled(lengths: Mapping[int, int]) -> int:
    """Sum of 2^(MAX_CODE_LEN - len); 2^MAX_CODE_LEN means Kraft equality."""
    return sum(1 << (MAX_CODE_LEN - ln) for ln in lengths.values())


def canonize(lengths: Mapping[int, int], symbol_width: int | None = None) -> "Codebook":
    """Turn a symbol -> length map into the canonical codebook.

    Symbols sorted by (length, symbol value) receive consecutive code
    values, shifting left whenever the length increases.
    """
    if not lengths:
        raise EmptyInput("empty length map")
    for sym, ln in lengths.items():
        if not 1 <= ln <= MAX_CODE_LEN:
            raise LengthOverflow(f"length {ln} for symbol {sym} outside 1..{MAX_CODE_LEN}")
    if _kraft_scaled(lengths) > (1 << MAX_CODE_LEN):
        raise KraftViolation("code lengths exceed the Kraft inequality")

    entries: dict[int, tuple[int, int]] = {}
    code = 0
    prev_len = 0
    for sym, ln in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
        code <<= ln - prev_len
        prev_len = ln
        entries[sym] = (code, ln)
        code += 1
    return Codebook(
        symbol_width=symbol_width or _width_for(max(lengths)),
        entries=entries,
        kind="canonical",
    )


def from_explicit(
    entries: Mapping[int, tuple[int, int]], symbol_width: int | None = None
) -> "Codebook":
    """Wrap an explicit symbol -> (code, length) map, checking prefix-freeness."""
    book = Codebook(
        symbol_width=symbol_width or _width_for(max(entries, default=0)),
        entries={s: (int(c), int(ln)) for s, (c, ln) in entries.items()},
        kind="explicit",
    )
    book.decode_table()  # trie construction detects prefix violations
    return book


def codes_from_strings(codes: Mapping[int, str]) -> dict[int, tuple[int, int]]:
    """Convenience: {symbol: "0101"} -> {symbol: (code, length)}."""
    return {s: (int(bits, 2), len(bits)) for s, bits in codes.items()}


def _width_for(max_symbol: int) -> int:
    return 8 if max_symbol < 256 else 16


@dataclass
class Codebook:
    """Prefix-free code assignment.  Immutable after construction."""

    symbol_width: int
    entries: dict[int, tuple[int, int]]
    kind: str = "canonical"
    _table: "DecodeTable | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.symbol_width not in (8, 16):
            raise ValueError(f"symbol width must be 8 or 16, got {self.symbol_width}")
        for sym, (code, ln) in self.entries.items():
            if not 1 <= ln <= MAX_CODE_LEN:
                raise LengthOverflow(f"length {ln} for symbol {sym}")
            if sym < 0 or sym >= (1 << self.symbol_width):
                raise ValueError(f"symbol {sym} outside {self.symbol_width}-bit range")
            if code < 0 or code >= (1 << ln):
                raise ValueError(f"code {code} does not fit in {ln} bits")

    @property
    def max_len(self) -> int:
        return max(ln for _, ln in self.entries.values())

    def lengths(self) -> dict[int, int]:
        return {s: ln for s, (_, ln) in self.entries.items()}

    def encode_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense (code, length) lookup arrays indexed by symbol value.

        Length 0 marks an absent symbol.
        """
        size = 1 << self.symbol_width
        codes = np.zeros(size, dtype=np.int64)
        lens = np.zeros(size, dtype=np.uint8)
        for sym, (code, ln) in self.entries.items():
            codes[sym] = code
            lens[sym] = ln
        return codes, lens

    def decode_table(self) -> "DecodeTable":
        if self._table is None:
            self._table = DecodeTable.build(self)
        return self._table


@dataclass
class DecodeTable:
    """Decode-side realization of a codebook.

    Canonical books decode through per-length first-code / first-index
    arrays over a canonically sorted symbol array; explicit books walk a
    binary trie stored as flat child/symbol arrays.
    """

    kind: str
    max_len: int
    # canonical representation (index = code length, 0 unused)
    first_code: np.ndarray | None = None
    len_count: np.ndarray | None = None
    first_index: np.ndarray | None = None
    symbols: np.ndarray | None = None
    # explicit representation
    trie_child: np.ndarray | None = None  # shape (nodes, 2), -1 = absent
    trie_symbol: np.ndarray | None = None  # -1 = internal node

    @staticmethod
    def build(book: Codebook) -> "DecodeTable":
        if book.kind == "canonical":
            return DecodeTable._build_canonical(book)
        return DecodeTable._build_trie(book)

    @staticmethod
    def _build_canonical(book: Codebook) -> "DecodeTable":
        max_len = book.max_len
        by_len_sym = sorted(book.entries.items(), key=lambda kv: (kv[1][1], kv[0]))
        len_count = np.zeros(MAX_CODE_LEN + 1, dtype=np.int64)
        for _, (_, ln) in by_len_sym:
            len_count[ln] += 1
        first_code = np.zeros(MAX_CODE_LEN + 1, dtype=np.int64)
        first_index = np.zeros(MAX_CODE_LEN + 1, dtype=np.int64)
        code = 0
        index = 0
        for ln in range(1, MAX_CODE_LEN + 1):
            first_code[ln] = code
            first_index[ln] = index
            code = (code + len_count[ln]) << 1
            index += len_count[ln]
        symbols = np.array([s for s, _ in by_len_sym], dtype=np.uint16)
        return DecodeTable(
            kind="canonical",
            max_len=max_len,
            first_code=first_code,
            len_count=len_count,
            first_index=first_index,
            symbols=symbols,
        )

    @staticmethod
    def _build_trie(book: Codebook) -> "DecodeTable":
        child: list[list[int]] = [[-1, -1]]
        symbol: list[int] = [-1]
        for sym, (code, ln) in sorted(book.entries.items()):
            node = 0
            for i in range(ln - 1, -1, -1):
                if symbol[node] >= 0:
                    raise NotPrefixFree(f"code of symbol {symbol[node]} prefixes symbol {sym}")
                bit = (code >> i) & 1
                nxt = child[node][bit]
                if nxt < 0:
                    nxt = len(child)
                    child[node][bit] = nxt
                    child.append([-1, -1])
                    symbol.append(-1)
                node = nxt
            if symbol[node] >= 0 or child[node] != [-1, -1]:
                raise NotPrefixFree(f"code of symbol {sym} collides with another codeword")
            symbol[node] = sym
        return DecodeTable(
            kind="explicit",
            max_len=book.max_len,
            trie_child=np.array(child, dtype=np.int32),
            trie_symbol=np.array(symbol, dtype=np.int32),
        )


def decode_one(table: DecodeTable, source, cursor: int) -> tuple[int, int]:
    """Decode a single codeword starting at ``cursor`` in a bit source.

    The source must offer ``read_bits(cursor, k)`` and a ``total_bits``
    attribute (EncodedStream does).  Returns (symbol, bits consumed).
    """
    total = source.total_bits
    if table.kind == "canonical":
        code = 0
        for ln in range(1, table.max_len + 1):
            if cursor + ln > total:
                raise Truncated("bit source ended mid-codeword")
            code = (code << 1) | source.read_bits(cursor + ln - 1, 1)
            offset = code - table.first_code[ln]
            if 0 <= offset < table.len_count[ln]:
                return int(table.symbols[table.first_index[ln] + offset]), ln
        raise InvalidCode(f"no codeword matches bits at {cursor}")
    node = 0
    consumed = 0
    while True:
        if cursor + consumed >= total:
            raise Truncated("bit source ended mid-codeword")
        bit = source.read_bits(cursor + consumed, 1)
        node = int(table.trie_child[node, bit])
        consumed += 1
        if node < 0:
            raise InvalidCode(f"no codeword matches bits at {cursor}")
        sym = int(table.trie_symbol[node])
        if sym >= 0:
            return sym, consumed
