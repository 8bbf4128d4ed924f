"""Bit-exact layout of encoded data: units, subsequences, sequences.

A unit is a fixed-width word (8, 16, or 32 bits; default 32) holding packed
codeword bits, consumed MSB-first within each unit, units in array order.
A subsequence is a fixed run of units (default 4, i.e. 128 bits) -- the work
item of one decoding slot.  A sequence is a fixed run of subsequences
(default 32) -- the work item of one task group.

``total_bits`` counts meaningful payload bits; the final unit is zero padded.
Reads beyond ``total_bits`` return zeros (speculative synchronization decodes
rely on this); reads with a cursor beyond the padded storage raise OutOfRange.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook
from .errors import OutOfRange

_ULOG2 = {8: 3, 16: 4, 32: 5}


@dataclass(frozen=True)
class LayoutConfig:
    unit_bits: int = 32
    units_per_subseq: int = 4
    subseqs_per_seq: int = 32

    def __post_init__(self):
        if self.unit_bits not in _ULOG2:
            raise ValueError(f"unit_bits must be 8, 16, or 32, got {self.unit_bits}")
        if self.units_per_subseq < 1 or self.subseqs_per_seq < 1:
            raise ValueError("units_per_subseq and subseqs_per_seq must be positive")

    @property
    def unit_bits_log2(self) -> int:
        return _ULOG2[self.unit_bits]

    @property
    def subseq_bits(self) -> int:
        return self.unit_bits * self.units_per_subseq

    @property
    def seq_bits(self) -> int:
        return self.subseq_bits * self.subseqs_per_seq


DEFAULT_LAYOUT = LayoutConfig()


def subseq_boundary(layout: LayoutConfig, i: int) -> int:
    """Absolute bit index where subsequence ``i`` begins."""
    if i < 0:
        raise ValueError("subsequence index must be >= 0")
    return i * layout.subseq_bits


@dataclass
class EncodedStream:
    """Immutable encoded payload plus framing metadata.

    ``units`` always uses a uint32 numpy array regardless of unit width;
    each word holds ``layout.unit_bits`` meaningful bits.  ``gap`` is one
    byte per subsequence when present.
    """

    layout: LayoutConfig
    units: np.ndarray
    total_bits: int
    symbol_count: int
    codebook: Codebook
    gap: np.ndarray | None = None

    def __post_init__(self):
        self.units = np.ascontiguousarray(self.units, dtype=np.uint32)
        expected = -(-self.total_bits // self.layout.unit_bits)
        if len(self.units) != expected:
            raise ValueError(
                f"units array has {len(self.units)} words, expected {expected}"
            )
        if self.gap is not None:
            self.gap = np.ascontiguousarray(self.gap, dtype=np.uint8)
            if len(self.gap) != self.num_subseqs:
                raise ValueError(
                    f"gap array has {len(self.gap)} entries for {self.num_subseqs} subsequences"
                )
        self.units.setflags(write=False)

    @property
    def storage_bits(self) -> int:
        return len(self.units) * self.layout.unit_bits

    @property
    def num_subseqs(self) -> int:
        return -(-self.total_bits // self.layout.subseq_bits)

    @property
    def num_seqs(self) -> int:
        return -(-self.num_subseqs // self.layout.subseqs_per_seq)

    def seq_slots(self, s: int) -> tuple[int, int]:
        """Global subsequence index range [first, last) of sequence ``s``."""
        first = s * self.layout.subseqs_per_seq
        return first, min(first + self.layout.subseqs_per_seq, self.num_subseqs)

    def read_bits(self, cursor: int, k: int) -> int:
        """Read ``k`` bits MSB-first starting at ``cursor``.

        Bits beyond the padded storage read as zero; a cursor outside the
        storage itself is an error.
        """
        if k < 0 or k > 32:
            raise ValueError("k must be in 0..32")
        if cursor < 0 or cursor > self.storage_bits:
            raise OutOfRange(f"cursor {cursor} outside padded storage ({self.storage_bits} bits)")
        u = self.layout.unit_bits
        value = 0
        need = k
        pos = cursor
        while need > 0:
            w, off = divmod(pos, u)
            take = min(need, u - off)
            word = int(self.units[w]) if w < len(self.units) else 0
            chunk = (word >> (u - off - take)) & ((1 << take) - 1)
            value = (value << take) | chunk
            pos += take
            need -= take
        return value


def read_bits(stream: EncodedStream, cursor: int, k: int) -> int:
    return stream.read_bits(cursor, k)


@dataclass
class BitWriter:
    """Packs MSB-first bit runs into fixed-width units."""

    unit_bits: int = 32
    _words: list[int] = field(default_factory=list)
    _cur: int = 0
    _fill: int = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits < 0 or (nbits < 64 and value >> nbits):
            raise ValueError(f"value {value} does not fit in {nbits} bits")
        while nbits > 0:
            take = min(nbits, self.unit_bits - self._fill)
            chunk = (value >> (nbits - take)) & ((1 << take) - 1)
            self._cur |= chunk << (self.unit_bits - self._fill - take)
            self._fill += take
            nbits -= take
            if self._fill == self.unit_bits:
                self._words.append(self._cur)
                self._cur = 0
                self._fill = 0

    @property
    def bit_length(self) -> int:
        return len(self._words) * self.unit_bits + self._fill

    def getvalue(self) -> np.ndarray:
        words = list(self._words)
        if self._fill:
            words.append(self._cur)
        return np.array(words, dtype=np.uint32)
