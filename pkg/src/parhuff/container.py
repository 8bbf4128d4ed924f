"""On-disk container for encoded streams.

Layout (all integers little-endian):

    [4B]  magic "HUF2"
    [1B]  version = 1
    [1B]  symbol_width_bits
    [1B]  unit_bits
    [1B]  flags (bit0: gap array present)
    [4B]  units_per_subseq (u32)
    [4B]  subseqs_per_seq (u32)
    [8B]  symbol_count (u64)
    [8B]  total_bits (u64)
    [4B]  alphabet_size (u32)
    [aB]  canonical code lengths, one byte per symbol, 0 = absent
    [8B]  gap entry count (u64)   -- only when flagged
    [gB]  gap bytes               -- only when flagged
    [8B]  unit word count (u64)
    [..]  unit words, little-endian, unit_bits wide

Containers describe canonical codebooks (lengths fully determine them).
A stream encoded against an explicit codebook stores its lengths; decoding
such a container needs the same explicit book supplied out of band.
Empty streams store an alphabet size of zero.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .bitstream import EncodedStream, LayoutConfig
from .codebook import Codebook, canonize
from .errors import ContainerError

MAGIC = b"HUF2"
VERSION = 1
FLAG_GAP = 0x01

_HEADER = struct.Struct("<4sBBBBIIQQI")
_U64 = struct.Struct("<Q")
_UNIT_DTYPE = {8: "<u1", 16: "<u2", 32: "<u4"}


def write_container(stream: EncodedStream, path: str | Path) -> None:
    lay = stream.layout
    flags = FLAG_GAP if stream.gap is not None else 0
    if stream.symbol_count == 0:
        lengths = b""
    else:
        alphabet = max(stream.codebook.entries) + 1
        length_bytes = bytearray(alphabet)
        for sym, (_, ln) in stream.codebook.entries.items():
            length_bytes[sym] = ln
        lengths = bytes(length_bytes)

    with open(path, "wb") as f:
        f.write(
            _HEADER.pack(
                MAGIC, VERSION, stream.codebook.symbol_width, lay.unit_bits, flags,
                lay.units_per_subseq, lay.subseqs_per_seq,
                stream.symbol_count, stream.total_bits, len(lengths),
            )
        )
        f.write(lengths)
        if stream.gap is not None:
            f.write(_U64.pack(len(stream.gap)))
            f.write(stream.gap.tobytes())
        f.write(_U64.pack(len(stream.units)))
        f.write(stream.units.astype(_UNIT_DTYPE[lay.unit_bits]).tobytes())


def read_container(path: str | Path, codebook: Codebook | None = None) -> EncodedStream:
    """Read a container; ``codebook`` overrides the stored lengths (needed
    for containers written against explicit codebooks)."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ContainerError("file shorter than container header")
    (magic, version, width, unit_bits, flags, ups, sps,
     symbol_count, total_bits, alphabet) = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ContainerError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")
    if unit_bits not in _UNIT_DTYPE:
        raise ContainerError(f"bad unit width {unit_bits}")
    off = _HEADER.size

    lengths = data[off : off + alphabet]
    if len(lengths) != alphabet:
        raise ContainerError("truncated codebook lengths")
    off += alphabet
    if codebook is None:
        length_map = {sym: ln for sym, ln in enumerate(lengths) if ln}
        if length_map:
            codebook = canonize(length_map, symbol_width=width)
        elif symbol_count == 0:
            codebook = canonize({0: 1}, symbol_width=width)
        else:
            raise ContainerError("container has symbols but an empty codebook")

    layout = LayoutConfig(unit_bits=unit_bits, units_per_subseq=ups, subseqs_per_seq=sps)
    gap = None
    if flags & FLAG_GAP:
        if off + _U64.size > len(data):
            raise ContainerError("truncated gap section")
        (gap_count,) = _U64.unpack_from(data, off)
        off += _U64.size
        gap = np.frombuffer(data, dtype=np.uint8, count=gap_count, offset=off)
        if len(gap) != gap_count:
            raise ContainerError("truncated gap bytes")
        off += gap_count

    if off + _U64.size > len(data):
        raise ContainerError("truncated unit section")
    (unit_count,) = _U64.unpack_from(data, off)
    off += _U64.size
    dtype = np.dtype(_UNIT_DTYPE[unit_bits])
    if off + unit_count * dtype.itemsize > len(data):
        raise ContainerError("truncated unit words")
    units = np.frombuffer(data, dtype=dtype, count=unit_count, offset=off).astype(np.uint32)

    try:
        return EncodedStream(
            layout=layout,
            units=units,
            total_bits=total_bits,
            symbol_count=symbol_count,
            codebook=codebook,
            gap=gap.copy() if gap is not None else None,
        )
    except ValueError as e:
        raise ContainerError(str(e)) from e
