import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import parhuff as ph

# Listing-style self-synchronizing example book used across the tests.
SYNC_BOOK = {ord("A"): "00", ord("B"): "10", ord("C"): "11", ord("D"): "010", ord("E"): "011"}
WORKED_TEXT = "BACACCBDBAAEBBA"
WORKED_BYTES = bytes([0x8C, 0xF9, 0x40, 0xE8])
SYNC_TEXT = "CBADCBA"
SYNC_BITS = "111000010111000"


def chars(text: str) -> list[int]:
    return [ord(c) for c in text]


def text(symbols) -> str:
    return "".join(chr(int(s)) for s in symbols)


@pytest.fixture(scope="session")
def sync_book() -> ph.Codebook:
    return ph.from_explicit(ph.codes_from_strings(SYNC_BOOK))


@pytest.fixture(scope="session")
def byte_layout() -> ph.LayoutConfig:
    """One 8-bit unit per subsequence: the layout of the worked examples."""
    return ph.LayoutConfig(unit_bits=8, units_per_subseq=1, subseqs_per_seq=32)


@pytest.fixture(scope="session")
def worked_stream(sync_book, byte_layout) -> ph.EncodedStream:
    return ph.encode(chars(WORKED_TEXT), sync_book, byte_layout, with_gap=True)


@pytest.fixture(scope="session")
def sync_stream(sync_book, byte_layout) -> ph.EncodedStream:
    return ph.encode(chars(SYNC_TEXT), sync_book, byte_layout)


def make_book(freqs: dict[int, int], width: int | None = None) -> ph.Codebook:
    return ph.canonize(ph.build_lengths(freqs), symbol_width=width)


def book_for(symbols: np.ndarray, width: int) -> ph.Codebook:
    symbols = np.asarray(symbols)
    if symbols.size == 0:
        return ph.canonize({0: 1}, symbol_width=width)
    values, counts = np.unique(symbols, return_counts=True)
    return make_book({int(v): int(c) for v, c in zip(values, counts)}, width)


def build_stream(symbols, width=16, layout=ph.DEFAULT_LAYOUT, with_gap=True) -> ph.EncodedStream:
    symbols = np.asarray(symbols, dtype=np.uint16)
    return ph.encode(symbols, book_for(symbols, width), layout, with_gap=with_gap)


def random_symbols(rng: np.random.Generator, n: int, alphabet: int) -> np.ndarray:
    """Zipf-flavored draw so code lengths vary within one stream."""
    weights = 1.0 / np.arange(1, alphabet + 1, dtype=np.float64)
    weights /= weights.sum()
    return rng.choice(alphabet, size=n, p=weights).astype(np.uint16)
