"""Gap-array decoder.

Entry points come straight from the stored gap array, so no speculative
decoding happens at all: a counting pass decodes each subsequence once to
determine output indices, then the shared staged decode-and-write pass
produces the output.  Subsequence slots are fully independent in both
passes; the gap array removed the only inter-slot dependency.
"""

from __future__ import annotations

import numpy as np

from ._dispatch import count_windows
from ._timing import phase_timer
from .bitstream import EncodedStream
from .errors import BadGap, NotPresent
from .staging import DEFAULT_CAPACITY, DecodeStats, chunk_ranges, decode_write, run_tasks
from .state import SyncState, output_index

__all__ = ["entries_from_gap", "count_pass", "decode"]


def entries_from_gap(stream: EncodedStream) -> SyncState:
    """Build an all-synced state whose entries are boundary + gap skip."""
    if stream.gap is None:
        raise NotPresent("stream carries no gap array")
    n = stream.num_subseqs
    state = SyncState.empty(n, stream.num_seqs)
    boundaries = np.arange(n, dtype=np.int64) * stream.layout.subseq_bits
    state.entry_bits[:] = boundaries + stream.gap
    state.synced[:] = True
    return state


def count_pass(
    stream: EncodedStream,
    state: SyncState,
    workers: int = 1,
    stats: DecodeStats | None = None,
) -> np.ndarray:
    """Decode each slot from its entry to the next entry, counting symbols.

    Returns the exclusive prefix sum of the counts.  A gap entry that does
    not land on a codeword boundary is detected lazily: either the decode
    trips over an unmatched bit pattern or the total count disagrees with
    the stream header.
    """
    n = stream.num_subseqs
    stops = np.empty(n, dtype=np.int64)
    if n:
        stops[:-1] = state.entry_bits[1:]
        stops[-1] = stream.total_bits

    def task(lo: int, hi: int):
        return count_windows(
            stream, state.entry_bits, stops, lo, hi, state.counts, state.exit_bits
        )

    results = run_tasks(task, chunk_ranges(n, workers), workers)
    if stats is not None:
        stats.add_bits("count_pass", sum(results))
    oi = output_index(state.counts)
    if int(oi[-1]) != stream.symbol_count:
        raise BadGap(
            f"gap entries yield {int(oi[-1])} symbols, header says {stream.symbol_count}"
        )
    return oi


def decode(
    stream: EncodedStream,
    workers: int = 1,
    capacity: int = DEFAULT_CAPACITY,
    tuner_config=None,
    stats: DecodeStats | None = None,
    timings: dict | None = None,
) -> np.ndarray:
    """Decode a stream using its gap array; returns the symbol array."""
    from . import tuner as tuner_mod

    with phase_timer(timings, "entries_from_gap"):
        state = entries_from_gap(stream)
    with phase_timer(timings, "count_pass"):
        oi = count_pass(stream, state, workers=workers, stats=stats)
    if tuner_config is not None:
        with phase_timer(timings, "tune"):
            plan = tuner_mod.plan(stream, tuner_mod.sequence_counts(stream, state.counts), tuner_config)
        with phase_timer(timings, "decode_write"):
            return tuner_mod.decode_partitioned(stream, plan, state, oi, workers=workers, stats=stats)
    with phase_timer(timings, "decode_write"):
        return decode_write(stream, state, oi, capacity=capacity, workers=workers, stats=stats)
