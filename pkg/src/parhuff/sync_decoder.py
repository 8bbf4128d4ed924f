"""Self-synchronization decoder.

Four phases: speculative intra-sequence synchronization, inter-sequence
seam adjustment, an output-index prefix sum, and the shared staged
decode-and-write pass.

Intra-sequence synchronization models one speculative decoding chain per
slot.  Round 1: every slot decodes its own subsequence from the boundary.
In round k, the chain that has decoded through slot i-1 presents its exit
for slot i: if it matches the entry recorded there, the chains have met
(self-synchronization) and the presenting chain retires; otherwise the new
entry is adopted and that subsequence is re-decoded.  A chain also retires
after decoding the last slot of its sequence, so a sequence needs at most
one round per slot; the loop exits as soon as every chain has retired
rather than idling until the cap.
"""

from __future__ import annotations

import numpy as np

from ._dispatch import count_windows
from ._timing import phase_timer
from .bitstream import EncodedStream
from .errors import NoFixpoint, Truncated
from .staging import DEFAULT_CAPACITY, DecodeStats, chunk_ranges, decode_write, run_tasks
from .state import SyncState, output_index

__all__ = [
    "SyncState",
    "output_index",
    "intra_sync",
    "inter_sync",
    "synchronize",
    "decode",
]


def intra_sync(
    stream: EncodedStream,
    s: int,
    state: SyncState | None = None,
    seed: int | None = None,
    early_exit: bool = True,
    stats: DecodeStats | None = None,
) -> SyncState:
    """Synchronize one sequence's slots; fills the sequence's rows of
    ``state`` (allocating a fresh state when none is passed).

    ``seed`` overrides the first slot's entry bit (used when a preceding
    sequence's exit invalidates the boundary assumption); without it the
    first slot is provisionally synced at its own boundary.
    """
    if state is None:
        state = SyncState.empty(stream.num_subseqs, stream.num_seqs)
    bits = _sync_sequence(stream, state, s, seed=seed, early_exit=early_exit)
    if stats is not None:
        stats.add_bits("sync", bits)
    return state


def _sync_sequence(stream, state, s, seed=None, early_exit=True, round_cap=None):
    """Chain synchronization for sequence ``s``; returns bits decoded."""
    j0, j1 = stream.seq_slots(s)
    nslots = j1 - j0
    if nslots == 0:
        return 0
    sb = stream.layout.subseq_bits
    entries, exits, counts = state.entry_bits, state.exit_bits, state.counts
    stops = _window_stops(stream)
    cap = round_cap if round_cap is not None else nslots
    bits = 0

    # Round 1: speculative decode of every slot from its own entry.
    # Live chains carry (next slot to present at, exit position); the chain
    # of the last slot has nowhere to go and retires immediately.
    live: list[tuple[int, int]] = []
    if seed is None:
        entries[j0:j1] = np.arange(j0, j1, dtype=np.int64) * sb
        bits += count_windows(stream, entries, stops, j0, j1, counts, exits)
        live = [(j + 1, int(exits[j])) for j in range(j0, j1 - 1)]
    else:
        entries[j0] = seed
        bits += count_windows(stream, entries, stops, j0, j0 + 1, counts, exits)
        if nslots > 1:
            live = [(j0 + 1, int(exits[j0]))]

    rounds = 1
    last_active = 1
    while rounds < cap and (live or not early_exit):
        rounds += 1
        nxt: list[tuple[int, int]] = []
        # Within a round every chain targets a distinct slot, so reads of
        # entries[slot] always observe the previous round's values.
        for slot, pos in live:
            if pos == entries[slot]:
                continue  # chains met: the recorded sync point is validated
            entries[slot] = pos
            bits += count_windows(stream, entries, stops, slot, slot + 1, counts, exits)
            if slot + 1 < j1:
                nxt.append((slot + 1, int(exits[slot])))
        if live:
            last_active = rounds
        live = nxt
    if live:
        raise NoFixpoint(f"sequence {s} did not synchronize within {cap} rounds")
    state.synced[j0:j1] = True
    state.iterations[s] = last_active
    return bits


def _window_stops(stream: EncodedStream) -> np.ndarray:
    return np.arange(1, stream.num_subseqs + 1, dtype=np.int64) * stream.layout.subseq_bits


def inter_sync(
    stream: EncodedStream,
    state: SyncState,
    workers: int = 1,
    stats: DecodeStats | None = None,
) -> SyncState:
    """Adjust synchronization points across sequence seams.

    The exit of each sequence's last slot seeds the next sequence's first
    entry; sequences whose seed changed re-run intra-sequence sync from the
    new seed, until a full pass changes nothing.
    """
    num_seqs = stream.num_seqs
    if num_seqs <= 1:
        return state
    k = stream.layout.subseqs_per_seq
    first_slots = np.arange(1, num_seqs, dtype=np.int64) * k
    for _ in range(num_seqs):
        seeds = state.exit_bits[first_slots - 1]
        stale = np.nonzero(seeds != state.entry_bits[first_slots])[0]
        if stale.size == 0:
            return state
        reseed = [(int(i) + 1, int(seeds[i])) for i in stale]

        def task(lo: int, hi: int):
            bits = 0
            for s, seed in reseed[lo:hi]:
                bits += _sync_sequence(stream, state, s, seed=seed)
            return bits

        results = run_tasks(task, chunk_ranges(len(reseed), workers), workers)
        if stats is not None:
            stats.add_bits("sync", sum(results))
    raise NoFixpoint(f"sequence seams did not stabilize within {num_seqs} passes")


def synchronize(
    stream: EncodedStream,
    workers: int = 1,
    early_exit: bool = True,
    stats: DecodeStats | None = None,
) -> SyncState:
    """Full synchronization: intra-sequence in parallel, then seams."""
    state = SyncState.empty(stream.num_subseqs, stream.num_seqs)

    def task(lo: int, hi: int):
        bits = 0
        for s in range(lo, hi):
            bits += _sync_sequence(stream, state, s, early_exit=early_exit)
        return bits

    results = run_tasks(task, chunk_ranges(stream.num_seqs, workers), workers)
    if stats is not None:
        stats.add_bits("sync", sum(results))
    return inter_sync(stream, state, workers=workers, stats=stats)


def decode(
    stream: EncodedStream,
    workers: int = 1,
    capacity: int = DEFAULT_CAPACITY,
    tuner_config=None,
    early_exit: bool = True,
    stats: DecodeStats | None = None,
    timings: dict | None = None,
) -> np.ndarray:
    """Decode a stream without a gap array; returns the symbol array."""
    from . import tuner as tuner_mod

    with phase_timer(timings, "intra_sync"):
        state = SyncState.empty(stream.num_subseqs, stream.num_seqs)

        def task(lo, hi):
            bits = 0
            for s in range(lo, hi):
                bits += _sync_sequence(stream, state, s, early_exit=early_exit)
            return bits

        results = run_tasks(task, chunk_ranges(stream.num_seqs, workers), workers)
        if stats is not None:
            stats.add_bits("sync", sum(results))
    with phase_timer(timings, "inter_sync"):
        inter_sync(stream, state, workers=workers, stats=stats)
    with phase_timer(timings, "output_index"):
        oi = output_index(state.counts)
        if int(oi[-1]) != stream.symbol_count:
            raise Truncated(
                f"synchronized counts give {int(oi[-1])} symbols, header says {stream.symbol_count}"
            )
    if tuner_config is not None:
        with phase_timer(timings, "tune"):
            plan = tuner_mod.plan(stream, tuner_mod.sequence_counts(stream, state.counts), tuner_config)
        with phase_timer(timings, "decode_write"):
            return tuner_mod.decode_partitioned(stream, plan, state, oi, workers=workers, stats=stats)
    with phase_timer(timings, "decode_write"):
        return decode_write(stream, state, oi, capacity=capacity, workers=workers, stats=stats)
