"""Synchronization state shared by the decoders.

One row per subsequence: the validated entry bit, the exit bit where
decoding crossed the subsequence end, the number of codewords starting
inside the subsequence, and a synced flag.  ``iterations`` records, per
sequence, the round in which its most recent synchronization finished.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SyncState:
    entry_bits: np.ndarray
    exit_bits: np.ndarray
    counts: np.ndarray
    synced: np.ndarray
    iterations: np.ndarray

    @staticmethod
    def empty(num_subseqs: int, num_seqs: int) -> "SyncState":
        return SyncState(
            entry_bits=np.zeros(num_subseqs, dtype=np.int64),
            exit_bits=np.zeros(num_subseqs, dtype=np.int64),
            counts=np.zeros(num_subseqs, dtype=np.int64),
            synced=np.zeros(num_subseqs, dtype=bool),
            iterations=np.zeros(num_seqs, dtype=np.int32),
        )

    def copy(self) -> "SyncState":
        return SyncState(
            self.entry_bits.copy(),
            self.exit_bits.copy(),
            self.counts.copy(),
            self.synced.copy(),
            self.iterations.copy(),
        )


def output_index(counts: np.ndarray) -> np.ndarray:
    """Exclusive prefix sum of per-subsequence counts, length n+1.

    Entry i is where subsequence i's decoded symbols begin in the output
    array; the final entry is the total symbol count.
    """
    counts = np.asarray(counts, dtype=np.int64)
    out = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=out[1:])
    return out
