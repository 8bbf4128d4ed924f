"""Compression-ratio driven staging-capacity tuner.

Sequences are classified by their compression ratio into t_high groups
covering (0,1], (1,2], ..., (t_high-1, t_high] plus one overflow group for
everything above.  A histogram, a stable key-value sort, and an exclusive
prefix over the class counts turn the classification into per-class spans
of sequence indices; each class then runs the staged decode-and-write pass
with a capacity sized for its ratio (proportional below the threshold,
a fixed 3584 symbols for the overflow group).  Class passes write disjoint
output ranges, so they can run concurrently in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitstream import EncodedStream
from .errors import NonPositiveRatio
from .staging import DecodeStats, chunk_ranges, decode_write, run_tasks
from .state import SyncState

OVERFLOW_CAPACITY = 3584
SYMBOLS_PER_CLASS = 1024


@dataclass(frozen=True)
class TunerConfig:
    t_high: int = 8
    capacity_table: dict[int, int] | None = None

    def __post_init__(self):
        if self.t_high < 1:
            raise ValueError("t_high must be >= 1")
        if self.capacity_table:
            bad = [c for c, n in self.capacity_table.items() if n < 1]
            if bad:
                raise ValueError(f"capacities must be >= 1, got {self.capacity_table}")


@dataclass
class PartitionPlan:
    """Per-sequence classification plus the derived partition tables.

    ``permutation`` holds sequence indices stably sorted by class;
    ``class_start``/``class_freq`` delimit each class's span inside it.
    Classes are 1-based in the API (1..t_high+1) and stored 0-based in the
    arrays here.
    """

    t_high: int
    comp_ratio: np.ndarray
    comp_class: np.ndarray
    class_freq: np.ndarray
    permutation: np.ndarray
    class_start: np.ndarray
    capacity: np.ndarray

    def class_sequences(self, cls: int) -> np.ndarray:
        """Sequence indices belonging to 1-based class ``cls``."""
        i = cls - 1
        start = int(self.class_start[i])
        return self.permutation[start : start + int(self.class_freq[i])]


def classify(ratio: float, t_high: int) -> int:
    """Class of one compression ratio: ceil(ratio) capped into the overflow
    group above t_high."""
    if ratio <= 0:
        raise NonPositiveRatio(f"compression ratio must be > 0, got {ratio}")
    if ratio > t_high:
        return t_high + 1
    return math.ceil(ratio)


def histogram(classes, t_high: int) -> np.ndarray:
    """How many sequences fall into each of the t_high+1 groups."""
    classes = np.asarray(classes, dtype=np.int64)
    return np.bincount(classes - 1, minlength=t_high + 1).astype(np.int64)


def sort_by_class(classes) -> np.ndarray:
    """Stable key-value sort: classes as keys, sequence indices as values."""
    return np.argsort(np.asarray(classes), kind="stable").astype(np.int64)


def class_starts(class_freq) -> np.ndarray:
    """Exclusive prefix sum over the class histogram."""
    class_freq = np.asarray(class_freq, dtype=np.int64)
    out = np.zeros(max(len(class_freq), 1), dtype=np.int64)
    if len(class_freq) > 1:
        np.cumsum(class_freq[:-1], out=out[1:])
    return out


def capacity(cls: int, config: TunerConfig) -> int:
    """Staging symbols for 1-based class ``cls``."""
    if not 1 <= cls <= config.t_high + 1:
        raise ValueError(f"class {cls} outside 1..{config.t_high + 1}")
    if config.capacity_table and cls in config.capacity_table:
        return int(config.capacity_table[cls])
    if cls > config.t_high:
        return OVERFLOW_CAPACITY
    return cls * SYMBOLS_PER_CLASS


def sequence_counts(stream: EncodedStream, subseq_counts: np.ndarray) -> np.ndarray:
    """Sum per-subsequence symbol counts into per-sequence counts."""
    if stream.num_seqs == 0:
        return np.zeros(0, dtype=np.int64)
    firsts = np.arange(stream.num_seqs, dtype=np.int64) * stream.layout.subseqs_per_seq
    return np.add.reduceat(np.asarray(subseq_counts, dtype=np.int64), firsts)


def plan(stream: EncodedStream, seq_counts: np.ndarray, config: TunerConfig) -> PartitionPlan:
    """Classify, histogram, sort, and prefix the sequences of a stream.

    The per-sequence ratio is decoded symbol bits over encoded bits, using
    each sequence's actual bit span (the final sequence is usually short).
    Sequences that decode to zero symbols land in class 1.
    """
    num_seqs = stream.num_seqs
    seq_counts = np.asarray(seq_counts, dtype=np.int64)
    seq_bits = np.full(num_seqs, stream.layout.seq_bits, dtype=np.int64)
    if num_seqs:
        seq_bits[-1] = stream.total_bits - (num_seqs - 1) * stream.layout.seq_bits
    ratios = (seq_counts * stream.codebook.symbol_width) / seq_bits
    classes = np.minimum(
        np.ceil(ratios).astype(np.int64), config.t_high + 1
    )
    classes[seq_counts == 0] = 1
    freq = histogram(classes, config.t_high)
    perm = sort_by_class(classes)
    caps = np.array(
        [capacity(c, config) for c in range(1, config.t_high + 2)], dtype=np.int64
    )
    return PartitionPlan(
        t_high=config.t_high,
        comp_ratio=ratios,
        comp_class=classes,
        class_freq=freq,
        permutation=perm,
        class_start=class_starts(freq),
        capacity=caps,
    )


def decode_partitioned(
    stream: EncodedStream,
    plan_: PartitionPlan,
    state: SyncState,
    out_index: np.ndarray,
    workers: int = 1,
    out: np.ndarray | None = None,
    stats: DecodeStats | None = None,
) -> np.ndarray:
    """Run the staged write pass per compression-ratio class.

    Empty classes launch nothing.  All class passes share one output array
    and write disjoint ranges, so scheduling cannot affect the result.
    """
    if out is None:
        out = np.empty(int(out_index[-1]), dtype=np.uint16)
    tasks = []
    for cls in range(1, plan_.t_high + 2):
        seqs = plan_.class_sequences(cls)
        if seqs.size == 0:
            continue
        cap = int(plan_.capacity[cls - 1])
        for lo, hi in chunk_ranges(len(seqs), workers):
            tasks.append((seqs[lo:hi], cap))

    def task(seq_ids, cap):
        local = DecodeStats() if stats is not None else None
        decode_write(
            stream, state, out_index,
            capacity=cap, workers=1, sequences=seq_ids, out=out, stats=local,
        )
        return local

    results = run_tasks(task, tasks, workers)
    if stats is not None:
        for local in results:
            for phase, bits in local.phase_bits.items():
                stats.add_bits(phase, bits)
            stats.write_rounds += local.write_rounds
            stats.staged_slots += local.staged_slots
            stats.bypass_slots += local.bypass_slots
    return out
