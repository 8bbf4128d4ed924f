"""Acceptance suite.

Each test covers one numbered acceptance criterion and prints a single
PASS/FAIL line (run with ``pytest -s`` to see them).  Criteria 4, 5, and 9
share one randomized property run over ~1000 streams; its summary is built
once per session.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
import pytest

import parhuff as ph
from parhuff import gap_decoder, sync_decoder, tuner
from parhuff.cli import main
from parhuff.staging import decode_write

from conftest import (
    SYNC_BOOK,
    WORKED_BYTES,
    WORKED_TEXT,
    SYNC_BITS,
    SYNC_TEXT,
    book_for,
    build_stream,
    chars,
    random_symbols,
    text,
)
from oracles import stream_bit_string


@contextmanager
def criterion(number: int, description: str):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {number}: FAIL - {description}")
        raise
    print(f"\nACCEPTANCE {number}: PASS - {description}")


# --------------------------------------------------------------------------
# shared randomized property run (criteria 4, 5, 9)
# --------------------------------------------------------------------------

WORKER_GRID = (1, 2, 8)
CAPACITY_GRID = (1, 8, 1024, 3584, 8192)
T_HIGH_GRID = (1, 4, 8)
SHARPNESS_GRID = (0.12, 0.3, 0.46, 0.6, 0.75, 0.9, 0.95, 0.98, 0.999)


@dataclass
class SuiteSummary:
    cases: int = 0
    mismatches: list = field(default_factory=list)
    unsound_points: int = 0
    early_exit_mismatches: int = 0
    early_exit_checked: int = 0
    high_sharpness_mean_rounds: list = field(default_factory=list)
    seconds: float = 0.0


def _case_symbols(rng: np.random.Generator, index: int, n: int):
    """Alternate between zipf-weighted random alphabets and synthetic
    quantization codes; returns (symbols, width, sharpness or None)."""
    if index % 2 == 0:
        sharpness = SHARPNESS_GRID[index // 2 % len(SHARPNESS_GRID)]
        codes = ph.synth_codes(n, sharpness, seed=int(rng.integers(2**31)))
        # keep the alphabet within 4096 distinct values
        deviate = codes.astype(np.int64) - 32768
        codes = (32768 + np.clip(deviate, -2048, 2047)).astype(np.uint16)
        return codes, 16, sharpness
    width = 8 if index % 4 == 1 else 16
    alphabet = int(rng.integers(2, 257 if width == 8 else 4097))
    return random_symbols(rng, n, alphabet), width, None


def _check_case(rng, index, n, summary: SuiteSummary):
    symbols, width, sharpness = _case_symbols(rng, index, n)
    workers = WORKER_GRID[index % len(WORKER_GRID)]
    cap = CAPACITY_GRID[index % len(CAPACITY_GRID)]
    t_high = T_HIGH_GRID[index % len(T_HIGH_GRID)]
    stream = build_stream(symbols, width=width, with_gap=True)
    oracle = ph.oracle_decode(stream)

    state = sync_decoder.synchronize(stream, workers=workers)
    oi = sync_decoder.output_index(state.counts)
    plain = decode_write(stream, state, oi, capacity=cap, workers=workers)
    config = ph.TunerConfig(t_high=t_high)
    plan = tuner.plan(stream, tuner.sequence_counts(stream, state.counts), config)
    partitioned = tuner.decode_partitioned(stream, plan, state, oi, workers=workers)
    via_gap = gap_decoder.decode(stream, workers=workers, capacity=cap)

    ok = (
        np.array_equal(plain, oracle.symbols)
        and np.array_equal(partitioned, plain)
        and np.array_equal(via_gap, oracle.symbols)
    )
    if not ok:
        summary.mismatches.append((index, n, width, sharpness))

    # criterion 5: every validated sync point lies on an oracle codeword
    # start (stream end counts as the virtual final start)
    starts_plus = np.append(oracle.starts, stream.total_bits)
    pos = np.searchsorted(starts_plus, state.entry_bits)
    pos = np.minimum(pos, len(starts_plus) - 1)
    summary.unsound_points += int(np.sum(starts_plus[pos] != state.entry_bits))

    # criterion 9: early exit must not change the final state
    if index % 5 == 0 and n <= 50_000:
        summary.early_exit_checked += 1
        capped = sync_decoder.synchronize(stream, workers=workers, early_exit=False)
        same = (
            np.array_equal(capped.entry_bits, state.entry_bits)
            and np.array_equal(capped.exit_bits, state.exit_bits)
            and np.array_equal(capped.counts, state.counts)
            and np.array_equal(capped.iterations, state.iterations)
        )
        if not same:
            summary.early_exit_mismatches += 1
    if sharpness is not None and sharpness >= 0.9 and stream.num_seqs > 0:
        summary.high_sharpness_mean_rounds.append(float(state.iterations.mean()))
    summary.cases += 1


@pytest.fixture(scope="session")
def suite() -> SuiteSummary:
    rng = np.random.default_rng(0xC0DEC)
    summary = SuiteSummary()
    start = time.perf_counter()
    lengths = [0, 1, 2, 3, 7]
    lengths += [int(x) for x in np.exp(rng.uniform(np.log(4), np.log(20_000), 955))]
    lengths += [100_000] * 36 + [250_000, 500_000, 750_000, 1_000_000]
    for index, n in enumerate(lengths):
        _check_case(rng, index, n, summary)
    summary.seconds = time.perf_counter() - start
    return summary


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------

def test_1_worked_example_bit_patterns(sync_book, byte_layout):
    with criterion(1, "exact worked-example bit patterns"):
        started = time.perf_counter()
        stream = ph.encode(chars(SYNC_TEXT), sync_book, byte_layout)
        assert stream_bit_string(stream) == SYNC_BITS
        assert text(ph.mis_sync_decode(stream, 1)) == "CAABCBA"
        worked = ph.encode(chars(WORKED_TEXT), sync_book, byte_layout)
        assert worked.units.astype("u1").tobytes() == WORKED_BYTES
        assert time.perf_counter() - started < 1.0


def test_2_sync_phase_exactness(worked_stream):
    with criterion(2, "sync points, counts, prefix, and round count on the worked stream"):
        started = time.perf_counter()
        state = sync_decoder.synchronize(worked_stream)
        assert state.entry_bits.tolist() == [0, 8, 17, 26]
        assert state.counts.tolist() == [4, 4, 4, 3]
        assert sync_decoder.output_index(state.counts).tolist() == [0, 4, 8, 12, 15]
        assert state.iterations.tolist() == [3]
        assert time.perf_counter() - started < 1.0


def test_3_gap_conventions(worked_stream, byte_layout):
    with criterion(3, "forward-skip gaps and their signed-convention equivalent"):
        assert worked_stream.gap.tolist() == [0, 0, 1, 2]
        starts = ph.oracle_decode(worked_stream).starts
        assert ph.signed_gaps(starts, byte_layout, worked_stream.total_bits).tolist() == \
            [0, 0, -2, -1]


def test_4_oracle_equivalence_property_suite(suite):
    with criterion(4, f"decoder equivalence on {suite.cases} randomized streams "
                      f"({suite.seconds:.0f}s)"):
        assert suite.cases >= 1000
        assert suite.mismatches == []
        assert suite.seconds <= 600


def test_5_sync_point_soundness(suite):
    with criterion(5, "all validated sync points lie in the oracle start set"):
        assert suite.cases >= 1000
        assert suite.unsound_points == 0


def test_6_error_bound_end_to_end(tmp_path):
    with criterion(6, "quantize-encode-decode-dequantize respects the error bound"):
        rng = np.random.default_rng(606)
        grids = np.linspace(0, 30, 200_000)
        fields = [
            np.sin(grids) * 50 + grids,
            np.cumsum(rng.normal(0, 0.02, 200_000)),
            np.exp(-((grids - 15) ** 2) / 20) * 800 + rng.normal(0, 0.001, 200_000),
        ]
        for i, data64 in enumerate(fields):
            raw = tmp_path / f"field{i}.f32"
            raw.write_bytes(data64.astype("<f4").tobytes())
            data = np.frombuffer(raw.read_bytes(), dtype="<f4").astype(np.float64)
            eb = 1e-3 * (data.max() - data.min())
            q = tmp_path / f"field{i}.quant"
            huf = tmp_path / f"field{i}.huf2"
            rt = tmp_path / f"field{i}.rt.quant"
            back = tmp_path / f"field{i}.back.f32"
            assert main(["quantize", "--rel-eb", "1e-3", str(raw), str(q)]) == 0
            assert main(["encode", "--gap", str(q), str(huf)]) == 0
            decoder = ("sync", "gap", "oracle")[i]
            assert main(["decode", "--decoder", decoder, str(huf), str(rt)]) == 0
            assert rt.read_bytes() == q.read_bytes()
            (tmp_path / f"field{i}.rt.quant.outliers").write_bytes(
                (tmp_path / f"field{i}.quant.outliers").read_bytes()
            )
            assert main(["dequantize", str(rt), str(back)]) == 0
            recon = np.frombuffer(back.read_bytes(), dtype="<f4").astype(np.float64)
            assert np.abs(data - recon).max() <= eb  # 100% of points


def test_7_gap_array_overhead():
    with criterion(7, "gap overhead is 1/16 of payload and <=3% of original at CR>=2.1"):
        codes = ph.synth_codes(2_000_000, 0.5, seed=7)
        stream = build_stream(codes, with_gap=True)
        payload_bytes = stream.total_bits / 8
        original_bytes = codes.size * 2
        cr = original_bytes / payload_bytes
        assert cr >= 2.1
        ratio = len(stream.gap) / payload_bytes
        assert ratio == pytest.approx(1 / 16, rel=0.01)
        assert len(stream.gap) / original_bytes <= 0.03


def test_8_relative_performance_smoke():
    with criterion(8, "staged writes beat capacity-1 scatter by >=1.5x; gap <= sync time"):
        started = time.perf_counter()
        n = 64 * 1024 * 1024 // 2  # 64 MiB of 16-bit codes
        codes = ph.synth_codes(n, 0.999, seed=88)
        stream = ph.encode(codes, book_for(codes, 16), with_gap=True)
        assert codes.size * 16 / stream.total_bits >= 14  # CR around 16

        state = gap_decoder.entries_from_gap(stream)
        oi = gap_decoder.count_pass(stream, state, workers=4)
        t0 = time.perf_counter()
        staged = decode_write(stream, state, oi, capacity=3584, workers=4)
        staged_time = time.perf_counter() - t0
        t0 = time.perf_counter()
        scattered = decode_write(stream, state, oi, capacity=1, workers=4)
        scatter_time = time.perf_counter() - t0
        assert np.array_equal(staged, scattered)
        speedup = scatter_time / staged_time
        print(f"\n  staged {staged_time:.2f}s vs scattered {scatter_time:.2f}s "
              f"({speedup:.2f}x)")
        assert speedup >= 1.5

        t0 = time.perf_counter()
        via_sync = sync_decoder.decode(stream, workers=4)
        sync_time = time.perf_counter() - t0
        t0 = time.perf_counter()
        via_gap = gap_decoder.decode(stream, workers=4)
        gap_time = time.perf_counter() - t0
        print(f"  sync total {sync_time:.2f}s, gap total {gap_time:.2f}s")
        assert np.array_equal(via_sync, via_gap)
        assert np.array_equal(via_sync, codes)
        assert gap_time <= sync_time
        assert time.perf_counter() - started <= 120


def test_9_early_exit_accounting(suite):
    with criterion(9, "early exit preserves state; mean rounds <= 4 on sharp streams"):
        assert suite.early_exit_checked > 100
        assert suite.early_exit_mismatches == 0
        assert len(suite.high_sharpness_mean_rounds) > 50
        assert np.mean(suite.high_sharpness_mean_rounds) <= 4.0


def test_10_tuner_accounting():
    with criterion(10, "tuner histogram/prefix conservation and stated capacities"):
        rng = np.random.default_rng(10)
        for _ in range(50):
            n_seqs = int(rng.integers(1, 400))
            t_high = int(rng.integers(1, 10))
            classes = rng.integers(1, t_high + 2, size=n_seqs)
            freq = tuner.histogram(classes, t_high)
            assert freq.sum() == n_seqs
            starts = tuner.class_starts(freq)
            assert starts[0] == 0
            for i in range(1, t_high + 1):
                assert starts[i] == starts[i - 1] + freq[i - 1]
        config = ph.TunerConfig(t_high=8)
        assert tuner.capacity(4, config) == 4096
        assert tuner.capacity(9, config) == 3584
