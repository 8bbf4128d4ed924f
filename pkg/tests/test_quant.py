import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import parhuff as ph

from conftest import book_for


class TestQuantize:
    def test_worked_example(self):
        config = ph.QuantConfig(error_bound=0.5, symbol_width=16)
        result = ph.quantize([0.0, 1.0, 1.2], config)
        assert result.codes.tolist() == [32768, 32769, 32768]
        recon = ph.dequantize(result, config)
        assert recon.tolist() == [0.0, 1.0, 1.0]
        assert np.abs(np.array([0.0, 1.0, 1.2]) - recon).max() <= 0.5

    def test_constant_array(self):
        config = ph.QuantConfig(error_bound=1e-3)
        result = ph.quantize(np.zeros(100), config)
        assert (result.codes == config.midpoint).all()
        assert len(result.outlier_indices) == 0

    def test_jump_becomes_outlier(self):
        config = ph.QuantConfig(error_bound=1e-6, symbol_width=8)
        data = np.array([0.0, 1000.0, 1000.0])
        result = ph.quantize(data, config)
        assert result.outlier_indices.tolist() == [1]
        assert result.codes[1] == config.midpoint
        recon = ph.dequantize(result, config)
        assert recon[1] == 1000.0  # exact at the outlier

    def test_all_midpoint_codes_decode_to_zero(self):
        config = ph.QuantConfig(error_bound=0.25)
        result = ph.QuantResult(
            codes=np.full(50, config.midpoint, dtype=np.uint16),
            outlier_indices=np.zeros(0, dtype=np.int64),
            outlier_values=np.zeros(0),
        )
        assert (ph.dequantize(result, config) == 0.0).all()

    def test_non_finite_rejected(self):
        config = ph.QuantConfig(error_bound=0.1)
        with pytest.raises(ph.NonFiniteInput):
            ph.quantize([0.0, np.nan], config)
        with pytest.raises(ph.NonFiniteInput):
            ph.quantize([np.inf], config)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ph.QuantConfig(error_bound=0.0)
        with pytest.raises(ValueError):
            ph.QuantConfig(error_bound=0.1, symbol_width=12)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(min_value=-1e6, max_value=1e6), max_size=400),
        st.floats(min_value=1e-6, max_value=1e3),
    )
    def test_error_bound_property(self, values, eb):
        config = ph.QuantConfig(error_bound=eb)
        data = np.array(values)
        recon = ph.dequantize(ph.quantize(data, config), config)
        if data.size:
            assert np.abs(data - recon).max() <= eb

    def test_error_bound_survives_float32_files(self):
        """Reconstructions are float32-representable, so a raw f32 round
        trip preserves the bound exactly."""
        rng = np.random.default_rng(40)
        data = np.cumsum(rng.normal(0, 0.3, 50_000))
        data = np.frombuffer(data.astype("<f4").tobytes(), dtype="<f4").astype(np.float64)
        eb = 1e-3 * (data.max() - data.min())
        config = ph.QuantConfig(error_bound=eb)
        recon = ph.dequantize(ph.quantize(data, config), config)
        via_file = np.frombuffer(recon.astype("<f4").tobytes(), dtype="<f4").astype(np.float64)
        assert np.array_equal(via_file, recon)
        assert np.abs(data - via_file).max() <= eb

    def test_smooth_signal_few_outliers(self):
        rng = np.random.default_rng(18)
        data = np.sin(np.linspace(0, 40, 100_000)) + rng.normal(0, 0.01, 100_000)
        config = ph.QuantConfig(error_bound=1e-3 * 2.2)
        result = ph.quantize(data, config)
        assert len(result.outlier_indices) < 100
        assert (np.diff(result.outlier_indices) > 0).all()


def encoded_cr(codes: np.ndarray, width: int = 16) -> float:
    stream = ph.encode(codes, book_for(codes, width), with_gap=False)
    return codes.size * width / stream.total_bits


class TestSynthCodes:
    def test_deterministic(self):
        a = ph.synth_codes(10_000, 0.7, seed=123)
        b = ph.synth_codes(10_000, 0.7, seed=123)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, ph.synth_codes(10_000, 0.7, seed=124))

    def test_empty(self):
        assert ph.synth_codes(0, 0.5, seed=0).size == 0

    def test_validation(self):
        with pytest.raises(ValueError):
            ph.synth_codes(10, 0.0, seed=0)
        with pytest.raises(ValueError):
            ph.synth_codes(10, 1.0, seed=0)
        with pytest.raises(ValueError):
            ph.synth_codes(-1, 0.5, seed=0)

    def test_concentrates_at_midpoint(self):
        codes = ph.synth_codes(50_000, 0.999, seed=1)
        assert np.mean(codes == 32768) > 0.95

    def test_high_sharpness_hits_top_of_cr_range(self):
        cr = encoded_cr(ph.synth_codes(300_000, 0.999, seed=2))
        assert 14.0 <= cr <= 16.0

    def test_mid_sharpness_hits_low_cr(self):
        cr = encoded_cr(ph.synth_codes(300_000, 0.46, seed=3))
        assert 2.0 <= cr <= 2.8

    def test_cr_monotone_in_sharpness(self):
        grid = [0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 0.98]
        crs = [encoded_cr(ph.synth_codes(120_000, s, seed=9)) for s in grid]
        assert all(a <= b + 1e-9 for a, b in zip(crs, crs[1:]))
        assert crs[0] < 1.6 and crs[-1] > 10.0

    def test_width_8(self):
        codes = ph.synth_codes(20_000, 0.9, seed=5, symbol_width=8)
        assert codes.max() < 256
        assert np.abs(int(np.median(codes.astype(int))) - 128) <= 1
