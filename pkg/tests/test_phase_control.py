"""Tests for phase alignment and uniform quantization."""

import numpy as np
import pytest

from pyirs_robust.converters import TWO_PI
from pyirs_robust.exceptions import IRSParameterError
from pyirs_robust.phase_control import (
    PhaseMode,
    closed_form_indices,
    configure_phases,
    decision_region_indices,
    optimal_continuous_phases,
    quantization_errors,
    quantize_closed_form,
    quantize_decision_regions,
)


class TestPhaseMode:
    """Tests for PhaseMode."""

    def test_continuous(self):
        """Test continuous mode."""
        mode = PhaseMode.continuous()
        assert mode.is_continuous
        assert mode.label == "c"

    def test_discrete(self):
        """Test discrete mode."""
        mode = PhaseMode.discrete(3)
        assert not mode.is_continuous
        assert mode.bits == 3
        assert mode.label == "d"

    @pytest.mark.parametrize("text", ["c", "Continuous", " C "])
    def test_parse_continuous(self, text):
        """Test parsing continuous mode names."""
        assert PhaseMode.parse(text) == PhaseMode.continuous()

    def test_parse_discrete(self):
        """Test parsing discrete mode with bits."""
        assert PhaseMode.parse("d", 4) == PhaseMode.discrete(4)

    def test_parse_discrete_without_bits(self):
        """Test discrete mode needs bits."""
        with pytest.raises(IRSParameterError):
            PhaseMode.parse("d")

    def test_parse_unknown(self):
        """Test unknown mode raises."""
        with pytest.raises(IRSParameterError):
            PhaseMode.parse("x")

    def test_invalid_bits(self):
        """Test zero bits raise."""
        with pytest.raises(IRSParameterError):
            PhaseMode.discrete(0)


class TestOptimalPhases:
    """Tests for optimal_continuous_phases."""

    def test_aligns_with_direct_link(self, small_channel):
        """Test every rotated reflected link has the direct-link phase."""
        phases = optimal_continuous_phases(small_channel)
        rotated = small_channel.coeffs[1:] * np.exp(1j * phases)
        np.testing.assert_allclose(
            np.angle(rotated * np.conj(small_channel.coeffs[0])), 0.0, atol=1e-12
        )

    def test_range(self, small_channel):
        """Test phases lie in [0, 2π)."""
        phases = optimal_continuous_phases(small_channel)
        assert np.all(phases >= 0.0)
        assert np.all(phases < TWO_PI)


class TestQuantizers:
    """Tests for the two quantizers."""

    @pytest.mark.parametrize("b", range(1, 13))
    def test_quantizers_agree(self, b, rng):
        """Test closed form and decision regions give the same index."""
        phases = rng.uniform(0.0, TWO_PI, 20_000)
        np.testing.assert_array_equal(
            closed_form_indices(phases, b), decision_region_indices(phases, b)
        )

    @pytest.mark.parametrize("b", [1, 2, 3, 8])
    def test_quantizers_agree_on_boundaries(self, b):
        """Test region boundaries kω ± ω/2 and their neighbours."""
        omega = TWO_PI / 2**b
        edges = np.arange(2**b) * omega + omega / 2
        phases = np.concatenate((edges, np.nextafter(edges, 0.0), [0.0]))
        phases = phases[phases < TWO_PI]
        np.testing.assert_array_equal(
            closed_form_indices(phases, b), decision_region_indices(phases, b)
        )

    def test_round_half_up(self):
        """Test a boundary phase rounds up to the next level."""
        omega = TWO_PI / 4
        assert closed_form_indices(np.array([omega / 2]), 2)[0] == 1

    def test_top_of_circle_wraps_to_zero(self):
        """Test phases just below 2π quantize to level 0."""
        phases = np.array([TWO_PI - 1e-12])
        assert quantize_closed_form(phases, 2)[0] == 0.0
        assert quantize_decision_regions(phases, 2)[0] == 0.0

    def test_quantized_values_on_grid(self, rng):
        """Test outputs are multiples of ω in [0, 2π)."""
        b = 3
        levels = quantize_closed_form(rng.uniform(0.0, TWO_PI, 100), b) / (TWO_PI / 2**b)
        np.testing.assert_allclose(levels, np.round(levels), atol=1e-12)
        assert levels.max() <= 7

    def test_decision_regions_reject_out_of_range(self):
        """Test phases outside [0, 2π) raise in the region scan."""
        with pytest.raises(IRSParameterError):
            decision_region_indices(np.array([-1.0]), 2)

    def test_invalid_bits(self):
        """Test b = 0 raises."""
        with pytest.raises(IRSParameterError):
            quantize_closed_form(np.array([0.5]), 0)


class TestQuantizationErrors:
    """Tests for quantization_errors."""

    @pytest.mark.parametrize("b", [1, 2, 4, 10])
    def test_errors_within_half_step(self, b, rng):
        """Test |ε| ≤ ω/2."""
        continuous = rng.uniform(0.0, TWO_PI, 5_000)
        discrete = quantize_closed_form(continuous, b)
        errors = quantization_errors(continuous, discrete, b)
        assert np.all(np.abs(errors) <= np.pi / 2**b + 1e-12)

    def test_wraparound_error_is_small(self):
        """Test φᵈ = 0 near φ* = 2π gives a small positive error."""
        errors = quantization_errors(np.array([TWO_PI - 0.01]), np.array([0.0]))
        assert errors[0] == pytest.approx(0.01)

    def test_shape_mismatch(self):
        """Test mismatched shapes raise."""
        with pytest.raises(IRSParameterError):
            quantization_errors(np.zeros(3), np.zeros(2))


class TestConfigurePhases:
    """Tests for configure_phases."""

    def test_continuous_has_zero_errors(self, small_channel):
        """Test continuous mode applies φ* unchanged."""
        cfg = configure_phases(small_channel, PhaseMode.continuous())
        np.testing.assert_array_equal(cfg.discrete, cfg.continuous)
        np.testing.assert_array_equal(cfg.errors, 0.0)
        assert cfg.K is None
        assert cfg.omega is None

    def test_discrete(self, small_channel):
        """Test discrete configuration fields are consistent."""
        cfg = configure_phases(small_channel, PhaseMode.discrete(3))
        assert cfg.K == 8
        assert cfg.omega == pytest.approx(TWO_PI / 8)
        np.testing.assert_allclose(
            np.exp(1j * cfg.discrete), np.exp(1j * (cfg.continuous + cfg.errors)), atol=1e-12
        )
