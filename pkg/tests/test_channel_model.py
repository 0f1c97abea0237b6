"""Tests for channel generation."""

import json

import numpy as np
import pytest

from pyirs_robust.channel_model import (
    ChannelEstimate,
    FadingParams,
    ScenarioGeometry,
    angles_from_geometry,
    default_fading,
    default_geometry,
    derive_seed,
    make_rng,
    path_losses,
    sample_channel,
    sample_links,
    steering_vector,
)
from pyirs_robust.exceptions import IRSParameterError


class TestScenarioGeometry:
    """Tests for ScenarioGeometry."""

    def test_default_distances(self):
        """Test distances of the default placement."""
        dist = default_geometry().distances()
        assert dist["d0"] == pytest.approx(100.0)
        assert dist["du"] == pytest.approx(np.sqrt(50**2 + 20**2 + 10**2))
        assert dist["dv"] == pytest.approx(np.sqrt(50**2 + 20**2 + 10**2))

    def test_coincident_positions(self):
        """Test coincident Tx and IRS raise."""
        with pytest.raises(IRSParameterError, match="Coincident"):
            ScenarioGeometry(tx_pos=(1.0, 1.0, 1.0), irs_pos=(1.0, 1.0, 1.0))

    def test_bad_spacing(self):
        """Test nonpositive element spacing raises."""
        with pytest.raises(IRSParameterError):
            ScenarioGeometry(element_spacing_over_wavelength=0.0)

    def test_bad_position_length(self):
        """Test positions must be 3-vectors."""
        with pytest.raises(IRSParameterError):
            ScenarioGeometry(tx_pos=(0.0, 0.0))


class TestAngles:
    """Tests for angle derivation from the placement."""

    def test_tx_below_irs_has_zero_inclination(self):
        """Test Tx directly below the IRS on the z-axis."""
        geom = ScenarioGeometry(
            tx_pos=(0.0, 0.0, 0.0), rx_pos=(30.0, 0.0, 0.0), irs_pos=(0.0, 0.0, 10.0)
        )
        angles = angles_from_geometry(geom)
        assert angles["theta_a"] == pytest.approx(0.0)
        assert angles["theta_d"] == pytest.approx(np.pi / 2 + np.arctan2(10.0, 30.0))

    def test_azimuth_range(self):
        """Test azimuths lie in [0, 2π)."""
        angles = angles_from_geometry(default_geometry())
        for key in ("phi_a", "phi_d"):
            assert 0.0 <= angles[key] < 2 * np.pi
        # IRS→Rx heads toward negative y
        assert angles["phi_d"] > np.pi

    def test_default_placement_angles(self):
        """Test AoA/AoD of the default placement against direct trigonometry."""
        angles = angles_from_geometry(default_geometry())
        # Tx→IRS = (50, 20, 10), IRS→Rx = (50, −20, −10)
        theta_a = np.arccos(10.0 / np.sqrt(3000.0))
        assert angles["theta_a"] == pytest.approx(theta_a, rel=1e-12)
        assert angles["theta_a"] == pytest.approx(1.3871923, abs=1e-5)
        assert angles["phi_a"] == pytest.approx(np.arctan(0.4), rel=1e-12)
        assert angles["phi_a"] == pytest.approx(0.3805064, abs=1e-5)
        assert angles["theta_d"] == pytest.approx(np.pi - theta_a, rel=1e-12)
        assert angles["theta_d"] == pytest.approx(1.7544004, abs=1e-5)
        assert angles["phi_d"] == pytest.approx(2 * np.pi - np.arctan(0.4), rel=1e-12)
        assert angles["phi_d"] == pytest.approx(5.9026789, abs=1e-5)

    def test_rx_on_x_axis_has_zero_azimuth(self):
        """Test an Rx straight along +x from the IRS gives φ_D = 0."""
        geom = ScenarioGeometry(
            tx_pos=(0.0, 0.0, 0.0), rx_pos=(30.0, 0.0, 10.0), irs_pos=(0.0, 0.0, 10.0)
        )
        angles = angles_from_geometry(geom)
        assert angles["phi_d"] == 0.0
        assert angles["theta_d"] == pytest.approx(np.pi / 2)


class TestPathLoss:
    """Tests for path_losses."""

    def test_reference_distance_gives_reference_loss(self):
        """Test ϱ equals the reference loss at the reference distance."""
        geom = ScenarioGeometry(
            tx_pos=(0.0, 0.0, 0.0), rx_pos=(1.0, 0.0, 0.0), irs_pos=(0.0, 1.0, 0.0)
        )
        fading = FadingParams()
        rho0, rho_u, _ = path_losses(geom, fading)
        assert rho0 == pytest.approx(fading.pathloss_ref["c0"])
        assert rho_u == pytest.approx(fading.pathloss_ref["cu"])

    def test_exponent_scaling(self):
        """Test ϱ₀ = c₀·d₀^(−a₀) for the default scenario."""
        rho0, _, _ = path_losses(default_geometry(), default_fading())
        assert rho0 == pytest.approx(1e-5 * 100.0 ** (-3.7))

    def test_invalid_exponent(self):
        """Test exponent below 1 raises."""
        with pytest.raises(IRSParameterError):
            FadingParams(exponents={"a0": 0.5, "au": 2.2, "av": 2.2})


class TestSteeringVector:
    """Tests for steering_vector."""

    def test_unit_modulus(self):
        """Test all entries have unit modulus and the first is one."""
        vec = steering_vector(8, 0.5, 0.7, 1.1)
        np.testing.assert_allclose(np.abs(vec), 1.0)
        assert vec[0] == pytest.approx(1.0)

    def test_broadside(self):
        """Test zero inclination gives an all-ones vector."""
        np.testing.assert_allclose(steering_vector(4, 0.5, 0.0, 0.3), np.ones(4))


class TestSeeds:
    """Tests for seed derivation."""

    def test_derive_seed_deterministic(self):
        """Test same keys give the same seed."""
        assert derive_seed(42, 20, 3) == derive_seed(42, 20, 3)

    def test_derive_seed_distinct(self):
        """Test different keys give different seeds."""
        seeds = {derive_seed(42, 20, trial) for trial in range(50)}
        assert len(seeds) == 50
        assert derive_seed(42, 20, 0) != derive_seed(43, 20, 0)

    def test_make_rng_reproducible(self):
        """Test Philox generators replay the same stream."""
        a = make_rng(7).standard_normal(5)
        b = make_rng(7).standard_normal(5)
        np.testing.assert_array_equal(a, b)


class TestSampleChannel:
    """Tests for sample_channel."""

    def test_reproducible(self):
        """Test the same seed reproduces the channel bit for bit."""
        a = sample_channel(default_geometry(), default_fading(), 16, 0.9, 99)
        b = sample_channel(default_geometry(), default_fading(), 16, 0.9, 99)
        np.testing.assert_array_equal(a.coeffs, b.coeffs)

    def test_different_seeds(self):
        """Test different seeds give different channels."""
        a = sample_channel(default_geometry(), default_fading(), 16, 0.9, 1)
        b = sample_channel(default_geometry(), default_fading(), 16, 0.9, 2)
        assert not np.array_equal(a.coeffs, b.coeffs)

    def test_shape(self):
        """Test the estimate holds the direct link plus L elements."""
        ch = sample_channel(default_geometry(), default_fading(), 10, 0.9, 5)
        assert ch.L == 10
        assert ch.coeffs.shape == (11,)
        assert np.all(ch.magnitudes > 0)

    def test_cascaded_from_links(self):
        """Test reflected coefficients are β·û·v̂ of the same draw."""
        betas = np.linspace(0.5, 1.0, 6)
        h0, u, v = sample_links(default_geometry(), default_fading(), 6, 11)
        ch = sample_channel(default_geometry(), default_fading(), 6, betas, 11)
        assert ch.coeffs[0] == pytest.approx(h0)
        np.testing.assert_allclose(ch.coeffs[1:], betas * u * v)

    def test_pure_los_has_equal_magnitudes(self):
        """Test pure LOS reflected links all have magnitude β·√(ϱ_u ϱ_v)."""
        fading = FadingParams(rician_factors={"ku": 1e12, "kv": 1e12})
        ch = sample_channel(default_geometry(), fading, 8, 0.9, 3)
        _, rho_u, rho_v = path_losses(default_geometry(), fading)
        np.testing.assert_allclose(ch.alphas, 0.9 * np.sqrt(rho_u * rho_v), rtol=1e-12)

    def test_explicit_angles(self):
        """Test explicit AoA/AoD bypass the placement-derived angles."""
        fading = FadingParams(
            rician_factors={"ku": 1e12, "kv": 1e12},
            aoa_aod={"theta_a": 0.0, "phi_a": 0.0, "theta_d": 0.0, "phi_d": 0.0},
        )
        _, u, _ = sample_links(default_geometry(), fading, 4, 3)
        np.testing.assert_allclose(u, u[0])

    def test_missing_angles(self):
        """Test incomplete angle dict raises."""
        with pytest.raises(IRSParameterError, match="Missing angles"):
            FadingParams(aoa_aod={"theta_a": 0.0})

    @pytest.mark.parametrize("betas", [1.5, -0.1])
    def test_betas_out_of_range(self, betas):
        """Test reflection amplitudes outside [0, 1] raise."""
        with pytest.raises(IRSParameterError):
            sample_channel(default_geometry(), default_fading(), 4, betas, 0)

    def test_betas_wrong_length(self):
        """Test betas of the wrong length raise."""
        with pytest.raises(IRSParameterError):
            sample_channel(default_geometry(), default_fading(), 4, [0.9, 0.9], 0)

    def test_zero_elements(self):
        """Test L = 0 raises."""
        with pytest.raises(IRSParameterError):
            sample_channel(default_geometry(), default_fading(), 0, 0.9, 0)

    def test_seed_42_matches_raw_stream(self):
        """Test seed 42 against a rebuild from the raw Philox stream."""
        L, beta = 4, 0.9
        ch = sample_channel(default_geometry(), default_fading(), L, beta, 42)

        stream = np.random.Generator(np.random.Philox(42))
        h0_draw = stream.standard_normal((1, 2))
        u_draw = stream.standard_normal((L, 2))
        v_draw = stream.standard_normal((L, 2))

        kappa = 10.0 ** 0.5
        los, nlos = np.sqrt(kappa / (1 + kappa)), np.sqrt(1 / (1 + kappa))
        theta_a = np.arccos(10.0 / np.sqrt(3000.0))
        phi_a = np.arctan(0.4)
        theta_d, phi_d = np.pi - theta_a, 2 * np.pi - phi_a
        n = np.arange(L)
        a_u = np.exp(1j * np.pi * n * np.sin(theta_a) * np.cos(phi_a))
        a_v = np.exp(1j * np.pi * n * np.sin(theta_d) * np.cos(phi_d))
        _, rho_u, rho_v = path_losses(default_geometry(), default_fading())
        rho0 = 1e-5 * 100.0 ** (-3.7)

        h0 = np.sqrt(rho0) * (h0_draw[0, 0] + 1j * h0_draw[0, 1]) / np.sqrt(2)
        u = np.sqrt(rho_u) * (los * a_u + nlos * (u_draw[:, 0] + 1j * u_draw[:, 1]) / np.sqrt(2))
        v = np.sqrt(rho_v) * (los * a_v + nlos * (v_draw[:, 0] + 1j * v_draw[:, 1]) / np.sqrt(2))

        assert ch.coeffs[0] == pytest.approx(h0, rel=1e-12)
        np.testing.assert_allclose(ch.coeffs[1:], beta * u * v, rtol=1e-12)

    def test_direct_link_power(self):
        """Test the mean of |ĥ₀|²/ϱ₀ over 10⁴ draws is within 5% of one."""
        rho0, _, _ = path_losses(default_geometry(), default_fading())
        powers = [
            abs(sample_links(default_geometry(), default_fading(), 1, derive_seed(0, i))[0]) ** 2
            for i in range(10_000)
        ]
        assert np.mean(powers) / rho0 == pytest.approx(1.0, abs=0.05)

    def test_zero_reflection_amplitude(self):
        """Test β = 0 with a single element gives ĥ₁ = 0."""
        ch = sample_channel(default_geometry(), default_fading(), 1, 0.0, 17)
        assert ch.L == 1
        assert ch.coeffs[1] == 0
        assert ch.coeffs[0] != 0


class TestChannelEstimate:
    """Tests for ChannelEstimate."""

    def test_polar_properties(self, small_channel):
        """Test L, alpha0, alphas and alpha_min."""
        assert small_channel.L == 4
        assert small_channel.alpha0 == 1.0
        np.testing.assert_array_equal(small_channel.alphas, [0.8, 0.6, 0.5, 0.3])
        assert small_channel.alpha_min == 0.3

    def test_from_polar_keeps_phases(self, small_channel):
        """Test phases are stored exactly as given."""
        np.testing.assert_array_equal(small_channel.phases, [0.3, 1.2, 2.5, 4.0, 5.5])

    def test_from_coeffs(self):
        """Test direct and reflected parts are joined."""
        ch = ChannelEstimate.from_coeffs(1j, [1.0, -1.0])
        assert ch.L == 2
        assert ch.phases[0] == pytest.approx(np.pi / 2)
        assert ch.phases[2] == pytest.approx(np.pi)

    def test_read_only(self, small_channel):
        """Test coefficient arrays cannot be modified."""
        with pytest.raises(ValueError):
            small_channel.magnitudes[0] = 2.0

    def test_needs_reflected_link(self):
        """Test a direct link alone raises."""
        with pytest.raises(IRSParameterError):
            ChannelEstimate([1.0])

    def test_non_finite(self):
        """Test NaN coefficients raise."""
        with pytest.raises(IRSParameterError):
            ChannelEstimate([1.0, np.nan])

    def test_negative_magnitude(self):
        """Test negative magnitudes raise."""
        with pytest.raises(IRSParameterError):
            ChannelEstimate.from_polar([1.0, -0.5], [0.0, 0.0])

    def test_json_file(self, small_channel, tmp_path):
        """Test an instance written to file reads back identically."""
        path = tmp_path / "instance.json"
        small_channel.to_json(path)
        loaded = ChannelEstimate.from_json(path)
        np.testing.assert_array_equal(loaded.magnitudes, small_channel.magnitudes)
        np.testing.assert_array_equal(loaded.phases, small_channel.phases)

    def test_json_string(self):
        """Test parsing an inline JSON string."""
        text = json.dumps({"magnitudes": [1.0, 0.5], "phases": [0.0, 1.0]})
        ch = ChannelEstimate.from_json(text)
        assert ch.L == 1

    def test_json_invalid(self):
        """Test malformed instances raise."""
        with pytest.raises(IRSParameterError, match="Invalid channel instance"):
            ChannelEstimate.from_json('{"magnitudes": [1.0]}')

    def test_json_non_numeric(self):
        """Test non-numeric magnitudes raise IRSParameterError."""
        with pytest.raises(IRSParameterError, match="Invalid channel instance"):
            ChannelEstimate.from_json('{"magnitudes": ["abc", 1.0], "phases": [0.0, 0.0]}')

    def test_repr(self, small_channel):
        """Test repr shows the element count."""
        assert "L=4" in repr(small_channel)
