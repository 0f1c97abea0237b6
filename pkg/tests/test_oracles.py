"""Tests for the reference oracles."""

import numpy as np
import pytest

from pyirs_robust.channel_model import ChannelEstimate
from pyirs_robust.exceptions import IRSGuardError, IRSParameterError
from pyirs_robust.oracles import enumerate_subsets_eq_M, exhaustive_search, sampled_worst_snr
from pyirs_robust.phase_control import PhaseMode, configure_phases
from pyirs_robust.solution import SolveStatus
from pyirs_robust.worst_case import ActivationVector, worst_case_ee, worst_case_snr

CONTINUOUS = PhaseMode.continuous()


class TestExhaustiveSearch:
    """Tests for exhaustive_search."""

    def test_best_of_all(self, small_channel, gamma_bar, power_model):
        """Test the result beats every other activation."""
        sol = exhaustive_search(small_channel, 0.1, 0.0, gamma_bar, power_model, CONTINUOUS)
        assert sol.status is SolveStatus.OPTIMAL
        for index in range(16):
            bits = [(index >> (3 - k)) & 1 for k in range(4)]
            ee = worst_case_ee(small_channel, bits, 0.1, CONTINUOUS, gamma_bar, power_model)
            assert sol.ee >= ee

    def test_tie_breaks_to_lowest_index(self, gamma_bar, power_model):
        """Test equal candidates resolve to the smallest binary value."""
        ch = ChannelEstimate.from_polar([1.0, 0.5, 0.5], [0.0, 0.0, 0.0])
        sol = exhaustive_search(ch, 0.0, 0.0, gamma_bar, power_model, CONTINUOUS)
        assert sol.m_star == 1
        assert sol.x == ActivationVector([0, 1])

    def test_threads_do_not_change_result(self, scenario_channel, system):
        """Test chunked parallel evaluation returns the same optimum."""
        ch = scenario_channel(17)
        gamma_bar = system.gamma_bar
        pm = system.power_model(CONTINUOUS)
        serial = exhaustive_search(ch, 0.0, 0.0, gamma_bar, pm, CONTINUOUS)
        parallel = exhaustive_search(ch, 0.0, 0.0, gamma_bar, pm, CONTINUOUS, threads=2)
        assert serial == parallel

    def test_discrete_mode(self, small_channel, gamma_bar, power_model):
        """Test the discrete-mode result meets the floor."""
        mode = PhaseMode.discrete(2)
        sol = exhaustive_search(small_channel, 0.1, 5.0, gamma_bar, power_model, mode)
        assert worst_case_snr(small_channel, sol.x, 0.1, mode, gamma_bar) >= 5.0

    def test_infeasible(self, small_channel, gamma_bar, power_model):
        """Test no activation meeting the floor gives an infeasible result."""
        sol = exhaustive_search(small_channel, 0.1, 1e6, gamma_bar, power_model, CONTINUOUS)
        assert sol.status is SolveStatus.INFEASIBLE

    def test_guard(self, gamma_bar, power_model):
        """Test L > 25 raises."""
        ch = ChannelEstimate.from_polar(np.ones(27), np.zeros(27))
        with pytest.raises(IRSGuardError):
            exhaustive_search(ch, 0.0, 0.0, gamma_bar, power_model, CONTINUOUS)


class TestEnumerateSubsets:
    """Tests for enumerate_subsets_eq_M."""

    def test_size_respected(self, small_channel, gamma_bar, power_model):
        """Test the result has exactly M active elements."""
        sol = enumerate_subsets_eq_M(small_channel, 0.1, 0.0, gamma_bar, power_model, 2,
                                     PhaseMode.discrete(3))
        assert sol.x.M == 2
        assert sol.m_star == 2

    def test_empty_subset(self, small_channel, gamma_bar, power_model):
        """Test M = 0 evaluates the direct link alone."""
        sol = enumerate_subsets_eq_M(small_channel, 0.1, 0.0, gamma_bar, power_model, 0,
                                     CONTINUOUS)
        assert sol.x == ActivationVector.zeros(4)

    def test_guard(self, gamma_bar, power_model):
        """Test C(L, M) above the guard raises."""
        ch = ChannelEstimate.from_polar(np.ones(41), np.zeros(41))
        with pytest.raises(IRSGuardError):
            enumerate_subsets_eq_M(ch, 0.0, 0.0, gamma_bar, power_model, 20, CONTINUOUS)

    def test_bad_size(self, small_channel, gamma_bar, power_model):
        """Test M > L raises."""
        with pytest.raises(IRSParameterError):
            enumerate_subsets_eq_M(small_channel, 0.1, 0.0, gamma_bar, power_model, 9,
                                   CONTINUOUS)


class TestSampledWorstSNR:
    """Tests for sampled_worst_snr."""

    def test_constructed_point_attains_minimum(self, small_channel, gamma_bar):
        """Test including the constructed error reaches the closed form."""
        cfg = configure_phases(small_channel, CONTINUOUS)
        x = [1, 0, 1, 1]
        sampled = sampled_worst_snr(small_channel, x, cfg.discrete, 0.2, 1_000, 7,
                                    gamma_bar=gamma_bar)
        closed = worst_case_snr(small_channel, x, 0.2, CONTINUOUS, gamma_bar)
        assert sampled == pytest.approx(closed, rel=1e-9)

    def test_reproducible(self, small_channel):
        """Test the same seed gives the same minimum."""
        cfg = configure_phases(small_channel, CONTINUOUS)
        args = (small_channel, [1, 1, 1, 1], cfg.discrete, 0.2, 500, 3)
        assert sampled_worst_snr(*args, include_constructed=False) == \
            sampled_worst_snr(*args, include_constructed=False)

    def test_bad_sample_count(self, small_channel):
        """Test zero samples raise."""
        with pytest.raises(IRSParameterError):
            sampled_worst_snr(small_channel, [1, 1, 1, 1], np.zeros(4), 0.1, 0, 0)
