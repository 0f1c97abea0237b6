"""Pytest configuration and fixtures."""

import time

import numpy as np
import pytest

from pyirs_robust.channel_model import (
    ChannelEstimate,
    default_fading,
    default_geometry,
    derive_seed,
    sample_channel,
)
from pyirs_robust.config import SystemParams
from pyirs_robust.worst_case import PowerModel


@pytest.fixture
def small_channel():
    """Hand-made channel with a strong direct link and four reflected paths."""
    return ChannelEstimate.from_polar(
        [1.0, 0.8, 0.6, 0.5, 0.3],
        [0.3, 1.2, 2.5, 4.0, 5.5],
    )


@pytest.fixture
def gamma_bar():
    """Transmit SNR used with the hand-made channel."""
    return 10.0


@pytest.fixture
def power_model():
    """Power model with the default scenario constants (watts)."""
    return PowerModel(p=10 ** (15 / 10) * 1e-3, eta=0.8, p_static=0.01, p_on=0.015, p_off=0.0003)


@pytest.fixture
def expensive_power_model():
    """Power model whose per-element cost dominates the transmit power."""
    return PowerModel(p=10 ** (15 / 10) * 1e-3, eta=0.8, p_static=0.01, p_on=1.0, p_off=0.0003)


@pytest.fixture
def system():
    """Default scenario parameters."""
    return SystemParams()


@pytest.fixture
def scenario_channel():
    """Factory for seeded channels drawn from the default scenario."""

    def make(L: int, seed: int = 0, trial: int = 0) -> ChannelEstimate:
        return sample_channel(default_geometry(), default_fading(), L, 0.9,
                              derive_seed(seed, L, trial))

    return make


@pytest.fixture
def rng():
    """Seeded generator for test-side random draws."""
    return np.random.default_rng(12345)


@pytest.fixture
def best_time():
    """Best-of-n wall time of a call, in seconds."""

    def measure(func, *args, repeats: int = 3) -> float:
        timings = []
        for _ in range(repeats):
            start = time.perf_counter()
            func(*args)
            timings.append(time.perf_counter() - start)
        return min(timings)

    return measure
