"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from noiseless.config import AccountingConfig

from .fixtures import example_profile, iid_bernoulli, paired_bits


@pytest.fixture
def default_config():
    """Provide the default accounting configuration."""
    return AccountingConfig()


@pytest.fixture
def test_config():
    """Provide a configuration with a cheap Monte Carlo oracle."""
    config = AccountingConfig()
    config.bootstrap_rounds = 50
    config.workers = 2
    return config


@pytest.fixture
def rng():
    """Provide a seeded generator for deterministic instances."""
    return np.random.default_rng(42)


@pytest.fixture
def profile_spec():
    """The 10^4-record profile with Delta = 30, sigma^2 = 4, rho = 3."""
    return example_profile(10_000)


@pytest.fixture
def fair_bits():
    """400 i.i.d. fair bits."""
    return iid_bernoulli(400, 0.5)


@pytest.fixture
def block_spec():
    """24 fair bits in correlated pairs, D = 2."""
    return paired_bits(24)
