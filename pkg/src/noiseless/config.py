"""Configuration settings and defaults for noiseless privacy accounting."""

from dataclasses import dataclass

# Berry-Esseen factor 2*C: the rounded value the independent bound states,
# and the sharper constant C <= 0.5591 doubled.
BERRY_ESSEEN_STATED = 1.12
BERRY_ESSEEN_SHARP = 2 * 0.5591

# Constant under the inner square root of the Stein bound.
STEIN_K_SOURCED = 28
STEIN_K_STATED = 26


@dataclass
class AccountingConfig:
    """Numerical knobs shared by the bounds, the oracle and the CLI."""

    # Normal approximation constants
    berry_esseen_factor: float = BERRY_ESSEEN_STATED
    stein_constant: int = STEIN_K_SOURCED

    # Exact oracle
    quantization_resolution: float = 1e-9
    support_cap: int = 2_000_000
    direct_convolution_limit: int = 50_000_000
    pmf_tolerance: float = 1e-10
    soundness_slack: float = 1e-12

    # Monte Carlo oracle
    mc_min_samples: int = 10_000
    bootstrap_rounds: int = 200
    mc_exact_bucket_limit: int = 4096
    workers: int = 1

    # Compromised-set search: exhaustive up to this many records, greedy above
    exhaustive_search_limit: int = 20

    # Output
    significant_digits: int = 12


default_config = AccountingConfig()
