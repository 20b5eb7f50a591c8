"""CSV curves of the bounds over the data size n."""

import csv
import logging
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import TextIO

import numpy as np

from .bounds_binomial import BinomialCase, binomial_delta_given_eps
from .bounds_independent import IndependentAggregate, independent_bound
from .config import AccountingConfig, default_config
from .errors import InvariantError
from .synergy import (
    RegimeBoundaries,
    laplace_baseline_variance,
    regime_boundaries,
    required_noise_variance,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FigureParameters:
    """Inputs of one curve; unused fields are ignored by the figure."""

    n_min: int
    n_max: int
    points: int = 60
    epsilon: float = 0.5
    p: float = 0.5
    sensitivity: float = 1.0
    record_variance: float = 1.0
    record_abs_third: float = 1.0
    variance_per_n: float = 0.1


@dataclass(frozen=True)
class FigurePreset:
    figure_id: int
    title: str
    quantity: str
    defaults: FigureParameters
    value: Callable[[int, FigureParameters, AccountingConfig], float]
    with_baseline: bool = False


def _binomial_delta(n: int, params: FigureParameters, config: AccountingConfig) -> float:
    return binomial_delta_given_eps(BinomialCase(n, params.p), params.epsilon).delta


def _profile_bound(n: int, params: FigureParameters, config: AccountingConfig):
    agg = IndependentAggregate(
        n, params.record_variance, params.record_abs_third * n, params.sensitivity
    )
    return independent_bound(agg, config)


def _noise_needed(n: int, params: FigureParameters, config: AccountingConfig) -> float:
    return required_noise_variance(
        params.sensitivity, n, params.variance_per_n * n, params.epsilon
    )


EXAMPLE_PROFILE = FigureParameters(
    n_min=1_000,
    n_max=1_000_000,
    sensitivity=30.0,
    record_variance=4.0,
    record_abs_third=3.0,
)

FIGURES: dict[int, FigurePreset] = {
    1: FigurePreset(
        1,
        "delta of i.i.d. Bernoulli(0.95) data at epsilon = 0.5",
        "delta",
        FigureParameters(n_min=100, n_max=10_000, epsilon=0.5, p=0.95),
        _binomial_delta,
    ),
    2: FigurePreset(
        2,
        "delta of i.i.d. Bernoulli(0.2) data at epsilon = 1",
        "delta",
        FigureParameters(n_min=100, n_max=10_000, epsilon=1.0, p=0.2),
        _binomial_delta,
    ),
    3: FigurePreset(
        3,
        "epsilon of independent data with Delta = 30, sigma^2 = 4, rho = 3",
        "epsilon",
        EXAMPLE_PROFILE,
        lambda n, params, config: _profile_bound(n, params, config).epsilon,
    ),
    4: FigurePreset(
        4,
        "delta of independent data with Delta = 30, sigma^2 = 4, rho = 3",
        "delta",
        EXAMPLE_PROFILE,
        lambda n, params, config: _profile_bound(n, params, config).delta,
    ),
    6: FigurePreset(
        6,
        "noise variance needed for epsilon = 0.2 with Delta = 10, Var = n/10",
        "noise_variance",
        FigureParameters(
            n_min=100, n_max=500_000, points=200, epsilon=0.2, sensitivity=10.0
        ),
        _noise_needed,
        with_baseline=True,
    ),
}


def figure_preset(figure_id: int) -> FigurePreset:
    try:
        return FIGURES[figure_id]
    except KeyError:
        known = ", ".join(str(k) for k in FIGURES)
        raise InvariantError(f"unknown figure {figure_id}; choose one of {known}", field="figure") from None


def n_grid(n_min: int, n_max: int, points: int) -> np.ndarray:
    """Log-spaced, strictly increasing integers from n_min to n_max."""
    if not 2 <= n_min < n_max:
        raise InvariantError("need 2 <= n_min < n_max", field="n_range")
    if points < 2:
        raise InvariantError("must be at least 2", field="points")
    return np.unique(np.rint(np.geomspace(n_min, n_max, points)).astype(np.int64))


def curve_rows(
    figure_id: int,
    params: FigureParameters | None = None,
    config: AccountingConfig | None = None,
) -> list[tuple[float, ...]]:
    config = config or default_config
    preset = figure_preset(figure_id)
    params = params or preset.defaults
    rows = []
    baseline = (
        laplace_baseline_variance(params.sensitivity, params.epsilon)
        if preset.with_baseline
        else None
    )
    for n in n_grid(params.n_min, params.n_max, params.points):
        value = preset.value(int(n), params, config)
        rows.append((int(n), value) if baseline is None else (int(n), value, baseline))
    return rows


def noise_regimes(params: FigureParameters) -> RegimeBoundaries:
    """Where the needed noise falls below the Laplace baseline, then to zero."""
    return regime_boundaries(
        params.sensitivity,
        params.epsilon,
        lambda n: params.variance_per_n * n,
        params.n_min,
        params.n_max,
    )


def emit_curves(
    figure_id: int,
    stream: TextIO,
    params: FigureParameters | None = None,
    config: AccountingConfig | None = None,
) -> int:
    """Write the curve as CSV with header n,value[,baseline]; returns the row count."""
    config = config or default_config
    preset = figure_preset(figure_id)
    rows = curve_rows(figure_id, params, config)
    digits = config.significant_digits
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["n", "value"] + (["baseline"] if preset.with_baseline else []))
    for n, *values in rows:
        writer.writerow([n] + [f"{v:.{digits}g}" for v in values])
    logger.info("figure %d: %d rows", figure_id, len(rows))
    return len(rows)


def with_overrides(figure_id: int, **overrides) -> FigureParameters:
    """The figure's default parameters with the given non-None fields replaced."""
    preset = figure_preset(figure_id)
    return replace(preset.defaults, **{k: v for k, v in overrides.items() if v is not None})
