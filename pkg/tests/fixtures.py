"""Shared test builders and utilities."""

import math
from pathlib import Path

import numpy as np

from noiseless.model import DataVectorSpec, DependencyBlock, DistributionSpec

PAIR_OUTCOMES = (
    ((0.0, 0.0), 0.4),
    ((1.0, 1.0), 0.4),
    ((0.0, 1.0), 0.1),
    ((1.0, 0.0), 0.1),
)


def example_profile(n: int) -> DataVectorSpec:
    """n independent records with variance 4, rho = 3 and sensitivity 30."""
    record = DistributionSpec.moments_only(0.0, 4.0, 3.0, 48.0, count=n)
    return DataVectorSpec(records=(record,), sensitivity=30.0)


def iid_bernoulli(n: int, p: float) -> DataVectorSpec:
    return DataVectorSpec(records=(DistributionSpec.bernoulli(p, count=n),))


def paired_bits(n: int) -> DataVectorSpec:
    """n fair bits where (0,1), (2,3), ... are positively correlated."""
    blocks = tuple(DependencyBlock((i, i + 1), PAIR_OUTCOMES) for i in range(0, n, 2))
    covariance = 0.4 - 0.25
    return DataVectorSpec(
        records=(DistributionSpec.bernoulli(0.5, count=n),),
        dependency_bound=2,
        total_variance=0.25 * n + 2.0 * covariance * (n // 2),
        dependency_blocks=blocks,
    )


def correlated_triples(n: int = 24) -> DataVectorSpec:
    """n fair bits in perfectly correlated triples (0,1,2), (3,4,5), ..."""
    outcomes = (((0.0, 0.0, 0.0), 0.5), ((1.0, 1.0, 1.0), 0.5))
    blocks = tuple(DependencyBlock((i, i + 1, i + 2), outcomes) for i in range(0, n, 3))
    return DataVectorSpec(
        records=(DistributionSpec.bernoulli(0.5, count=n),),
        dependency_bound=3,
        total_variance=2.25 * (n // 3),
        dependency_blocks=blocks,
    )


def heterogeneous_bits(rng: np.random.Generator, groups: int = 5) -> DataVectorSpec:
    """Bernoulli groups with p in [0.3, 0.7], 150 to 200 records in total."""
    total = int(rng.integers(150, 201))
    cuts = np.sort(rng.choice(np.arange(1, total), size=groups - 1, replace=False))
    counts = np.diff(np.concatenate(([0], cuts, [total])))
    records = tuple(
        DistributionSpec.bernoulli(float(rng.uniform(0.3, 0.7)), count=int(c)) for c in counts
    )
    return DataVectorSpec(records=records)


def random_discrete(rng: np.random.Generator, groups: int = 3) -> DataVectorSpec:
    """Groups of records on up to 5 integer points in [0, 4]."""
    records = []
    for _ in range(groups):
        size = int(rng.integers(2, 6))
        values = rng.choice(5, size=size, replace=False)
        probs = rng.dirichlet(np.ones(size))
        records.append(
            DistributionSpec.discrete(
                zip(values.astype(float), probs), count=int(rng.integers(20, 60))
            )
        )
    return DataVectorSpec(records=tuple(records))


def per_record_moments(p: float) -> tuple[float, float, float]:
    """(variance, E|X-p|^3, E(X-p)^4) of a Bernoulli(p) record."""
    q = 1.0 - p
    return p * q, p * q * (p * p + q * q), p * q * (p**3 + q**3)


def write_config(directory: Path, text: str, name: str = "config.yaml") -> Path:
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return path


def close(a: float, b: float, rel: float = 1e-12) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=0.0)
