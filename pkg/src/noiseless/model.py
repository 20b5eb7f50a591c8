"""Domain types for randomized data vectors, adversaries and privacy bounds."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import InsufficientMomentsError, InvariantError

PROB_TOLERANCE = 1e-12
VARIANCE_TOLERANCE = 1e-9
MARGINAL_TOLERANCE = 1e-9

Pmf = tuple[tuple[float, float], ...]


class Family(Enum):
    BERNOULLI = "bernoulli"
    DISCRETE = "discrete"
    MOMENTS = "moments"


class BoundSource(Enum):
    """Which result produced a privacy bound."""

    BINOMIAL = "binomial"
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    INDEPENDENT_COMPROMISED = "independent-compromised"
    DEPENDENT_COMPROMISED = "dependent-compromised"
    NOISE_AUGMENTED = "noise-augmented"
    LAPLACE = "laplace"


@dataclass(frozen=True)
class Diagnostic:
    """A finding attached to a result; rendered in every report."""

    code: str
    message: str


@dataclass(frozen=True)
class MomentSummary:
    """Mean, variance and the central moments the normal approximations use.

    The two higher moments are optional only for moments-only records; the
    bound that needs a missing one raises InsufficientMomentsError.
    """

    mean: float
    variance: float
    abs_third_central: float | None = None
    fourth_central: float | None = None

    def __post_init__(self) -> None:
        present = [
            v
            for v in (
                self.mean,
                self.variance,
                self.abs_third_central,
                self.fourth_central,
            )
            if v is not None
        ]
        if not all(math.isfinite(v) for v in present):
            raise InvariantError("all moments must be finite")
        if self.variance < 0:
            raise InvariantError("variance must be non-negative")
        if self.abs_third_central is not None and self.abs_third_central < 0:
            raise InvariantError("third absolute central moment must be non-negative")
        if self.fourth_central is not None:
            floor = self.variance**2 * (1 - VARIANCE_TOLERANCE)
            if self.fourth_central < 0 or self.fourth_central < floor:
                raise InvariantError(
                    "fourth central moment must be at least variance squared"
                )


def _canonical_pmf(pairs: Iterable[Sequence[float]]) -> Pmf:
    """Sort by value and merge duplicate support points."""
    merged: dict[float, float] = {}
    for value, prob in pairs:
        value, prob = float(value), float(prob)
        merged[value] = merged.get(value, 0.0) + prob
    return tuple(sorted(merged.items()))


def _check_pmf(pmf: Pmf, what: str) -> None:
    if not pmf:
        raise InvariantError(f"{what} must not be empty")
    if not all(math.isfinite(v) and math.isfinite(p) for v, p in pmf):
        raise InvariantError(f"{what} values and probabilities must be finite")
    if any(p < 0 for _, p in pmf):
        raise InvariantError(f"{what} probabilities must be non-negative")
    total = math.fsum(p for _, p in pmf)
    if abs(total - 1.0) > PROB_TOLERANCE:
        raise InvariantError(f"{what} probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class DistributionSpec:
    """Law of one record, shared by ``count`` records of the data vector."""

    family: Family
    p: float | None = None
    support: Pmf = ()
    moments: MomentSummary | None = None
    support_bounds: tuple[float, float] | None = None
    count: int = 1
    name: str | None = None
    empirical: bool = False

    def __post_init__(self) -> None:
        if isinstance(self.count, bool) or not isinstance(self.count, int):
            raise InvariantError("count must be an integer", field="count")
        if self.count < 1:
            raise InvariantError("count must be positive", field="count")

        if self.family is Family.BERNOULLI:
            if self.p is None or not 0 < self.p < 1:
                raise InvariantError("bernoulli p must lie in (0, 1)", field="p")
        elif self.family is Family.DISCRETE:
            object.__setattr__(self, "support", _canonical_pmf(self.support))
            _check_pmf(self.support, "support")
        else:
            if self.moments is None:
                raise InvariantError("moments-only record needs moments", field="moments")
            if self.moments.variance <= 0:
                raise InvariantError("variance must be positive", field="variance")
            if self.support_bounds is not None:
                low, high = self.support_bounds
                if not (math.isfinite(low) and math.isfinite(high)) or low > high:
                    raise InvariantError(
                        "support bounds must be a finite interval [a, b]",
                        field="support_bounds",
                    )
                if not low <= self.moments.mean <= high:
                    raise InvariantError(
                        "mean must lie inside the support bounds",
                        field="support_bounds",
                    )

    @classmethod
    def bernoulli(cls, p: float, count: int = 1, name: str | None = None):
        return cls(Family.BERNOULLI, p=float(p), count=count, name=name)

    @classmethod
    def discrete(
        cls,
        support: Iterable[Sequence[float]],
        count: int = 1,
        name: str | None = None,
    ):
        return cls(Family.DISCRETE, support=tuple(support), count=count, name=name)

    @classmethod
    def moments_only(
        cls,
        mean: float,
        variance: float,
        abs_third_central: float | None = None,
        fourth_central: float | None = None,
        support_bounds: tuple[float, float] | None = None,
        count: int = 1,
        name: str | None = None,
    ):
        summary = MomentSummary(mean, variance, abs_third_central, fourth_central)
        return cls(
            Family.MOMENTS,
            moments=summary,
            support_bounds=support_bounds,
            count=count,
            name=name,
        )

    @classmethod
    def from_values(
        cls, values: Iterable[float], count: int = 1, name: str | None = None
    ):
        """Fit the empirical pmf of a numeric column. Not a rigorous model."""
        data = np.asarray(list(values), dtype=float)
        if data.size == 0:
            raise InvariantError("empirical column is empty", field="values")
        if not np.all(np.isfinite(data)):
            raise InvariantError("empirical column has non-finite values", field="values")
        points, counts = np.unique(data, return_counts=True)
        probs = counts / counts.sum()
        support = tuple(zip(points.tolist(), probs.tolist()))
        return cls(
            Family.DISCRETE, support=support, count=count, name=name, empirical=True
        )

    @property
    def is_finite(self) -> bool:
        """True when the law has a finite support the exact oracle can use."""
        return self.family is not Family.MOMENTS

    def pmf(self) -> Pmf:
        if self.family is Family.BERNOULLI:
            return ((0.0, 1.0 - self.p), (1.0, self.p))
        if self.family is Family.DISCRETE:
            return self.support
        raise InvariantError("moments-only record has no pmf", field="family")

    @property
    def magnitude_bound(self) -> float | None:
        """sup |value| over the support, or None when unbounded."""
        if self.family is Family.MOMENTS:
            if self.support_bounds is None:
                return None
            return max(abs(b) for b in self.support_bounds)
        return max(abs(v) for v, _ in self.pmf())

    def with_count(self, count: int) -> DistributionSpec:
        return replace(self, count=count)

    def label(self, position: int) -> str:
        return f"records[{position}]" + (f" ({self.name!r})" if self.name else "")


def central_moments(spec: DistributionSpec) -> MomentSummary:
    """Mean, variance, E|X-mu|^3 and E(X-mu)^4 of one record."""
    if spec.family is Family.BERNOULLI:
        p = spec.p
        q = 1.0 - p
        return MomentSummary(
            mean=p,
            variance=p * q,
            abs_third_central=p * q * (q**2 + p**2),
            fourth_central=p * q * (q**3 + p**3),
        )
    if spec.family is Family.DISCRETE:
        pmf = spec.support
        mean = math.fsum(p * v for v, p in pmf)
        deviations = [(abs(v - mean), p) for v, p in pmf]
        return MomentSummary(
            mean=mean,
            variance=math.fsum(p * d**2 for d, p in deviations),
            abs_third_central=math.fsum(p * d**3 for d, p in deviations),
            fourth_central=math.fsum(p * d**4 for d, p in deviations),
        )
    return spec.moments


@dataclass(frozen=True)
class DependencyBlock:
    """Explicit joint pmf of a set of at most D dependent records."""

    indices: tuple[int, ...]
    outcomes: tuple[tuple[tuple[float, ...], float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(
            self,
            "outcomes",
            tuple((tuple(float(x) for x in vec), float(p)) for vec, p in self.outcomes),
        )
        if not self.indices:
            raise InvariantError("block must contain at least one index")
        if len(set(self.indices)) != len(self.indices) or min(self.indices) < 0:
            raise InvariantError("block indices must be distinct and non-negative")
        if any(len(vec) != len(self.indices) for vec, _ in self.outcomes):
            raise InvariantError("every outcome must assign one value per index")
        _check_pmf(tuple((0.0, p) for _, p in self.outcomes), "block outcomes")

    @property
    def size(self) -> int:
        return len(self.indices)

    def marginal(self, position: int) -> Pmf:
        return _canonical_pmf((vec[position], p) for vec, p in self.outcomes)

    def sum_pmf(self, skip: int | None = None) -> Pmf:
        """Pmf of the block sum, optionally leaving out one member."""
        return _canonical_pmf(
            (math.fsum(x for k, x in enumerate(vec) if k != skip), p)
            for vec, p in self.outcomes
        )


@dataclass(frozen=True)
class MomentTotals:
    """Moment sums over a subset of records."""

    n: int
    variance: float
    abs_third: float | None
    fourth: float | None

    def require(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise InsufficientMomentsError(
                f"insufficient moments: sum of {', '.join(missing)} unavailable"
            )


@dataclass(frozen=True)
class DataVectorSpec:
    """The data vector: record groups, sensitivity and dependency structure."""

    records: tuple[DistributionSpec, ...]
    sensitivity: float | None = None
    dependency_bound: int = 1
    total_variance: float | None = None
    dependency_blocks: tuple[DependencyBlock, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "dependency_blocks", tuple(self.dependency_blocks))
        if not self.records:
            raise InvariantError("at least one record group is required", field="records")
        if isinstance(self.dependency_bound, bool) or not isinstance(
            self.dependency_bound, int
        ):
            raise InvariantError("must be an integer", field="dependency_bound")
        if self.dependency_bound < 1:
            raise InvariantError("must be at least 1", field="dependency_bound")
        self._settle_sensitivity()
        self._settle_total_variance()
        self._check_blocks()

    def _settle_sensitivity(self) -> None:
        bounds = [r.magnitude_bound for r in self.records]
        known = [b for b in bounds if b is not None]
        if self.sensitivity is None:
            if len(known) < len(bounds):
                raise InvariantError(
                    "must be supplied when a record has unbounded support",
                    field="sensitivity",
                )
            if max(known) <= 0:
                raise InvariantError(
                    "cannot be inferred from all-zero supports", field="sensitivity"
                )
            object.__setattr__(self, "sensitivity", float(max(known)))
            return
        sensitivity = float(self.sensitivity)
        if not math.isfinite(sensitivity) or sensitivity <= 0:
            raise InvariantError("must be positive and finite", field="sensitivity")
        if known and sensitivity < max(known) - PROB_TOLERANCE:
            raise InvariantError(
                f"{sensitivity!r} is below the largest record magnitude {max(known)!r}",
                field="sensitivity",
            )
        object.__setattr__(self, "sensitivity", sensitivity)

    def _settle_total_variance(self) -> None:
        if self.dependency_bound == 1:
            derived = self.totals.variance
            if self.total_variance is not None:
                if abs(self.total_variance - derived) > VARIANCE_TOLERANCE * derived:
                    raise InvariantError(
                        f"{self.total_variance!r} disagrees with the sum of record "
                        f"variances {derived!r} for independent data",
                        field="total_variance",
                    )
            object.__setattr__(self, "total_variance", derived)
            return
        if self.total_variance is None:
            raise InvariantError(
                "total_variance required when dependency_bound > 1",
                field="total_variance",
            )
        if not math.isfinite(self.total_variance) or self.total_variance <= 0:
            raise InvariantError("must be positive", field="total_variance")

    def _check_blocks(self) -> None:
        seen: set[int] = set()
        for position, block in enumerate(self.dependency_blocks):
            where = f"dependency_blocks[{position}]"
            if block.size > self.dependency_bound:
                raise InvariantError(
                    f"block of size {block.size} exceeds dependency_bound "
                    f"{self.dependency_bound}",
                    field=where,
                )
            if max(block.indices) >= self.n:
                raise InvariantError("index out of range", field=where)
            if seen.intersection(block.indices):
                raise InvariantError("blocks must be disjoint", field=where)
            seen.update(block.indices)
            for member, index in enumerate(block.indices):
                record = self.records[self.group_of(index)]
                if record.is_finite and not _same_pmf(
                    block.marginal(member), record.pmf()
                ):
                    raise InvariantError(
                        f"marginal of index {index} does not match its record spec",
                        field=where,
                    )

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """First expanded index of every record group."""
        starts = [0]
        for record in self.records[:-1]:
            starts.append(starts[-1] + record.count)
        return tuple(starts)

    @property
    def n(self) -> int:
        return self.offsets[-1] + self.records[-1].count

    def group_of(self, index: int) -> int:
        if not 0 <= index < self.n:
            raise InvariantError(f"record index {index} out of range")
        return int(np.searchsorted(self.offsets, index, side="right")) - 1

    @cached_property
    def group_moments(self) -> tuple[MomentSummary, ...]:
        return tuple(central_moments(r) for r in self.records)

    def partial_totals(self, counts: Sequence[int]) -> MomentTotals:
        """Moment sums when group g contributes counts[g] records."""
        active = [(c, m) for c, m in zip(counts, self.group_moments) if c > 0]

        def total(attribute: str) -> float | None:
            values = [getattr(m, attribute) for _, m in active]
            if any(v is None for v in values):
                return None
            return math.fsum(c * v for (c, _), v in zip(active, values))

        return MomentTotals(
            n=sum(counts),
            variance=total("variance"),
            abs_third=total("abs_third_central"),
            fourth=total("fourth_central"),
        )

    @cached_property
    def totals(self) -> MomentTotals:
        return self.partial_totals([r.count for r in self.records])

    @property
    def block_of(self) -> dict[int, int]:
        return {
            index: position
            for position, block in enumerate(self.dependency_blocks)
            for index in block.indices
        }

    @property
    def has_empirical(self) -> bool:
        return any(r.empirical for r in self.records)


def _same_pmf(left: Pmf, right: Pmf) -> bool:
    left = tuple((v, p) for v, p in left if p > 0)
    right = tuple((v, p) for v, p in right if p > 0)
    return len(left) == len(right) and all(
        abs(lv - rv) <= MARGINAL_TOLERANCE and abs(lp - rp) <= MARGINAL_TOLERANCE
        for (lv, lp), (rv, rp) in zip(left, right)
    )


def compromised_count(gamma: float, n: int) -> int:
    """ceil(gamma * n), robust to products like 0.3 * 10 = 3.0000000000000004."""
    product = gamma * n
    nearest = round(product)
    if math.isclose(product, nearest, rel_tol=1e-12, abs_tol=0.0):
        return max(0, nearest)
    return max(0, math.ceil(product))


@dataclass(frozen=True)
class AdversaryModel:
    """Adversary knowing dependencies up to size D and a gamma-fraction of values."""

    dependency_bound: int = 1
    gamma: float = 0.0
    compromised: frozenset[int] | None = None

    def __post_init__(self) -> None:
        if self.dependency_bound < 1:
            raise InvariantError("must be at least 1", field="dependency_bound")
        if not 0 <= self.gamma < 1:
            raise InvariantError("must lie in [0, 1)", field="gamma")
        if self.compromised is not None:
            object.__setattr__(self, "compromised", frozenset(self.compromised))

    def check_against(self, spec: DataVectorSpec) -> None:
        n = spec.n
        if self.dependency_bound != spec.dependency_bound:
            raise InvariantError(
                "adversary and data vector disagree", field="dependency_bound"
            )
        if compromised_count(self.gamma, n) >= n:
            raise InvariantError("at least one record must stay uncompromised", field="gamma")
        if self.compromised is None:
            return
        if any(not 0 <= i < n for i in self.compromised):
            raise InvariantError("index out of range", field="compromised")
        if len(self.compromised) > compromised_count(self.gamma, n):
            raise InvariantError(
                f"{len(self.compromised)} indices exceed ceil(gamma*n) = "
                f"{compromised_count(self.gamma, n)}",
                field="compromised",
            )


@dataclass(frozen=True)
class PrivacyBound:
    """An (epsilon, delta) guarantee; delta >= 1 is reported raw and flagged."""

    epsilon: float
    delta: float
    source: BoundSource
    preconditions_ok: bool = True
    diagnostics: tuple[Diagnostic, ...] = ()

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise InvariantError("epsilon must be positive and finite", field="epsilon")
        if math.isnan(self.delta) or self.delta < 0:
            raise InvariantError("delta must be non-negative", field="delta")

    @property
    def vacuous(self) -> bool:
        return self.delta >= 1

    def with_diagnostics(self, *extra: Diagnostic) -> PrivacyBound:
        return replace(self, diagnostics=self.diagnostics + tuple(extra))


def make_bound(
    epsilon: float,
    delta: float,
    source: BoundSource,
    diagnostics: Iterable[Diagnostic] = (),
    preconditions_ok: bool = True,
) -> PrivacyBound:
    """Build a bound and flag a vacuous delta."""
    diagnostics = tuple(diagnostics)
    if delta >= 1:
        diagnostics += (
            Diagnostic("vacuous-delta", f"delta = {delta:.6g} >= 1 carries no guarantee"),
        )
    return PrivacyBound(epsilon, delta, source, preconditions_ok, diagnostics)
