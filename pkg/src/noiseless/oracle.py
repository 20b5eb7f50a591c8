"""Ground-truth privacy checks: exact and sampled hockey-stick divergence of adjacent sums."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.signal import fftconvolve

from .config import AccountingConfig, default_config
from .errors import (
    InvariantError,
    NoiselessError,
    OracleCapacityError,
    OracleUnsupportedError,
)
from .model import DataVectorSpec, DistributionSpec, Family, Pmf, PrivacyBound

logger = logging.getLogger(__name__)

TOO_LARGE = "instance too large for exact oracle, use mc_estimate"


@dataclass(frozen=True, eq=False)
class DiscretePmf:
    """Finite-support pmf with strictly increasing values."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        if values.ndim != 1 or values.shape != probs.shape:
            raise InvariantError("values and probs must be 1-D arrays of equal length")
        if values.size and not np.all(np.diff(values) > 0):
            raise InvariantError("values must be strictly increasing")
        if np.any(probs < 0):
            raise InvariantError("probabilities must be non-negative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_pairs(cls, pairs: Pmf) -> DiscretePmf:
        keys, inverse = np.unique([v for v, _ in pairs], return_inverse=True)
        return cls(keys, np.bincount(inverse, weights=[p for _, p in pairs]))

    @property
    def total(self) -> float:
        return math.fsum(self.probs)

    def __len__(self) -> int:
        return self.values.size

    def prob_of(self, value: float) -> float:
        k = np.searchsorted(self.values, value)
        if k < self.values.size and self.values[k] == value:
            return float(self.probs[k])
        return 0.0

    def pushforward(self, f: Callable[[np.ndarray], np.ndarray]) -> DiscretePmf:
        """Law of f(X) for a deterministic map f."""
        images, inverse = np.unique(np.asarray(f(self.values), dtype=float), return_inverse=True)
        return DiscretePmf(images, np.bincount(inverse, weights=self.probs))


def hockey_stick_delta(p: DiscretePmf, q: DiscretePmf, epsilon: float) -> float:
    """sum_x max(p(x) - e^epsilon q(x), 0) over the union of both supports."""
    if epsilon < 0:
        raise InvariantError("must be non-negative", field="epsilon")
    values = np.union1d(p.values, q.values)
    pw = np.zeros(values.size)
    qw = np.zeros(values.size)
    pw[np.searchsorted(values, p.values)] = p.probs
    qw[np.searchsorted(values, q.values)] = q.probs
    return _hockey_stick(pw, qw, epsilon)


def _hockey_stick(pw: np.ndarray, qw: np.ndarray, epsilon: float) -> float:
    growth = math.exp(epsilon) if epsilon < 700 else math.inf
    with np.errstate(over="ignore", invalid="ignore"):
        excess = np.where(qw > 0, pw - growth * qw, pw)
    return math.fsum(excess[excess > 0])


# Exact sums live on an integer lattice: value = (origin + step * j) * resolution.
# origin and step are Python ints so large sums never wrap around.

INT64_MAX = np.iinfo(np.int64).max


def _quantize(value: float, config: AccountingConfig) -> int:
    scaled = value / config.quantization_resolution
    if not math.isfinite(scaled):
        raise OracleCapacityError(f"value {value!r} cannot be placed on the oracle lattice")
    return round(scaled)


@dataclass(frozen=True, eq=False)
class _Lattice:
    origin: int
    step: int
    weights: np.ndarray

    @classmethod
    def point(cls, units: int = 0) -> _Lattice:
        return cls(units, 1, np.ones(1))

    @classmethod
    def from_pmf(cls, pmf: Pmf, config: AccountingConfig) -> _Lattice:
        merged: dict[int, float] = {}
        for v, p in pmf:
            key = _quantize(v, config)
            merged[key] = merged.get(key, 0.0) + p
        keys = sorted(merged)
        origin = keys[0]
        step = math.gcd(*(k - origin for k in keys[1:])) if len(keys) > 1 else 1
        length = (keys[-1] - origin) // step + 1
        if length > config.support_cap:
            raise OracleCapacityError(TOO_LARGE)
        dense = np.zeros(length)
        for key in keys:
            dense[(key - origin) // step] = merged[key]
        return cls(origin, step, dense)

    def refine(self, step: int) -> np.ndarray:
        factor = self.step // step
        if factor == 1:
            return self.weights
        out = np.zeros((self.weights.size - 1) * factor + 1)
        out[::factor] = self.weights
        return out

    def compact(self) -> _Lattice:
        nonzero = np.flatnonzero(self.weights)
        if nonzero.size == 0:
            raise NoiselessError("exact oracle lost all probability mass")
        first = int(nonzero[0])
        offsets = nonzero - first
        factor = int(np.gcd.reduce(offsets[1:])) if offsets.size > 1 else 1
        weights = self.weights[first : int(nonzero[-1]) + 1 : factor]
        return _Lattice(self.origin + first * self.step, self.step * factor, weights)

    def to_pmf(self, config: AccountingConfig) -> DiscretePmf:
        keep = np.flatnonzero(self.weights > 0)
        if abs(self.origin) + self.step * int(keep[-1]) <= INT64_MAX:
            units = self.origin + self.step * keep.astype(np.int64)
        else:
            units = np.array([float(self.origin + self.step * int(j)) for j in keep])
        values = units * config.quantization_resolution
        if not np.all(np.isfinite(values)) or np.any(np.diff(values) <= 0):
            raise OracleCapacityError(
                "sums too large to tell apart at the oracle resolution, use mc_estimate"
            )
        return DiscretePmf(values, self.weights[keep])


def _convolve(a: _Lattice, b: _Lattice, config: AccountingConfig) -> _Lattice:
    if a.weights.size == 1:
        return _Lattice(a.origin + b.origin, b.step, b.weights * a.weights[0])
    if b.weights.size == 1:
        return _Lattice(a.origin + b.origin, a.step, a.weights * b.weights[0])
    step = math.gcd(a.step, b.step)
    span = (a.weights.size - 1) * (a.step // step) + (b.weights.size - 1) * (b.step // step) + 1
    if span > config.support_cap:
        raise OracleCapacityError(TOO_LARGE)
    wa, wb = a.refine(step), b.refine(step)
    if wa.size * wb.size > config.direct_convolution_limit:
        out = np.clip(fftconvolve(wa, wb), 0.0, None)
    else:
        out = np.convolve(wa, wb)
    return _Lattice(a.origin + b.origin, step, out).compact()


def _power(base: _Lattice, k: int, config: AccountingConfig) -> _Lattice:
    """Law of the sum of k i.i.d. copies, by repeated squaring."""
    result = _Lattice.point()
    square = base
    while k:
        if k & 1:
            result = _convolve(result, square, config)
        k >>= 1
        if k:
            square = _convolve(square, square, config)
    return result


class Adjacency(Enum):
    REMOVE = "remove"
    INSERT = "insert"


@dataclass(frozen=True)
class AdjacencyCase:
    """One neighbour of the base vector: a removed index or an inserted record."""

    direction: Adjacency
    index: int | None = None
    insert_spec: DistributionSpec | None = None
    position: int | None = None
    base: DataVectorSpec | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.direction is Adjacency.REMOVE and self.index is None:
            raise InvariantError("removal needs an index", field="index")
        if self.direction is Adjacency.INSERT and self.insert_spec is None:
            raise InvariantError("insertion needs a record spec", field="insert_spec")
        if self.base is not None and self.index is not None and not 0 <= self.index < self.base.n:
            raise InvariantError(f"record index {self.index} out of range", field="index")

    def describe(self) -> str:
        if self.direction is Adjacency.REMOVE:
            return f"remove record {self.index}"
        return f"insert {self.insert_spec.family.value} record at position {self.position}"


@dataclass
class _Layout:
    """Independent components of the sum and the removable records within them."""

    free_counts: list[int]
    first_free: list[int | None]
    shift_units: int


def _check_exact(spec: DataVectorSpec, fixed: Mapping[int, float]) -> None:
    for position, record in enumerate(spec.records):
        if not record.is_finite:
            raise OracleUnsupportedError(
                f"{record.label(position)} is moments-only and has no pmf; use mc_estimate"
            )
    _check_fixed(spec, fixed)


def _check_fixed(spec: DataVectorSpec, fixed: Mapping[int, float]) -> None:
    if spec.dependency_bound > 1 and not spec.dependency_blocks:
        raise OracleUnsupportedError(
            f"dependency_bound = {spec.dependency_bound} without dependency_blocks: "
            "the joint law is unknown and the oracle would assume independence"
        )
    blocks = spec.block_of
    for index in fixed:
        spec.group_of(index)
        if index in blocks:
            raise OracleUnsupportedError(
                f"compromised record {index} lies inside a dependency block"
            )


def _layout(
    spec: DataVectorSpec, fixed: Mapping[int, float], config: AccountingConfig
) -> _Layout:
    taken = set(spec.block_of) | set(fixed)
    free_counts, first_free = [], []
    for start, record in zip(spec.offsets, spec.records):
        free = [i for i in range(start, start + record.count) if i not in taken] if taken else None
        if free is None:
            free_counts.append(record.count)
            first_free.append(start)
        else:
            free_counts.append(len(free))
            first_free.append(free[0] if free else None)
    shift = sum(_quantize(v, config) for v in fixed.values())
    return _Layout(free_counts, first_free, shift)


@dataclass
class _Neighbourhood:
    base: DiscretePmf
    neighbours: list[tuple[AdjacencyCase, DiscretePmf]]


def _default_insert(spec: DataVectorSpec) -> DistributionSpec:
    return spec.records[0].with_count(1)


def _exact_neighbourhood(
    spec: DataVectorSpec,
    insert_spec: DistributionSpec | None,
    fixed: Mapping[int, float],
    config: AccountingConfig,
) -> _Neighbourhood:
    _check_exact(spec, fixed)
    insert_spec = insert_spec or _default_insert(spec)
    if not insert_spec.is_finite:
        raise OracleUnsupportedError("inserted record must have a finite pmf")
    layout = _layout(spec, fixed, config)

    # (unit lattice, [(case, unit lattice with one record removed)])
    units: list[tuple[_Lattice, list[tuple[AdjacencyCase, _Lattice]]]] = []
    for g, record in enumerate(spec.records):
        k = layout.free_counts[g]
        if not k:
            continue
        single = _Lattice.from_pmf(record.pmf(), config)
        rest = _power(single, k - 1, config)
        case = AdjacencyCase(Adjacency.REMOVE, index=layout.first_free[g], base=spec)
        units.append((_convolve(rest, single, config), [(case, rest)]))
    for block in spec.dependency_blocks:
        removals = [
            (
                AdjacencyCase(Adjacency.REMOVE, index=index, base=spec),
                _Lattice.from_pmf(block.sum_pmf(skip=member), config),
            )
            for member, index in enumerate(block.indices)
        ]
        units.append((_Lattice.from_pmf(block.sum_pmf(), config), removals))

    prefix = [_Lattice.point(layout.shift_units)]
    for unit, _ in units:
        prefix.append(_convolve(prefix[-1], unit, config))
    suffix = [_Lattice.point()]
    for unit, _ in reversed(units):
        suffix.append(_convolve(unit, suffix[-1], config))
    suffix.reverse()

    base = prefix[-1]
    neighbours = []
    for u, (_, removals) in enumerate(units):
        others = _convolve(prefix[u], suffix[u + 1], config)
        for case, replacement in removals:
            neighbours.append((case, _convolve(others, replacement, config).to_pmf(config)))
    inserted = _convolve(base, _Lattice.from_pmf(insert_spec.pmf(), config), config)
    neighbours.append(
        (
            AdjacencyCase(Adjacency.INSERT, insert_spec=insert_spec, position=spec.n, base=spec),
            inserted.to_pmf(config),
        )
    )

    base_pmf = base.to_pmf(config)
    if abs(base_pmf.total - 1.0) > config.pmf_tolerance:
        raise NoiselessError(
            f"exact oracle mass drifted to {base_pmf.total!r}; tighten quantization"
        )
    logger.info(
        "exact oracle: %d support points, %d adjacency cases", len(base_pmf), len(neighbours)
    )
    return _Neighbourhood(base_pmf, neighbours)


def exact_sum_pmf(
    spec: DataVectorSpec,
    fixed: Mapping[int, float] | None = None,
    config: AccountingConfig | None = None,
) -> DiscretePmf:
    """Exact law of the sum; compromised records in ``fixed`` count as constants."""
    config = config or default_config
    fixed = fixed or {}
    _check_exact(spec, fixed)
    layout = _layout(spec, fixed, config)
    total = _Lattice.point(layout.shift_units)
    for g, record in enumerate(spec.records):
        if layout.free_counts[g]:
            single = _Lattice.from_pmf(record.pmf(), config)
            total = _convolve(total, _power(single, layout.free_counts[g], config), config)
    for block in spec.dependency_blocks:
        total = _convolve(total, _Lattice.from_pmf(block.sum_pmf(), config), config)
    pmf = total.to_pmf(config)
    if abs(pmf.total - 1.0) > config.pmf_tolerance:
        raise NoiselessError(f"exact oracle mass drifted to {pmf.total!r}")
    return pmf


@dataclass(frozen=True)
class OracleAudit:
    """The tight delta at one epsilon and the adjacent pair attaining it."""

    epsilon: float
    delta: float
    worst_case: AdjacencyCase
    base_first: bool
    cases_checked: int


def _worst(
    epsilon: float,
    base: DiscretePmf,
    neighbours: Sequence[tuple[AdjacencyCase, DiscretePmf]],
    f: Callable[[np.ndarray], np.ndarray] | None = None,
) -> OracleAudit:
    if f is not None:
        base = base.pushforward(f)
    best: OracleAudit | None = None
    for case, pmf in neighbours:
        if f is not None:
            pmf = pmf.pushforward(f)
        for base_first, (p, q) in ((True, (base, pmf)), (False, (pmf, base))):
            delta = hockey_stick_delta(p, q, epsilon)
            if best is None or delta > best.delta:
                best = OracleAudit(epsilon, delta, case, base_first, len(neighbours))
    return best


def exact_np_audit(
    spec: DataVectorSpec,
    epsilon: float,
    insert_spec: DistributionSpec | None = None,
    fixed: Mapping[int, float] | None = None,
    config: AccountingConfig | None = None,
) -> OracleAudit:
    """Max over every removal, the insertion and both orderings of the hockey-stick delta."""
    config = config or default_config
    hood = _exact_neighbourhood(spec, insert_spec, fixed or {}, config)
    return _worst(epsilon, hood.base, hood.neighbours)


def exact_np_delta(
    spec: DataVectorSpec,
    epsilon: float,
    insert_spec: DistributionSpec | None = None,
    fixed: Mapping[int, float] | None = None,
    config: AccountingConfig | None = None,
) -> float:
    return exact_np_audit(spec, epsilon, insert_spec, fixed, config).delta


class CoarseningKind(Enum):
    IDENTITY = "identity"
    ROUND = "round"
    BUCKET = "bucket"
    THRESHOLD = "threshold"
    CONSTANT = "constant"


@dataclass(frozen=True)
class CoarseningMap:
    """A deterministic map applied to released sums."""

    kind: CoarseningKind
    multiple: float = 1.0
    edges: tuple[float, ...] = ()
    threshold: float = 0.0

    def __call__(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.kind is CoarseningKind.IDENTITY:
            return values
        if self.kind is CoarseningKind.ROUND:
            return np.round(values / self.multiple) * self.multiple
        if self.kind is CoarseningKind.BUCKET:
            return np.searchsorted(np.asarray(self.edges), values, side="right").astype(float)
        if self.kind is CoarseningKind.THRESHOLD:
            return (values >= self.threshold).astype(float)
        return np.zeros_like(values)

    @classmethod
    def identity(cls) -> CoarseningMap:
        return cls(CoarseningKind.IDENTITY)

    @classmethod
    def round_to(cls, multiple: float) -> CoarseningMap:
        if not multiple > 0:
            raise InvariantError("must be positive", field="multiple")
        return cls(CoarseningKind.ROUND, multiple=float(multiple))

    @classmethod
    def bucket(cls, edges: Sequence[float]) -> CoarseningMap:
        edges = tuple(sorted(float(e) for e in edges))
        if not edges:
            raise InvariantError("at least one edge is required", field="edges")
        return cls(CoarseningKind.BUCKET, edges=edges)

    @classmethod
    def above(cls, threshold: float) -> CoarseningMap:
        return cls(CoarseningKind.THRESHOLD, threshold=float(threshold))

    @classmethod
    def constant(cls) -> CoarseningMap:
        return cls(CoarseningKind.CONSTANT)


def builtin_maps(spec: DataVectorSpec) -> list[CoarseningMap]:
    """One map of every kind, scaled to the data's sensitivity."""
    width = 10.0 * spec.sensitivity
    middle = sum(m.mean * r.count for m, r in zip(spec.group_moments, spec.records))
    return [
        CoarseningMap.identity(),
        CoarseningMap.round_to(width),
        CoarseningMap.bucket((middle - width, middle, middle + width)),
        CoarseningMap.above(middle),
        CoarseningMap.constant(),
    ]


def postprocess_check(
    spec: DataVectorSpec,
    epsilon: float,
    f: Callable[[np.ndarray], np.ndarray],
    insert_spec: DistributionSpec | None = None,
    fixed: Mapping[int, float] | None = None,
    config: AccountingConfig | None = None,
) -> bool:
    """True iff coarsening the released sum with f does not increase the tight delta."""
    config = config or default_config
    hood = _exact_neighbourhood(spec, insert_spec, fixed or {}, config)
    original = _worst(epsilon, hood.base, hood.neighbours).delta
    pushed = _worst(epsilon, hood.base, hood.neighbours, f).delta
    logger.debug("post-processing: delta %.6g -> %.6g", original, pushed)
    return pushed <= original + config.soundness_slack


# Monte Carlo estimate


@dataclass(frozen=True)
class McEstimate:
    """Histogram estimate of the tight delta; never a certificate."""

    epsilon: float
    estimate: float
    ci95: float
    samples: int
    seed: int
    worst_case: AdjacencyCase


def _sample_record(
    record: DistributionSpec, k: int, rng: np.random.Generator, size: int
) -> np.ndarray:
    if k == 0:
        return np.zeros(size)
    if record.family is Family.BERNOULLI:
        return rng.binomial(k, record.p, size).astype(float)
    if record.family is Family.DISCRETE:
        values = np.array([v for v, _ in record.support])
        probs = np.array([p for _, p in record.support])
        return rng.multinomial(k, probs / probs.sum(), size) @ values
    moments = record.moments
    return rng.normal(k * moments.mean, math.sqrt(k * moments.variance), size)


def _sample_pairs(pmf: Pmf, rng: np.random.Generator, size: int) -> np.ndarray:
    values = np.array([v for v, _ in pmf])
    probs = np.array([p for _, p in pmf])
    return values[rng.choice(values.size, size=size, p=probs / probs.sum())]


@dataclass(frozen=True)
class _Draw:
    """What differs from the base vector when sampling one neighbour."""

    case: AdjacencyCase | None
    removed_group: int | None = None
    block: int | None = None
    member: int | None = None


def _sample_sum(
    spec: DataVectorSpec,
    layout: _Layout,
    draw: _Draw,
    fixed_total: float,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    total = np.full(size, fixed_total)
    for g, record in enumerate(spec.records):
        k = layout.free_counts[g] - (1 if draw.removed_group == g else 0)
        total += _sample_record(record, k, rng, size)
    for b, block in enumerate(spec.dependency_blocks):
        skip = draw.member if draw.block == b else None
        total += _sample_pairs(block.sum_pmf(skip=skip), rng, size)
    if draw.case is not None and draw.case.direction is Adjacency.INSERT:
        total += _sample_record(draw.case.insert_spec, 1, rng, size)
    return total


def _bucket_counts(
    p_samples: np.ndarray, q_samples: np.ndarray, config: AccountingConfig
) -> tuple[np.ndarray, np.ndarray]:
    pooled = np.concatenate([p_samples, q_samples])
    distinct = np.unique(pooled)
    if distinct.size <= config.mc_exact_bucket_limit:
        p_counts = np.bincount(np.searchsorted(distinct, p_samples), minlength=distinct.size)
        q_counts = np.bincount(np.searchsorted(distinct, q_samples), minlength=distinct.size)
        return p_counts, q_counts
    edges = np.histogram_bin_edges(pooled, bins="fd")
    return np.histogram(p_samples, edges)[0], np.histogram(q_samples, edges)[0]


def _two_sided(p_counts: np.ndarray, q_counts: np.ndarray, epsilon: float) -> float:
    pw = p_counts / p_counts.sum()
    qw = q_counts / q_counts.sum()
    return max(_hockey_stick(pw, qw, epsilon), _hockey_stick(qw, pw, epsilon))


def mc_estimate_delta(
    spec: DataVectorSpec,
    epsilon: float,
    insert_spec: DistributionSpec | None = None,
    samples: int = 100_000,
    seed: int = 0,
    fixed: Mapping[int, float] | None = None,
    config: AccountingConfig | None = None,
) -> McEstimate:
    """Sampled hockey-stick delta with a 95% bootstrap half-width.

    Every adjacency case draws from its own seeded substream, so the result
    does not depend on ``config.workers``. Moments-only records are sampled
    from a normal surrogate.
    """
    config = config or default_config
    fixed = fixed or {}
    if samples < config.mc_min_samples:
        raise InvariantError(f"at least {config.mc_min_samples} samples required", field="samples")
    if epsilon < 0:
        raise InvariantError("must be non-negative", field="epsilon")
    _check_fixed(spec, fixed)
    if any(not r.is_finite for r in spec.records):
        logger.warning("moments-only records are sampled from a normal surrogate")
    insert_spec = insert_spec or _default_insert(spec)
    layout = _layout(spec, fixed, config)
    fixed_total = math.fsum(fixed.values())

    draws = [
        _Draw(AdjacencyCase(Adjacency.REMOVE, index=layout.first_free[g], base=spec), removed_group=g)
        for g in range(len(spec.records))
        if layout.free_counts[g]
    ]
    draws += [
        _Draw(AdjacencyCase(Adjacency.REMOVE, index=index, base=spec), block=b, member=m)
        for b, block in enumerate(spec.dependency_blocks)
        for m, index in enumerate(block.indices)
    ]
    draws.append(
        _Draw(AdjacencyCase(Adjacency.INSERT, insert_spec=insert_spec, position=spec.n, base=spec))
    )

    streams = np.random.SeedSequence(seed).spawn(len(draws) + 2)
    base = _sample_sum(
        spec, layout, _Draw(None), fixed_total, np.random.default_rng(streams[0]), samples
    )

    def run(k: int) -> tuple[np.ndarray, np.ndarray]:
        rng = np.random.default_rng(streams[k + 2])
        neighbour = _sample_sum(spec, layout, draws[k], fixed_total, rng, samples)
        return _bucket_counts(base, neighbour, config)

    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        counts = list(pool.map(run, range(len(draws))))

    estimates = [_two_sided(p, q, epsilon) for p, q in counts]
    worst = int(np.argmax(estimates))

    boot_rng = np.random.default_rng(streams[1])
    rounds = np.empty(config.bootstrap_rounds)
    for r in range(config.bootstrap_rounds):
        rounds[r] = max(
            _two_sided(
                boot_rng.multinomial(samples, p / p.sum()),
                boot_rng.multinomial(samples, q / q.sum()),
                epsilon,
            )
            for p, q in counts
        )
    low, high = np.percentile(rounds, [2.5, 97.5])
    estimate = estimates[worst]
    ci95 = float(max(estimate - low, high - estimate, 0.0))
    logger.info("mc estimate %.6g +- %.3g over %d cases", estimate, ci95, len(draws))
    return McEstimate(epsilon, estimate, ci95, samples, seed, draws[worst].case)


# Certification


@dataclass(frozen=True)
class CertificationCase:
    name: str
    spec: DataVectorSpec
    bound: PrivacyBound
    insert_spec: DistributionSpec | None = None
    fixed: Mapping[int, float] | None = None


@dataclass(frozen=True)
class Certificate:
    name: str
    epsilon: float
    claimed_delta: float
    measured_delta: float
    passed: bool
    worst_case: AdjacencyCase


def certify_one(case: CertificationCase, config: AccountingConfig | None = None) -> Certificate:
    config = config or default_config
    audit = exact_np_audit(
        case.spec, case.bound.epsilon, case.insert_spec, case.fixed, config
    )
    passed = audit.delta <= case.bound.delta + config.soundness_slack
    if not passed:
        logger.warning(
            "%s: measured delta %.12g exceeds claimed %.12g",
            case.name,
            audit.delta,
            case.bound.delta,
        )
    return Certificate(
        case.name, case.bound.epsilon, case.bound.delta, audit.delta, passed, audit.worst_case
    )


def certify(
    cases: Sequence[CertificationCase], config: AccountingConfig | None = None
) -> list[Certificate]:
    """Check claimed deltas against the exact oracle; results keep the input order."""
    config = config or default_config
    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        return list(pool.map(lambda case: certify_one(case, config), cases))
