"""Config file ingestion: YAML text -> schema models -> validated domain objects."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigParseError, ConfigSchemaError, InvariantError
from .model import (
    AdversaryModel,
    DataVectorSpec,
    DependencyBlock,
    DistributionSpec,
)

logger = logging.getLogger(__name__)


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BernoulliRecord(_Strict):
    family: Literal["bernoulli"]
    p: float
    count: int = 1
    name: str | None = None


class DiscreteRecord(_Strict):
    family: Literal["discrete"]
    support: list[tuple[float, float]]
    count: int = 1
    name: str | None = None


class MomentsRecord(_Strict):
    family: Literal["moments"]
    mean: float
    variance: float
    abs_third: float | None = None
    fourth: float | None = None
    support_bounds: tuple[float, float] | None = None
    count: int = 1
    name: str | None = None


class EmpiricalRecord(_Strict):
    """A numeric column whose empirical pmf stands in for the record law."""

    family: Literal["empirical"]
    values: list[float] | None = None
    path: str | None = None
    column: str | int | None = None
    count: int = 1
    name: str | None = None

    @model_validator(mode="after")
    def _one_source(self) -> EmpiricalRecord:
        if (self.values is None) == (self.path is None):
            raise ValueError("give exactly one of 'values' or 'path'")
        if self.path is not None and self.column is None:
            raise ValueError("'column' is required with 'path'")
        return self


RecordModel = Annotated[
    BernoulliRecord | DiscreteRecord | MomentsRecord | EmpiricalRecord,
    Field(discriminator="family"),
]


class OutcomeModel(_Strict):
    values: list[float]
    prob: float


class BlockModel(_Strict):
    indices: list[int]
    outcomes: list[OutcomeModel]


class TargetModel(_Strict):
    epsilon: float | None = None
    delta: float | None = None


class ConfigModel(_Strict):
    """Top level of the config file; see docs/config-schema.md."""

    records: list[RecordModel] | None = None
    sensitivity: float | None = None
    dependency_bound: int = 1
    gamma: float = 0.0
    compromised: list[int] | None = None
    total_variance: float | None = None
    remaining_total_variance: float | None = None
    dependency_blocks: list[BlockModel] = []
    target: TargetModel | None = None


@dataclass(frozen=True)
class ConfigBundle:
    """Everything a config file describes.

    ``spec`` is None when the file makes no distributional assumptions.
    """

    spec: DataVectorSpec | None
    adversary: AdversaryModel
    sensitivity: float | None
    remaining_total_variance: float | None = None
    target_epsilon: float | None = None
    target_delta: float | None = None


def _path(loc: tuple[Any, ...]) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def parse_config_text(text: str, source: str = "<config>") -> ConfigModel:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigParseError(f"{source}: not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigParseError(f"{source}: top level must be a mapping")
    try:
        return ConfigModel.model_validate(raw)
    except ValidationError as exc:
        problems = "; ".join(f"{_path(e['loc'])}: {e['msg']}" for e in exc.errors())
        raise ConfigSchemaError(f"{source}: {problems}") from exc


def _read_column(path: Path, column: str | int) -> np.ndarray:
    try:
        if isinstance(column, int):
            data = np.genfromtxt(path, delimiter=",", skip_header=1, usecols=column)
        else:
            table = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
            data = table[column]
    except (OSError, ValueError) as exc:
        raise ConfigParseError(f"{path}: cannot read column {column!r}: {exc}") from exc
    return np.atleast_1d(data)


def _build_record(model: RecordModel, base_dir: Path) -> DistributionSpec:
    if isinstance(model, BernoulliRecord):
        return DistributionSpec.bernoulli(model.p, model.count, model.name)
    if isinstance(model, DiscreteRecord):
        return DistributionSpec.discrete(model.support, model.count, model.name)
    if isinstance(model, MomentsRecord):
        return DistributionSpec.moments_only(
            model.mean,
            model.variance,
            model.abs_third,
            model.fourth,
            model.support_bounds,
            model.count,
            model.name,
        )
    if model.values is not None:
        values = model.values
    else:
        values = _read_column(base_dir / model.path, model.column)
    logger.warning("record %r uses an empirical fit; its bounds are not rigorous", model.name)
    return DistributionSpec.from_values(values, model.count, model.name)


def build_bundle(config: ConfigModel, base_dir: Path = Path(".")) -> ConfigBundle:
    """Turn a schema-valid config into domain objects, naming the failing field."""
    spec = None
    if config.records:
        records = []
        for position, model in enumerate(config.records):
            where = f"records[{position}]" + (f" ({model.name!r})" if model.name else "")
            try:
                records.append(_build_record(model, base_dir))
            except InvariantError as exc:
                raise InvariantError(str(exc), field=where) from exc
        blocks = []
        for position, block in enumerate(config.dependency_blocks):
            try:
                blocks.append(
                    DependencyBlock(
                        tuple(block.indices),
                        tuple((tuple(o.values), o.prob) for o in block.outcomes),
                    )
                )
            except InvariantError as exc:
                raise InvariantError(str(exc), field=f"dependency_blocks[{position}]") from exc
        spec = DataVectorSpec(
            records=tuple(records),
            sensitivity=config.sensitivity,
            dependency_bound=config.dependency_bound,
            total_variance=config.total_variance,
            dependency_blocks=tuple(blocks),
        )
    elif config.dependency_blocks:
        raise InvariantError("dependency blocks need records", field="dependency_blocks")

    adversary = AdversaryModel(
        dependency_bound=config.dependency_bound,
        gamma=config.gamma,
        compromised=frozenset(config.compromised) if config.compromised is not None else None,
    )
    if spec is not None:
        adversary.check_against(spec)
    elif config.sensitivity is None or config.sensitivity <= 0:
        raise InvariantError(
            "a positive sensitivity is required without records", field="sensitivity"
        )
    target = config.target or TargetModel()
    return ConfigBundle(
        spec=spec,
        adversary=adversary,
        sensitivity=spec.sensitivity if spec is not None else config.sensitivity,
        remaining_total_variance=config.remaining_total_variance,
        target_epsilon=target.epsilon,
        target_delta=target.delta,
    )


def load_bundle(path: str | Path) -> ConfigBundle:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"{path}: cannot read config: {exc.strerror}") from exc
    bundle = build_bundle(parse_config_text(text, str(path)), path.parent)
    logger.info("loaded %s", path)
    return bundle


def ingest_config(path: str | Path) -> tuple[DataVectorSpec | None, AdversaryModel]:
    """Validated (data vector, adversary) from a config file.

    Raises ConfigParseError (exit 2), ConfigSchemaError (exit 3) or
    InvariantError (exit 4) with the offending field path.
    """
    bundle = load_bundle(path)
    return bundle.spec, bundle.adversary
