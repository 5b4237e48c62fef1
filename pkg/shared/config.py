"""Run configuration: dotted ``key = value`` files validated into typed sections."""

import hashlib
import logging
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from shared.errors import InvalidInputError
from shared.utils.config_validator import validate_override
from shared.utils.file_loader import load_config_file

logger = logging.getLogger(__name__)

# keys that never change numerical results and are left out of the config hash
HASH_EXCLUDED = frozenset({"threads"})


def parse_grid(raw: Any) -> list[float]:
    """``"1, 2, 5"``, ``"geom:1e-3:1e3:13"`` or ``"lin:0:100:101"`` to a list of floats; ``""`` is empty."""
    if isinstance(raw, str):
        text = raw.strip()
        if not text:
            return []
        if text.startswith(("geom:", "lin:")):
            kind, lo, hi, n = text.split(":")
            count = int(n)
            if count < 1:
                raise ValueError(f"grid {text!r} needs at least one point")
            space = np.geomspace if kind == "geom" else np.linspace
            return [float(x) for x in space(float(lo), float(hi), count)]
        return [float(x) for x in text.split(",") if x.strip()]
    return [float(x) for x in raw]


def _sorted(values: list[float]) -> list[float]:
    if any(b <= a for a, b in zip(values, values[1:], strict=False)):
        raise ValueError("grid must be strictly increasing")
    return values


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelSection(_Section):
    m: float = Field(1.0, gt=0)
    beta: float = Field(1.0, gt=0)


class TransformSection(_Section):
    omegas: list[float] = Field(default_factory=lambda: parse_grid("geom:1e-3:1e3:13"))
    tol: float | None = Field(None, gt=0)

    parse_grids = field_validator("omegas", mode="before")(parse_grid)
    check_order = field_validator("omegas")(_sorted)


class SpectrumSection(TransformSection):
    pass


class ValidateSection(_Section):
    times: list[float] = Field(default_factory=lambda: parse_grid("geom:1e-2:1e6:33"))
    omegas: list[float] = Field(default_factory=lambda: parse_grid("geom:1e-3:1e3:13"))
    tol: float | None = Field(None, gt=0)

    parse_grids = field_validator("times", "omegas", mode="before")(parse_grid)
    check_order = field_validator("times", "omegas")(_sorted)


class MsdSection(_Section):
    times: list[float] = Field(default_factory=lambda: parse_grid("geom:1e-2:1e4:25"))
    tol: float | None = Field(None, gt=0)

    parse_grids = field_validator("times", mode="before")(parse_grid)
    check_order = field_validator("times")(_sorted)


class DeviationSection(_Section):
    slack: float | None = Field(None, ge=0)


class SimulateSection(_Section):
    times: list[float] = Field(default_factory=lambda: parse_grid("lin:0:100:101"))
    modes: int | None = Field(None, ge=4)
    omega_max: float | None = Field(None, gt=0)
    paths: int | None = Field(None, ge=1)
    bias_budget: float | None = Field(None, gt=0)
    seed: int | None = Field(None, ge=0, lt=2**64)

    parse_grids = field_validator("times", mode="before")(parse_grid)
    check_order = field_validator("times")(_sorted)


class TamsdSection(_Section):
    lags: list[float] = Field(default_factory=lambda: [1.0, 10.0, 50.0])

    parse_grids = field_validator("lags", mode="before")(parse_grid)
    check_order = field_validator("lags")(_sorted)


class OutputSection(_Section):
    dir: str = "results"


class RunConfig(_Section):
    kernel: dict[str, str]
    model: ModelSection = Field(default_factory=ModelSection)
    validate_: ValidateSection = Field(default_factory=ValidateSection, alias="validate")
    transform: TransformSection = Field(default_factory=TransformSection)
    spectrum: SpectrumSection = Field(default_factory=SpectrumSection)
    msd: MsdSection = Field(default_factory=MsdSection)
    deviation: DeviationSection = Field(default_factory=DeviationSection)
    simulate: SimulateSection = Field(default_factory=SimulateSection)
    tamsd: TamsdSection = Field(default_factory=TamsdSection)
    output: OutputSection = Field(default_factory=OutputSection)
    threads: int | None = Field(None, ge=0)
    sha256: str = ""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @model_validator(mode="after")
    def _kernel_family(self) -> "RunConfig":
        if "family" not in self.kernel:
            raise ValueError("kernel.family is required")
        return self

    def require_seed(self) -> int:
        if self.simulate.seed is None:
            raise InvalidInputError("Simulation requires a seed: set simulate.seed or pass --seed")
        return self.simulate.seed


def config_hash(flat: Mapping[str, str]) -> str:
    """SHA-256 of the sorted ``key=value`` lines of a resolved config."""
    canonical = "\n".join(f"{k}={flat[k]}" for k in sorted(flat) if k not in HASH_EXCLUDED)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _nest(flat: Mapping[str, str]) -> dict[str, Any]:
    nested: dict[str, Any] = {}
    for key, value in flat.items():
        if "." not in key:
            nested[key] = value
            continue
        section, name = key.split(".", 1)
        bucket = nested.setdefault(section, {})
        if not isinstance(bucket, dict):
            raise InvalidInputError(f"Key {key!r} clashes with the top-level key {section!r}")
        bucket[name] = value
    return nested


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]).replace("validate_", "validate")
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def build_run_config(flat: Mapping[str, str]) -> RunConfig:
    try:
        config = RunConfig.model_validate(_nest(flat))
    except ValidationError as e:
        raise InvalidInputError(f"Invalid run config: {_describe(e)}") from e
    return config.model_copy(update={"sha256": config_hash(flat)})


def apply_overrides(flat: dict[str, str], overrides: Iterable[str]) -> dict[str, str]:
    resolved = dict(flat)
    for item in overrides:
        ok, message = validate_override(item)
        if not ok:
            raise InvalidInputError(message)
        key, value = item.split("=", 1)
        resolved[key.strip()] = value.strip()
        logger.debug("Override %s=%s", key.strip(), value.strip())
    return resolved


def load_run_config(
    path: str | Path,
    overrides: Iterable[str] = (),
    threads: int | None = None,
    seed: int | None = None,
) -> RunConfig:
    """Read ``path``, apply ``--set`` overrides then the ``--threads``/``--seed`` shorthands, and validate."""
    flat = apply_overrides(load_config_file(path), overrides)
    if threads is not None:
        flat["threads"] = str(threads)
    if seed is not None:
        flat["simulate.seed"] = str(seed)
    config = build_run_config(flat)
    table = config.kernel.get("table_path")
    if table and not Path(table).is_absolute():
        # kernel tables are found next to the config file
        kernel = {**config.kernel, "table_path": str(Path(path).parent / table)}
        config = config.model_copy(update={"kernel": kernel})
    logger.info("Loaded config %s (sha256 %s)", path, config.sha256[:12])
    return config
