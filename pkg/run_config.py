"""
Run configuration for one CLI invocation.

Values come from an optional KEY=VALUE run file (read with python-dotenv)
and are overridden by command-line flags. Everything is validated before
any computation starts; all problems are reported together.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

import config
from errors import ValidationError
from profiles import ApproxProfile, make_profile

logger = logging.getLogger(__name__)

COMMANDS = ("sieve", "measure", "intersect", "count", "dimension", "criteria", "bounds", "verify")

# Run-file keys that hold list values, written comma-separated
LIST_FIELDS = ("checkpoints", "alpha_grid", "box_schedule", "formats")
PARAM_PREFIX = "PARAM_"


class RunConfig(BaseModel):
    """Every input of a run, as recorded in its manifest."""

    command: Literal["sieve", "measure", "intersect", "count", "dimension", "criteria", "bounds", "verify"]

    # Profile
    family: str = "constant"
    params: Dict[str, Any] = Field(default_factory=dict)
    reduced: bool = True

    # Sizes
    limit: Optional[int] = Field(None, ge=1)
    n: Optional[int] = Field(None, ge=1)
    m: Optional[int] = Field(None, ge=1)
    n_hi: Optional[int] = Field(None, ge=1)
    N: Optional[int] = Field(None, ge=1)
    N_max: Optional[int] = Field(None, ge=2)
    checkpoints: Optional[List[int]] = None
    alpha_grid: Optional[List[float]] = None
    box_schedule: Optional[List[int]] = None
    window: Literal["block", "cumulative"] = "block"
    box: bool = True
    table_rows: int = Field(1000, ge=0)

    # Numerics
    tol: float = Field(config.BC_SERIES_TOL, gt=0.0)
    mode: Literal["exact", "series", "closed"] = "exact"
    kind: Optional[str] = None
    a: Optional[float] = None
    b: Optional[float] = None
    h_exponent: Optional[float] = Field(None, gt=0.0, le=1.0)
    phi_weighted: bool = False
    criterion_params: Dict[str, float] = Field(default_factory=dict)

    # Sampling
    x: Optional[float] = None
    seed: int = Field(config.DEFAULT_SEED, ge=0)
    samples: int = Field(config.DEFAULT_SAMPLES, ge=1)
    beta: Optional[float] = Field(None, gt=0.0)

    # Output and runtime
    output_dir: Path = config.OUTPUT_DIR
    formats: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])
    workers: int = Field(config.WORKERS, ge=1)
    scale: Literal["quick", "full"] = "quick"
    budgets: Dict[str, int] = Field(default_factory=dict)

    @field_validator(*LIST_FIELDS, mode="before")
    @classmethod
    def _split_lists(cls, value):
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    @field_validator("checkpoints", "box_schedule")
    @classmethod
    def _ascending(cls, value):
        if value is not None:
            if not value:
                raise ValueError("must not be empty")
            if value[0] < 1 or any(b <= a for a, b in zip(value, value[1:])):
                raise ValueError("must be strictly ascending positive integers")
        return value

    @field_validator("budgets")
    @classmethod
    def _positive_budgets(cls, value):
        unknown = set(value) - set(config.BUDGET_KEYS)
        if unknown:
            raise ValueError(f"unknown budget keys {sorted(unknown)}")
        if any(v <= 0 for v in value.values()):
            raise ValueError("budgets must be positive")
        return value

    @model_validator(mode="after")
    def _command_requirements(self):
        problems = []
        if self.command == "sieve" and self.limit is None:
            problems.append("sieve needs 'limit'")
        if self.command == "measure" and self.n is None:
            problems.append("measure needs 'n'")
        if self.n_hi is not None and self.n is not None and self.n_hi < self.n:
            problems.append("n_hi must be >= n")
        if self.command == "intersect" and (self.n is None or self.m is None):
            problems.append("intersect needs 'n' and 'm'")
        if self.command == "count" and self.N is None:
            problems.append("count needs 'N'")
        if self.command == "dimension" and self.N_max is None:
            problems.append("dimension needs 'N_max'")
        if self.command == "criteria":
            if self.kind is None:
                problems.append("criteria needs 'kind'")
            if self.checkpoints is None and self.N_max is None:
                problems.append("criteria needs 'checkpoints' or 'N_max'")
            if self.kind == "log_bounded" and (self.a is None or self.b is None):
                problems.append("kind 'log_bounded' needs 'a' and 'b'")
            if self.kind == "hausdorff" and self.h_exponent is None:
                problems.append("kind 'hausdorff' needs 'h_exponent'")
        if self.x is not None and not 0.0 <= self.x < 1.0:
            problems.append("x must lie in [0, 1)")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def profile(self) -> ApproxProfile:
        """Profile described by family and params."""
        return make_profile(self.family, self.params)

    def to_json(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def sha256(self) -> str:
        """Digest of the canonical JSON form, recorded in manifests."""
        canonical = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def needs_profile(run_config: RunConfig) -> bool:
    """Whether the command evaluates a profile."""
    if run_config.command in ("sieve", "verify"):
        return False
    if run_config.command == "bounds":
        return run_config.N is not None
    return True


def load_run_file(path: Path) -> Dict[str, Any]:
    """Read a KEY=VALUE run file into RunConfig field values.

    Keys are case-insensitive field names, except that `N` and `n` are
    different fields; PARAM_<NAME> keys become profile
    parameters and budget keys (e.g. PAIR_SCAN_BUDGET) become run budgets.
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"Run file not found: {path}", {"path": str(path)})
    raw = dotenv_values(path)
    values: Dict[str, Any] = {}
    params: Dict[str, Any] = {}
    budgets: Dict[str, Any] = {}
    for key, value in raw.items():
        if value is None or value == "":
            continue
        upper = key.upper()
        if upper.startswith(PARAM_PREFIX):
            name = upper[len(PARAM_PREFIX):].lower()
            params[name] = [v.strip() for v in value.split(",")] if "," in value else value
        elif upper in config.BUDGET_KEYS:
            budgets[upper] = value
        elif key == "N":
            values["N"] = value
        elif upper == "N_MAX":
            values["N_max"] = value
        else:
            values[key.lower()] = value
    if params:
        values["params"] = params
    if budgets:
        values["budgets"] = budgets
    logger.debug(f"Loaded {len(raw)} keys from {path}")
    return values


def build_run_config(
    command: str,
    run_file: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """Merge run file and flag overrides, validate, and check the profile builds."""
    values: Dict[str, Any] = load_run_file(run_file) if run_file else {}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "params":
            values["params"] = {**values.get("params", {}), **value}
        elif key == "criterion_params":
            values["criterion_params"] = {**values.get("criterion_params", {}), **value}
        else:
            values[key] = value
    values["command"] = command

    try:
        run_config = RunConfig(**values)
    except PydanticValidationError as e:
        raise ValidationError.from_pydantic(e, "run configuration")

    if needs_profile(run_config):
        run_config.profile()
    return run_config
