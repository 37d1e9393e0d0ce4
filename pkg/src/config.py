from __future__ import annotations

from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .utils import getenv_int, log


DEFAULT_CONFIG_PATH = Path("config/lab.yaml")


class OptimizerConfig(BaseModel):
    """
    Optimizer block, shared by config/lab.yaml and the tensor JSON:
      {"restarts": int, "seed": int, "gtol": float, "samples": int | null, ...}
    restarts=None means 8 + 4n; samples=None skips the sampling oracle.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    restarts: Optional[int] = Field(default=None, ge=0)
    seed: int = 0
    gtol: float = Field(default=1e-10, gt=0)
    ftol: float = Field(default=1e-14, ge=0)
    max_iter: int = Field(default=10_000, ge=1)
    samples: Optional[int] = Field(default=None, ge=1)
    workers: int = Field(default=1, ge=1)

    def restarts_for(self, n: int) -> int:
        return self.restarts if self.restarts is not None else 8 + 4 * n


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    curvature_like: float = 1e-12
    symmetry_reject: float = 1e-9
    verdict: float = Field(default=1e-9, ge=0)
    equality: float = Field(default=1e-8, ge=0)
    r_guard: float = Field(default=1e-9, ge=0)


class ReportDefaults(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    variants: list[str] = Field(default_factory=lambda: ["delta_n_minus_1", "delta_hat_n_minus_1"])


class FuzzDefaults(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    samples: int = Field(default=10_000, ge=1)
    n_min: int = Field(default=2, ge=2)
    n_max: int = Field(default=6, le=16)
    q_min: int = Field(default=1, ge=1)
    q_max: int = Field(default=4, le=8)
    scale: float = Field(default=2.0, gt=0)
    seed: int = 0
    slack_floor: float = 1e-8


class LabConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    report: ReportDefaults = Field(default_factory=ReportDefaults)
    fuzz: FuzzDefaults = Field(default_factory=FuzzDefaults)


def _env_overrides(cfg: LabConfig) -> LabConfig:
    opt = cfg.optimizer
    updates = {
        "seed": getenv_int("CASORATI_SEED", opt.seed),
        "restarts": getenv_int("CASORATI_RESTARTS", opt.restarts),
        "samples": getenv_int("CASORATI_SAMPLES", opt.samples),
        "workers": getenv_int("CASORATI_WORKERS", opt.workers),
    }
    try:
        merged = OptimizerConfig(**{**opt.model_dump(), **updates})
    except ValidationError as e:
        log(f"[WARN] optimizer env overrides rejected -> keeping config values. err={e}")
        return cfg
    return cfg.model_copy(update={"optimizer": merged})


def load_config(path: Path | None = None) -> LabConfig:
    p = Path(path) if path is not None else DEFAULT_CONFIG_PATH
    if not p.exists():
        return _env_overrides(LabConfig())
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
        cfg = LabConfig.model_validate(raw)
    except (yaml.YAMLError, ValidationError) as e:
        log(f"[WARN] config {p} unreadable -> built-in defaults. err={e}")
        cfg = LabConfig()
    return _env_overrides(cfg)
