"""Engine configuration: a single YAML file with env-var overrides for
secrets (FACIHUB_CONFIG names the file, FACIHUB_LLM_KEY the credential)."""

from __future__ import annotations

import os
from pathlib import Path

import yaml
from pydantic import BaseModel, Field, field_validator

CONFIG_ENV = "FACIHUB_CONFIG"


class LlmConfig(BaseModel):
    endpoint: str = "stub"  # "stub" selects the deterministic offline clients
    model_name: str = "stub-model"
    temperature: float = 0.6
    coder_temperature: float = 0.7
    timeout_seconds: float = 30.0
    parallelism: int = 4

    @field_validator("parallelism")
    @classmethod
    def _positive_parallelism(cls, v: int) -> int:
        if v < 1:
            raise ValueError("parallelism must be >= 1")
        return v


class TargetingConfig(BaseModel):
    window_hours: float = 48.0
    fraction: float = 0.05
    s: int = 1
    parity_mapping: str = "odd_with"
    pca_user_id: str = "pca"

    @field_validator("window_hours")
    @classmethod
    def _positive_window(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("window_hours must be > 0")
        return v

    @field_validator("fraction")
    @classmethod
    def _fraction_range(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError("fraction must be in (0, 1]")
        return v

    @field_validator("s")
    @classmethod
    def _positive_s(cls, v: int) -> int:
        if v < 1:
            raise ValueError("s must be >= 1")
        return v


class StatsConfig(BaseModel):
    permutation_n: int = 2000
    permutation_seed: int = 20251124
    alpha: float = 0.05

    @field_validator("permutation_n")
    @classmethod
    def _positive_n(cls, v: int) -> int:
        if v < 1:
            raise ValueError("permutation_n must be >= 1")
        return v

    @field_validator("alpha")
    @classmethod
    def _alpha_range(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("alpha must be in (0, 1)")
        return v


class StorageConfig(BaseModel):
    data_dir: str = "facihub-data"


class EngineConfig(BaseModel):
    llm: LlmConfig = Field(default_factory=LlmConfig)
    targeting: TargetingConfig = Field(default_factory=TargetingConfig)
    stats: StatsConfig = Field(default_factory=StatsConfig)
    storage: StorageConfig = Field(default_factory=StorageConfig)
    api_token: str | None = None
    role_profile: str = "guide_amplifier"  # or "full"


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Load config from `path`, the FACIHUB_CONFIG env var, or defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        return EngineConfig()
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    return EngineConfig.model_validate(raw)
