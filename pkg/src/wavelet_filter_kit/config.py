from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, Field

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib


class VerificationConfig(BaseModel):
    points: int = Field(default=256, ge=1, description="circle samples per check")
    tolerance: float = 1e-9
    hermitian_tolerance: float = 1e-10
    max_retries: int = 8


class SamplingConfig(BaseModel):
    max_alpha: float = Field(default=0.999, gt=0.0, lt=1.0)


class SteinConfig(BaseModel):
    max_iterations: int = 64
    tolerance: float = 1e-12


class LoggingConfig(BaseModel):
    trace_path: str = "artifacts/traces.jsonl"


class WaveletKitConfig(BaseModel):
    seed: int = 42
    verification: VerificationConfig = Field(default_factory=VerificationConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    stein: SteinConfig = Field(default_factory=SteinConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @classmethod
    def load(cls, path: str | Path | None = None) -> WaveletKitConfig:
        if path is None:
            return cls()
        raw = tomllib.loads(Path(path).read_text(encoding="utf-8"))
        return cls.model_validate(raw)
