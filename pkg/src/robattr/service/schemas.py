"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..distances import INPUT_DISTANCE_KEYS


class HealthResponse(BaseModel):
    status: str
    version: str


class TrainRequest(BaseModel):
    corpus: str = "fixture:400"
    arch: str = "cnn"
    output_dir: str
    seed: int = 0
    epochs: int = 40
    split_seed: int = 0


class TrainResponse(BaseModel):
    checkpoint_dir: str
    manifest: dict


class ExperimentConfigModel(BaseModel):
    """Schema-validated mirror of the experiment configuration."""

    corpus: str = "fixture:400"
    model: str = "cnn"
    attribution_method: str = "integrated_gradients"
    attack: str = "mlm"
    rho_max_values: list[float] = Field(default=[0.1, 0.25])
    rho_b: float | None = None
    candidates_per_token: int = 15
    distance_keys: list[str] = Field(default=list(INPUT_DISTANCE_KEYS))
    seeds: list[int] = Field(default=[0, 1, 2])
    output_dir: str = "runs/experiment"
    mlm_variant: str = "distilled+batch"
    max_samples: int | None = 40
    ig_steps: int = 50
    eps_pp: float = 1e-6
    eps_ds: float = 1e-3
    split_seed: int = 0
    max_tokens: int = 64
    workers: int = 1
    synonym_table: str | None = None
    train_epochs: int = 40
    perplexity_model: str = "bigram"
    grammar_checker: str = "rules"


class SubstitutionModel(BaseModel):
    position: int
    old: str
    new: str
    d_after: float


class TraceModel(BaseModel):
    sample_id: str
    original_text: str
    adversarial_text: str
    label: int
    substitutions: list[SubstitutionModel]
    rho: float
    d_max: float
    prediction_preserved: bool
    mlm_queries: int
    aborted: bool


class AttackRequest(BaseModel):
    text: str
    config: ExperimentConfigModel = Field(default_factory=ExperimentConfigModel)


class AttackResponse(BaseModel):
    trace: TraceModel
    record: dict
    metrics: dict
    diff_text: str
    diff_html: str


class EstimateRequest(BaseModel):
    config: ExperimentConfigModel


class EstimateResponse(BaseModel):
    output_dir: str
    files: list[str]
    report: dict
    per_seed: dict[str, dict]


class BenchRequest(BaseModel):
    config: ExperimentConfigModel = Field(default_factory=ExperimentConfigModel)
    variants: list[int] = Field(default=[0, 1, 2, 3])


class BenchResponse(BaseModel):
    records: list[dict]
    summary: dict[str, dict]


class ReportRequest(BaseModel):
    output_dir: str


class ReportResponse(BaseModel):
    reports: list[dict]
    files: list[str]


class ErrorPayload(BaseModel):
    detail: str
    kind: str  # "config" or "resolution"
