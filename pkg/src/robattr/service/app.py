"""HTTP service exposing the estimator pipeline.

Long-running verbs (train, estimate, bench) execute synchronously; clients
targeting a remote instance should raise their read timeouts accordingly.
Configuration problems map to 422 with kind "config", unresolvable
corpus/model references to 404 with kind "resolution".
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..experiment import (
    ConfigError,
    ExperimentConfig,
    ResolutionError,
    attack_sample,
    benchmark_variants,
    rerender,
    run_experiment,
    train_and_save,
)
from ..models import TrainingError, UnsupportedMethodError
from ..models.registry import RegistryError
from ..text import CorpusError
from . import schemas

__all__ = ["create_app"]

_CONFIG_ERRORS = (ConfigError, CorpusError, RegistryError, ValueError)
_RESOLUTION_ERRORS = (ResolutionError, FileNotFoundError)


def _experiment_config(model: schemas.ExperimentConfigModel) -> ExperimentConfig:
    payload = model.model_dump()
    payload["rho_max_values"] = tuple(payload["rho_max_values"])
    payload["distance_keys"] = tuple(payload["distance_keys"])
    payload["seeds"] = tuple(payload["seeds"])
    return ExperimentConfig(**payload)


def create_app() -> FastAPI:
    app = FastAPI(title="robattr", version=__version__)

    @app.exception_handler(ResolutionError)
    @app.exception_handler(FileNotFoundError)
    async def _resolution_handler(request: Request, exc: Exception):
        return JSONResponse(
            status_code=404, content={"detail": str(exc), "kind": "resolution"}
        )

    @app.exception_handler(ConfigError)
    @app.exception_handler(CorpusError)
    @app.exception_handler(RegistryError)
    @app.exception_handler(UnsupportedMethodError)
    @app.exception_handler(ValueError)
    async def _config_handler(request: Request, exc: Exception):
        return JSONResponse(
            status_code=422, content={"detail": str(exc), "kind": "config"}
        )

    @app.exception_handler(TrainingError)
    async def _training_handler(request: Request, exc: TrainingError):
        return JSONResponse(
            status_code=422,
            content={
                "detail": f"{exc} (accuracy reached: {exc.accuracy:.3f})",
                "kind": "config",
            },
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(request: schemas.TrainRequest):
        manifest = train_and_save(
            corpus_spec=request.corpus,
            arch=request.arch,
            output_dir=request.output_dir,
            seed=request.seed,
            epochs=request.epochs,
            split_seed=request.split_seed,
        )
        return schemas.TrainResponse(checkpoint_dir=request.output_dir, manifest=manifest)

    @app.post("/attack", response_model=schemas.AttackResponse)
    def attack_endpoint(request: schemas.AttackRequest):
        cfg = _experiment_config(request.config)
        result = attack_sample(cfg, request.text)
        payload = result["trace"].to_json()
        payload["substitutions"] = [
            {"position": p, "old": o, "new": n, "d_after": d}
            for p, o, n, d in payload["substitutions"]
        ]
        return schemas.AttackResponse(
            trace=schemas.TraceModel(**payload),
            record=result["record"].to_json(),
            metrics=result["metrics"],
            diff_text=result["diff_text"],
            diff_html=result["diff_html"],
        )

    @app.post("/estimate", response_model=schemas.EstimateResponse)
    def estimate(request: schemas.EstimateRequest):
        cfg = _experiment_config(request.config)
        result = run_experiment(cfg)
        return schemas.EstimateResponse(
            output_dir=str(result.output_dir),
            files=result.files,
            report=result.report.to_json(),
            per_seed={str(s): r.to_json() for s, r in result.per_seed.items()},
        )

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(request: schemas.BenchRequest):
        cfg = _experiment_config(request.config)
        records, summary = benchmark_variants(cfg, tuple(request.variants))
        return schemas.BenchResponse(
            records=[r.to_json() for r in records],
            summary={str(v): s for v, s in summary.items()},
        )

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(request: schemas.ReportRequest):
        results = rerender(request.output_dir)
        return schemas.ReportResponse(
            reports=[r.report.to_json() for r in results],
            files=[name for r in results for name in r.files],
        )

    return app
