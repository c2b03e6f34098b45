"""Config-driven experiment runner.

Wires corpus, classifier, attack and distance adapters into the full
estimation protocol: attack every test sample for each (seed, rho_max)
pair, turn traces into per-sample robustness records, aggregate into
rho-bucketed reports, and average across seeds. All intermediate records
are persisted so reports and plots can be regenerated bit-for-bit.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .attack import (
    ATTACK_KINDS,
    AttackConfig,
    AttackTrace,
    SynonymTable,
    attack,
    baseline_synonym_attack,
    load_synonym_table,
)
from .attribution import canonical_method, compute_attribution
from .distances import (
    DistanceConfig,
    INPUT_DISTANCE_KEYS,
    attribution_distance,
    grammar_error_increase,
    is_constant,
    pearson,
    perplexity_increase,
    semantic_distance,
)
from .estimator import (
    DEFAULT_RHO_EDGES,
    FLAG_ATTACK_ABORTED,
    FLAG_CONSTANT_ATTRIBUTION,
    FLAG_DS_FLOORED,
    BucketAggregate,
    RobustnessReport,
    SampleRobustness,
    aggregate,
    bucket_index,
    load_samples,
    sample_k,
    save_samples,
)
from .models import (
    TrainConfig,
    build_grammar_checker,
    build_perplexity_model,
    build_proposal_model,
    build_sentence_encoder,
    load_classifier,
    train_reference_classifier,
)
from .models.classifier import ARCHITECTURES
from .text import (
    RawCorpus,
    SplitSpec,
    load_corpus,
    make_fixture_corpus,
    split,
    tokenize_aligned,
    truncate,
)

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "ResolutionError",
    "ExperimentResult",
    "TimingRecord",
    "run_experiment",
    "benchmark_variants",
    "rerender",
    "bundled_synonym_table",
    "PER_TOKEN_RHO_B",
]

# A rho_b this small always yields single-position batches (per-token masking).
PER_TOKEN_RHO_B = 1e-9

MLM_VARIANTS = ("full", "distilled", "distilled+batch")

_STS_KEY_TO_ENCODER = {"sts_use_like": "use_like", "sts_minilm_like": "minilm_like"}


class ConfigError(ValueError):
    """The experiment configuration itself is invalid."""


class ResolutionError(RuntimeError):
    """A referenced corpus, model or table could not be resolved."""


@dataclass
class ExperimentConfig:
    corpus: str = "fixture:400"  # JSONL path or fixture:<n>
    model: str = "cnn"  # architecture name or checkpoint directory
    attribution_method: str = "integrated_gradients"
    attack: str = "mlm"
    rho_max_values: tuple[float, ...] = (0.1, 0.25)
    rho_b: float | None = None  # None applies the min(rho_max, 0.15) rule
    candidates_per_token: int = 15
    distance_keys: tuple[str, ...] = INPUT_DISTANCE_KEYS
    seeds: tuple[int, ...] = (0, 1, 2)
    output_dir: str = "runs/experiment"
    mlm_variant: str = "distilled+batch"
    max_samples: int | None = 40
    ig_steps: int = 50
    eps_pp: float = 1e-6
    eps_ds: float = 1e-3
    split_seed: int = 0
    max_tokens: int = 64
    workers: int = 1
    synonym_table: str | None = None  # path; None uses the bundled table
    train_epochs: int = 40
    perplexity_model: str = "bigram"
    grammar_checker: str = "rules"

    def __post_init__(self) -> None:
        self.rho_max_values = tuple(self.rho_max_values)
        self.distance_keys = tuple(self.distance_keys)
        self.seeds = tuple(self.seeds)
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if not self.rho_max_values:
            raise ConfigError("need at least one rho_max value")
        for rho in self.rho_max_values:
            if not (0.0 < rho <= 1.0):
                raise ConfigError(f"rho_max {rho} outside (0, 1]")
        if self.attack not in ATTACK_KINDS:
            raise ConfigError(f"unknown attack {self.attack!r}; known: {ATTACK_KINDS}")
        if self.mlm_variant not in MLM_VARIANTS:
            raise ConfigError(
                f"unknown mlm variant {self.mlm_variant!r}; known: {MLM_VARIANTS}"
            )
        try:
            self.attribution_method = canonical_method(self.attribution_method)
        except Exception as exc:
            raise ConfigError(str(exc)) from exc
        unknown = set(self.distance_keys) - set(INPUT_DISTANCE_KEYS)
        if unknown:
            raise ConfigError(
                f"unknown distance keys {sorted(unknown)}; known: {INPUT_DISTANCE_KEYS}"
            )
        if self.max_samples is not None and self.max_samples < 1:
            raise ConfigError("max_samples must be positive when set")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be >= 1")
        from .models.registry import GRAMMAR_CHECKERS, PERPLEXITY_MODELS

        if self.perplexity_model not in PERPLEXITY_MODELS:
            raise ConfigError(
                f"unknown perplexity model {self.perplexity_model!r}; "
                f"known: {sorted(PERPLEXITY_MODELS)}"
            )
        if self.grammar_checker not in GRAMMAR_CHECKERS:
            raise ConfigError(
                f"unknown grammar checker {self.grammar_checker!r}; "
                f"known: {sorted(GRAMMAR_CHECKERS)}"
            )

    def to_json(self) -> dict:
        record = asdict(self)
        record["rho_max_values"] = list(self.rho_max_values)
        record["distance_keys"] = list(self.distance_keys)
        record["seeds"] = list(self.seeds)
        return record

    @classmethod
    def from_json(cls, record: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(record) - known
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        return cls(**record)


@dataclass
class TimingRecord:
    sample_id: str
    variant: int  # 0 baseline, 1 full, 2 distilled, 3 distilled+batch
    seconds: float
    mlm_queries: int

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    report: RobustnessReport
    per_seed: dict[int, RobustnessReport]
    output_dir: Path
    files: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# resolution
# ---------------------------------------------------------------------------


def bundled_synonym_table() -> SynonymTable:
    payload = resources.files("robattr.data").joinpath("synonyms.json").read_text()
    return SynonymTable(json.loads(payload))


def resolve_corpus(spec: str) -> RawCorpus:
    if spec == "fixture":
        with resources.as_file(
            resources.files("robattr.data").joinpath("fixture_corpus.jsonl")
        ) as path:
            return load_corpus(path, name="fixture")
    if spec.startswith("fixture:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad fixture corpus spec {spec!r}") from exc
        return make_fixture_corpus(n, seed=7)
    path = Path(spec)
    if not path.exists():
        raise ResolutionError(f"corpus not found: {spec}")
    return load_corpus(path).preprocessed()


def _resolve_model(spec: str, train_corpus: RawCorpus, val_corpus: RawCorpus, seed: int,
                   epochs: int):
    if spec in ARCHITECTURES:
        return train_reference_classifier(
            train_corpus,
            spec,
            TrainConfig(seed=seed, max_epochs=epochs),
            validation=val_corpus,
        )
    path = Path(spec)
    if not path.exists() or not (path / "manifest.json").exists():
        raise ResolutionError(f"model spec {spec!r} is neither an architecture "
                              f"({ARCHITECTURES}) nor a checkpoint directory")
    return load_classifier(path)


@dataclass
class Adapters:
    encoders: dict[str, object]
    perplexity: object
    grammar: object
    proposal: object | None
    synonyms: SynonymTable | None


def build_adapters(cfg: ExperimentConfig, train_corpus: RawCorpus) -> Adapters:
    encoders = {}
    for key in cfg.distance_keys:
        enc_name = _STS_KEY_TO_ENCODER.get(key)
        if enc_name:
            encoders[key] = build_sentence_encoder(enc_name, train_corpus, cfg.split_seed)
    perplexity = build_perplexity_model(cfg.perplexity_model, train_corpus, cfg.split_seed)
    grammar = build_grammar_checker(cfg.grammar_checker, train_corpus, cfg.split_seed)
    proposal = None
    synonyms = None
    if cfg.attack == "mlm":
        variant = "full" if cfg.mlm_variant == "full" else "distilled"
        proposal = build_proposal_model(variant, train_corpus, cfg.split_seed)
    else:
        if cfg.synonym_table is not None:
            if not Path(cfg.synonym_table).exists():
                raise ResolutionError(f"synonym table not found: {cfg.synonym_table}")
            synonyms = load_synonym_table(cfg.synonym_table)
        else:
            synonyms = bundled_synonym_table()
    return Adapters(encoders, perplexity, grammar, proposal, synonyms)


def _attack_config(cfg: ExperimentConfig, rho_max: float, seed: int) -> AttackConfig:
    if cfg.attack == "mlm" and cfg.mlm_variant in ("full", "distilled"):
        rho_b = PER_TOKEN_RHO_B  # per-token masking
    else:
        rho_b = cfg.rho_b
    return AttackConfig(
        rho_max=rho_max,
        rho_b=rho_b,
        candidates_per_token=cfg.candidates_per_token,
        attribution_method=cfg.attribution_method,
        ig_steps=cfg.ig_steps,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# per-sample evaluation
# ---------------------------------------------------------------------------


def evaluate_trace(
    trace: AttackTrace,
    model,
    adapters: Adapters,
    cfg: ExperimentConfig,
) -> SampleRobustness:
    """Turn one attack trace into a per-sample robustness record."""
    dcfg = DistanceConfig(eps_pp=cfg.eps_pp, eps_ds=cfg.eps_ds)
    a_orig = compute_attribution(
        cfg.attribution_method, model, trace.original, trace.label, steps=cfg.ig_steps
    )
    a_adv = compute_attribution(
        cfg.attribution_method, model, trace.adversarial, trace.label, steps=cfg.ig_steps
    )
    flags: set[str] = set()
    if trace.aborted:
        flags.add(FLAG_ATTACK_ABORTED)
    constant = is_constant(a_orig.scores) or is_constant(a_adv.scores)
    if constant or len(a_orig) < 2:
        flags.add(FLAG_CONSTANT_ATTRIBUTION)
        pcc = 0.0
    else:
        pcc = pearson(a_orig.scores, a_adv.scores)
    d_attr = attribution_distance(a_orig, a_adv)

    sts: dict[str, float] = {}
    k_by_distance: dict[str, float] = {}
    orig_text = trace.original.original_text
    adv_text = trace.adversarial.original_text
    for key in cfg.distance_keys:
        if key in adapters.encoders:
            d_s = semantic_distance(adapters.encoders[key], adv_text, orig_text)
            sts[key] = 1.0 - d_s
            k, floored = sample_k(d_attr, d_s, dcfg)
            k_by_distance[key] = k
            if floored:
                flags.add(FLAG_DS_FLOORED)
    delta_pp = perplexity_increase(adapters.perplexity, adv_text, orig_text, dcfg)
    if "pp" in cfg.distance_keys:
        k, floored = sample_k(d_attr, delta_pp, dcfg)
        k_by_distance["pp"] = k
        if floored:
            flags.add(FLAG_DS_FLOORED)
    ge = grammar_error_increase(adapters.grammar, adv_text, orig_text)
    return SampleRobustness(
        sample_id=trace.original.sample_id,
        rho=trace.rho,
        pcc=float(pcc),
        sts=sts,
        delta_pp=float(delta_pp),
        ge=ge,
        k_by_distance=k_by_distance,
        flags=flags,
    )


def _run_attack(model, adapters: Adapters, t, acfg: AttackConfig, kind: str) -> AttackTrace:
    if kind == "mlm":
        return attack(model, adapters.proposal, t, acfg)
    return baseline_synonym_attack(model, t, acfg, adapters.synonyms)


def _merge_best(records: list[SampleRobustness]) -> list[SampleRobustness]:
    """Keep, per (sample, rho bucket), the record from the strongest attack
    run (minimum correlation, i.e. maximum attribution distance)."""
    best: dict[tuple[str, int], SampleRobustness] = {}
    for rec in records:
        bucket = bucket_index(rec.rho, DEFAULT_RHO_EDGES)
        key = (rec.sample_id, len(DEFAULT_RHO_EDGES) - 2 if bucket is None else bucket)
        kept = best.get(key)
        if kept is None or (rec.pcc, rec.rho) < (kept.pcc, kept.rho):
            best[key] = rec
    return sorted(best.values(), key=lambda r: (r.sample_id, r.rho))


# ---------------------------------------------------------------------------
# the experiment loop
# ---------------------------------------------------------------------------


def _select_test_samples(test_corpus: RawCorpus, cfg: ExperimentConfig, seed: int):
    indices = np.arange(len(test_corpus))
    if cfg.max_samples is not None and cfg.max_samples < len(indices):
        rng = np.random.default_rng(seed)
        indices = np.sort(rng.choice(indices, size=cfg.max_samples, replace=False))
    out = []
    for i in indices:
        text, label = test_corpus.samples[int(i)]
        t = truncate(tokenize_aligned(text, sample_id=f"test-{int(i)}"), cfg.max_tokens)
        out.append((t, label))
    return out


def _experiment_slug(cfg: ExperimentConfig, corpus_name: str) -> str:
    model_name = cfg.model if cfg.model in ARCHITECTURES else Path(cfg.model).name
    return f"{corpus_name}_{model_name}_{cfg.attribution_method}_{cfg.attack}"


def _average_reports(reports: list[RobustnessReport]) -> RobustnessReport:
    """Field-wise average of per-seed reports; bucket means average over the
    seeds in which the bucket is populated, counts accumulate."""
    n_buckets = len(reports[0].buckets)
    buckets: list[BucketAggregate] = []
    for i in range(n_buckets):
        instances = [r.buckets[i] for r in reports if r.buckets[i].count > 0]
        template = reports[0].buckets[i]
        if not instances:
            buckets.append(BucketAggregate(template.lo, template.hi, 0, 0, None, {}))
            continue
        metric_names = sorted({m for b in instances for m in b.metrics})
        metrics = {}
        for name in metric_names:
            present = [b.metrics[name] for b in instances if name in b.metrics]
            metrics[name] = {
                "mean": float(np.mean([m["mean"] for m in present])),
                "std": float(np.mean([m["std"] for m in present])),
            }
        buckets.append(
            BucketAggregate(
                lo=template.lo,
                hi=template.hi,
                count=sum(b.count for b in instances),
                excluded=sum(b.excluded for b in instances),
                mean_rho=float(np.mean([b.mean_rho for b in instances])),
                metrics=metrics,
            )
        )
    auc_keys = sorted({k for r in reports for k in r.auc})
    auc = {}
    for key in auc_keys:
        values = [r.auc[key] for r in reports if key in r.auc]
        if values:
            auc[key] = float(np.mean(values))
    return RobustnessReport(
        buckets, auc, sum(r.sample_count for r in reports)
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    corpus = resolve_corpus(cfg.corpus)
    train_corpus, val_corpus, test_corpus = split(corpus, SplitSpec(seed=cfg.split_seed))
    adapters = build_adapters(cfg, train_corpus)
    if cfg.model not in ARCHITECTURES:
        # resolve once up front so a bad path fails before any work
        _resolve_model(cfg.model, train_corpus, val_corpus, 0, cfg.train_epochs)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    slug = _experiment_slug(cfg, corpus.name)
    files: list[str] = []

    per_seed_reports: dict[int, RobustnessReport] = {}
    for seed in cfg.seeds:
        model = _resolve_model(cfg.model, train_corpus, val_corpus, seed, cfg.train_epochs)
        samples = _select_test_samples(test_corpus, cfg, seed)
        records: list[SampleRobustness] = []
        for rho_max in cfg.rho_max_values:
            acfg = _attack_config(cfg, rho_max, seed)

            def attack_one(item):
                t, _ = item
                trace = _run_attack(model, adapters, t, acfg, cfg.attack)
                return trace, evaluate_trace(trace, model, adapters, cfg)

            if cfg.workers > 1:
                with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                    results = list(pool.map(attack_one, samples))
            else:
                results = [attack_one(item) for item in samples]

            trace_path = out_dir / f"{slug}_seed{seed}_rho{rho_max}_traces.jsonl"
            with trace_path.open("w", encoding="utf-8") as fh:
                for trace, _ in results:
                    fh.write(json.dumps(trace.to_json(), sort_keys=True) + "\n")
            files.append(trace_path.name)
            records.extend(rec for _, rec in results)
        merged = _merge_best(records)
        samples_path = out_dir / f"{slug}_seed{seed}_samples.jsonl"
        save_samples(merged, samples_path)
        files.append(samples_path.name)
        per_seed_reports[seed] = aggregate(merged)

    report = _average_reports([per_seed_reports[s] for s in cfg.seeds])
    files += _write_report_artifacts(out_dir, slug, cfg, report, per_seed_reports)
    return ExperimentResult(cfg, report, per_seed_reports, out_dir, files)


def _write_report_artifacts(
    out_dir: Path,
    slug: str,
    cfg: ExperimentConfig,
    report: RobustnessReport,
    per_seed: dict[int, RobustnessReport],
) -> list[str]:
    files = []
    manifest = {
        "version": __version__,
        "slug": slug,
        "config": cfg.to_json(),
        "rho_bucket_edges": list(DEFAULT_RHO_EDGES),
    }
    manifest_path = out_dir / f"{slug}_manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    files.append(manifest_path.name)

    payload = {
        "averaged": report.to_json(),
        "per_seed": {str(s): r.to_json() for s, r in sorted(per_seed.items())},
    }
    report_path = out_dir / f"{slug}_report.json"
    report_path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    files.append(report_path.name)

    csv_path = out_dir / f"{slug}_report.csv"
    csv_path.write_text(_report_csv(report))
    files.append(csv_path.name)

    plot_path = out_dir / f"{slug}_curves.png"
    _plot_report(report, plot_path)
    files.append(plot_path.name)
    return files


def _report_csv(report: RobustnessReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bucket_lo", "bucket_hi", "metric", "mean", "std", "count"])
    for bucket in report.buckets:
        for metric in sorted(bucket.metrics):
            stats = bucket.metrics[metric]
            writer.writerow(
                [
                    repr(bucket.lo),
                    repr(bucket.hi),
                    metric,
                    repr(stats["mean"]),
                    repr(stats["std"]),
                    bucket.count,
                ]
            )
    return buf.getvalue()


def _plot_report(report: RobustnessReport, path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    populated = [b for b in report.buckets if b.count > 0 and b.mean_rho is not None]
    panels = [
        ("pcc", "mean PCC"),
        ("k", "robustness constant k"),
        ("sts", "semantic similarity"),
        ("delta_pp", "relative perplexity increase"),
    ]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6))
    for ax, (kind, title) in zip(axes.flat, panels):
        if kind in ("pcc", "delta_pp"):
            names = [kind] if any(kind in b.metrics for b in populated) else []
        elif kind == "k":
            names = sorted(
                {m for b in populated for m in b.metrics if m.startswith("k_")}
            )
        else:
            names = sorted(
                {m for b in populated for m in b.metrics if m.startswith("sts_")}
            )
        for name in names:
            points = [
                (b.mean_rho, b.metrics[name]["mean"], b.metrics[name]["std"])
                for b in populated
                if name in b.metrics
            ]
            if not points:
                continue
            xs, means, stds = zip(*sorted(points))
            ax.errorbar(xs, means, yerr=stds, marker="o", capsize=2, label=name)
        ax.set_title(title)
        ax.set_xlabel("perturbed-token ratio")
        if names:
            ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata={"Software": "robattr"})
    plt.close(fig)


def rerender(output_dir: str | Path) -> list[ExperimentResult]:
    """Rebuild report JSON/CSV/plots from persisted per-sample records.

    Pure regeneration: with unchanged inputs the rewritten artifacts are
    byte-identical to the originals.
    """
    out_dir = Path(output_dir)
    manifests = sorted(out_dir.glob("*_manifest.json"))
    if not manifests:
        raise ResolutionError(f"no experiment manifests under {out_dir}")
    results = []
    for manifest_path in manifests:
        manifest = json.loads(manifest_path.read_text())
        cfg = ExperimentConfig.from_json(manifest["config"])
        slug = manifest["slug"]
        per_seed: dict[int, RobustnessReport] = {}
        for seed in cfg.seeds:
            samples_path = out_dir / f"{slug}_seed{seed}_samples.jsonl"
            if not samples_path.exists():
                raise ResolutionError(f"missing sample records: {samples_path}")
            per_seed[seed] = aggregate(load_samples(samples_path))
        report = _average_reports([per_seed[s] for s in cfg.seeds])
        files = _write_report_artifacts(out_dir, slug, cfg, report, per_seed)
        results.append(ExperimentResult(cfg, report, per_seed, out_dir, files))
    return results


# ---------------------------------------------------------------------------
# training entry point
# ---------------------------------------------------------------------------


def train_and_save(
    corpus_spec: str,
    arch: str,
    output_dir: str | Path,
    seed: int = 0,
    epochs: int = 40,
    split_seed: int = 0,
) -> dict:
    """Train a reference classifier on the corpus train split and persist a
    checkpoint; returns the manifest."""
    if arch not in ARCHITECTURES:
        raise ConfigError(f"unknown architecture {arch!r}; known: {ARCHITECTURES}")
    corpus = resolve_corpus(corpus_spec)
    train_corpus, val_corpus, _ = split(corpus, SplitSpec(seed=split_seed))
    from .models import save_classifier

    model = train_reference_classifier(
        train_corpus, arch, TrainConfig(seed=seed, max_epochs=epochs), validation=val_corpus
    )
    directory = save_classifier(model, output_dir)
    return json.loads((directory / "manifest.json").read_text())


# ---------------------------------------------------------------------------
# single-sample attack (interactive path)
# ---------------------------------------------------------------------------


def attack_sample(cfg: ExperimentConfig, text: str) -> dict:
    """Attack one raw text sample and return the trace, its robustness
    record and rendered diffs. Uses the first configured seed and rho_max."""
    from .render import render_diff
    from .text import preprocess

    clean = preprocess(text)
    if not clean:
        raise ConfigError("sample text is empty after normalization")
    corpus = resolve_corpus(cfg.corpus)
    train_corpus, val_corpus, _ = split(corpus, SplitSpec(seed=cfg.split_seed))
    adapters = build_adapters(cfg, train_corpus)
    seed = cfg.seeds[0]
    model = _resolve_model(cfg.model, train_corpus, val_corpus, seed, cfg.train_epochs)
    t = truncate(tokenize_aligned(clean, sample_id="adhoc"), cfg.max_tokens)
    acfg = _attack_config(cfg, cfg.rho_max_values[0], seed)
    trace = _run_attack(model, adapters, t, acfg, cfg.attack)
    record = evaluate_trace(trace, model, adapters, cfg)
    a_orig = compute_attribution(
        cfg.attribution_method, model, trace.original, trace.label, steps=cfg.ig_steps
    )
    a_adv = compute_attribution(
        cfg.attribution_method, model, trace.adversarial, trace.label, steps=cfg.ig_steps
    )
    primary_sts = next(iter(record.sts.values()), None)
    primary_k = next(iter(record.k_by_distance.values()), None)
    metrics = {
        "pcc": record.pcc,
        "confidence_original": float(
            model.predict_probs(model.embed(trace.original))[trace.label]
        ),
        "confidence_adversarial": float(
            model.predict_probs(model.embed(trace.adversarial))[trace.label]
        ),
    }
    if primary_sts is not None:
        metrics["sems"] = primary_sts
    if primary_k is not None:
        metrics["k"] = primary_k
    return {
        "trace": trace,
        "record": record,
        "metrics": metrics,
        "diff_text": render_diff(trace, a_orig, a_adv, metrics, fmt="text"),
        "diff_html": render_diff(trace, a_orig, a_adv, metrics, fmt="html"),
    }


# ---------------------------------------------------------------------------
# runtime ablation
# ---------------------------------------------------------------------------

VARIANT_LABELS = {
    0: "baseline-attack",
    1: "full-mlm",
    2: "distilled-mlm",
    3: "distilled-mlm+batch",
}


def benchmark_variants(
    cfg: ExperimentConfig, variants: tuple[int, ...] = (0, 1, 2, 3)
) -> tuple[list[TimingRecord], dict]:
    """Time the attack variants on one shared sample set, single worker.

    Variants: 0 synonym baseline, 1 full proposal model with per-token
    masking, 2 distilled with per-token masking, 3 distilled with batch
    masking.
    """
    corpus = resolve_corpus(cfg.corpus)
    train_corpus, val_corpus, test_corpus = split(corpus, SplitSpec(seed=cfg.split_seed))
    seed = cfg.seeds[0]
    model = _resolve_model(cfg.model, train_corpus, val_corpus, seed, cfg.train_epochs)
    samples = _select_test_samples(test_corpus, cfg, seed)
    rho_max = cfg.rho_max_values[0]

    full = build_proposal_model("full", train_corpus, cfg.split_seed)
    distilled = build_proposal_model("distilled", train_corpus, cfg.split_seed)
    table = (
        load_synonym_table(cfg.synonym_table)
        if cfg.synonym_table
        else bundled_synonym_table()
    )

    def runner(variant: int):
        if variant == 0:
            acfg = AttackConfig(
                rho_max=rho_max, rho_b=cfg.rho_b,
                candidates_per_token=cfg.candidates_per_token,
                attribution_method=cfg.attribution_method, ig_steps=cfg.ig_steps,
            )
            return lambda t: baseline_synonym_attack(model, t, acfg, table)
        per_token = variant in (1, 2)
        acfg = AttackConfig(
            rho_max=rho_max,
            rho_b=PER_TOKEN_RHO_B if per_token else cfg.rho_b,
            candidates_per_token=cfg.candidates_per_token,
            attribution_method=cfg.attribution_method,
            ig_steps=cfg.ig_steps,
        )
        proposal = full if variant == 1 else distilled
        return lambda t: attack(model, proposal, t, acfg)

    records: list[TimingRecord] = []
    for variant in variants:
        if variant not in VARIANT_LABELS:
            raise ConfigError(f"unknown timing variant {variant}")
        run = runner(variant)
        for t, _ in samples:
            start = time.perf_counter()
            trace = run(t)
            elapsed = time.perf_counter() - start
            records.append(
                TimingRecord(
                    sample_id=t.sample_id,
                    variant=variant,
                    seconds=max(elapsed, 1e-9),
                    mlm_queries=trace.mlm_queries,
                )
            )
    summary = {}
    for variant in variants:
        times = [r.seconds for r in records if r.variant == variant]
        queries = [r.mlm_queries for r in records if r.variant == variant]
        summary[variant] = {
            "label": VARIANT_LABELS[variant],
            "mean_seconds": float(np.mean(times)),
            "std_seconds": float(np.std(times)),
            "median_seconds": float(np.median(times)),
            "mean_queries": float(np.mean(queries)),
            "total_queries": int(np.sum(queries)),
        }
    return records, summary
