"""Estimate how robust text-classifier attribution maps are to small,
prediction-preserving word substitutions."""

__version__ = "0.1.0"

from .attack import (  # noqa: E402
    AttackConfig,
    AttackTrace,
    SynonymTable,
    attack,
    baseline_synonym_attack,
    importance_ranking,
    make_batches,
)
from .attribution import (  # noqa: E402
    AttributionMap,
    attention_attribution,
    compute_attribution,
    integrated_gradients,
    saliency,
)
from .distances import (  # noqa: E402
    DistanceConfig,
    attribution_distance,
    grammar_error_increase,
    perplexity_increase,
    semantic_distance,
)
from .estimator import (  # noqa: E402
    RobustnessReport,
    SampleRobustness,
    aggregate,
    auc_k,
    relative_auc_increase,
    sample_k,
)
from .experiment import (  # noqa: E402
    ExperimentConfig,
    benchmark_variants,
    run_experiment,
)
from .render import render_diff  # noqa: E402

__all__ = [
    "__version__",
    "AttackConfig",
    "AttackTrace",
    "SynonymTable",
    "attack",
    "baseline_synonym_attack",
    "importance_ranking",
    "make_batches",
    "AttributionMap",
    "attention_attribution",
    "compute_attribution",
    "integrated_gradients",
    "saliency",
    "DistanceConfig",
    "attribution_distance",
    "grammar_error_increase",
    "perplexity_increase",
    "semantic_distance",
    "RobustnessReport",
    "SampleRobustness",
    "aggregate",
    "auc_k",
    "relative_auc_increase",
    "sample_k",
    "ExperimentConfig",
    "benchmark_variants",
    "run_experiment",
    "render_diff",
]
