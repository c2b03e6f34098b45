"""Per-sample robustness constants and dataset-level aggregation.

The constant k for one attacked sample is the ratio of attribution distance
to input-perturbation distance (floored); dataset-level reports bucket the
per-sample values by achieved perturbation ratio and integrate the k curve.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .distances import DistanceConfig

__all__ = [
    "FLAG_CONSTANT_ATTRIBUTION",
    "FLAG_DS_FLOORED",
    "FLAG_ATTACK_ABORTED",
    "SampleRobustness",
    "BucketAggregate",
    "RobustnessReport",
    "sample_k",
    "aggregate",
    "bucket_index",
    "auc_k",
    "relative_auc_increase",
    "DEFAULT_RHO_EDGES",
]

FLAG_CONSTANT_ATTRIBUTION = "constant-attribution"
FLAG_DS_FLOORED = "ds-floored"
FLAG_ATTACK_ABORTED = "attack-aborted"

# Bucket edges over the achieved perturbed-token ratio. Buckets are
# right-closed, (lo, hi], except the first which also includes 0.
DEFAULT_RHO_EDGES = (0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4)


def sample_k(
    d_attr: float,
    d_s: float,
    cfg: DistanceConfig | None = None,
) -> tuple[float, bool]:
    """Robustness constant k = d_attr / max(d_s, eps) for one sample.

    Returns (k, floored): `floored` reports that the denominator guard was
    binding, which happens for vanishing or negative input distances.
    k is 0 whenever the attribution distance is 0.
    """
    cfg = cfg or DistanceConfig()
    if d_attr == 0.0:
        return 0.0, False
    floored = d_s < cfg.eps_ds
    return d_attr / max(d_s, cfg.eps_ds), floored


@dataclass
class SampleRobustness:
    sample_id: str
    rho: float
    pcc: float
    sts: dict[str, float]  # input-distance key -> similarity/ratio value
    delta_pp: float
    ge: int
    k_by_distance: dict[str, float]
    flags: set[str] = field(default_factory=set)

    def to_json(self) -> dict:
        record = asdict(self)
        record["flags"] = sorted(self.flags)
        return record

    @classmethod
    def from_json(cls, record: dict) -> "SampleRobustness":
        return cls(
            sample_id=record["sample_id"],
            rho=float(record["rho"]),
            pcc=float(record["pcc"]),
            sts={k: float(v) for k, v in record["sts"].items()},
            delta_pp=float(record["delta_pp"]),
            ge=int(record["ge"]),
            k_by_distance={k: float(v) for k, v in record["k_by_distance"].items()},
            flags=set(record.get("flags", [])),
        )


@dataclass
class BucketAggregate:
    lo: float
    hi: float
    count: int
    excluded: int
    mean_rho: float | None
    metrics: dict[str, dict[str, float]]  # metric -> {"mean":..., "std":...}

    def to_json(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "count": self.count,
            "excluded": self.excluded,
            "mean_rho": self.mean_rho,
            "metrics": self.metrics,
        }


@dataclass
class RobustnessReport:
    buckets: list[BucketAggregate]
    auc: dict[str, float]
    sample_count: int

    def to_json(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "auc": self.auc,
            "buckets": [b.to_json() for b in self.buckets],
        }

    @classmethod
    def from_json(cls, record: dict) -> "RobustnessReport":
        buckets = [
            BucketAggregate(
                lo=b["lo"],
                hi=b["hi"],
                count=b["count"],
                excluded=b["excluded"],
                mean_rho=b["mean_rho"],
                metrics=b["metrics"],
            )
            for b in record["buckets"]
        ]
        return cls(buckets, dict(record["auc"]), int(record["sample_count"]))


def _mean_std(values: list[float]) -> dict[str, float]:
    arr = np.asarray(values, dtype=np.float64)
    return {"mean": float(arr.mean()), "std": float(arr.std())}


def bucket_index(rho: float, edges: tuple[float, ...] = DEFAULT_RHO_EDGES) -> int | None:
    """Right-closed bucketing; the first bucket also takes rho == 0."""
    if rho < edges[0] or rho > edges[-1]:
        return None
    if rho <= edges[1]:
        return 0
    for i in range(1, len(edges) - 1):
        if edges[i] < rho <= edges[i + 1]:
            return i
    return None


def aggregate(
    samples: list[SampleRobustness],
    rho_edges: tuple[float, ...] = DEFAULT_RHO_EDGES,
) -> RobustnessReport:
    """Bucket per-sample records by achieved rho and compute per-bucket
    means and standard deviations.

    Samples flagged constant-attribution are excluded from the correlation
    and k means (their PCC carries no information) and counted separately.
    The result is a pure function of the input records: aggregating a
    permutation yields the identical report.
    """
    if not samples:
        raise ValueError("cannot aggregate an empty sample list")
    if len(rho_edges) < 2:
        raise ValueError("need at least two bucket edges")
    k_keys = sorted({key for s in samples for key in s.k_by_distance})
    sts_keys = sorted({key for s in samples for key in s.sts})
    buckets: list[BucketAggregate] = []
    for i in range(len(rho_edges) - 1):
        lo, hi = rho_edges[i], rho_edges[i + 1]
        members = sorted(
            (s for s in samples if bucket_index(s.rho, rho_edges) == i),
            key=lambda s: (s.sample_id, s.rho),
        )
        clean = [
            s for s in members if FLAG_CONSTANT_ATTRIBUTION not in s.flags
        ]
        excluded = len(members) - len(clean)
        if not members:
            buckets.append(BucketAggregate(lo, hi, 0, 0, None, {}))
            continue
        metrics: dict[str, dict[str, float]] = {}
        if clean:
            metrics["pcc"] = _mean_std([s.pcc for s in clean])
            for key in k_keys:
                present = [s.k_by_distance[key] for s in clean if key in s.k_by_distance]
                if present:
                    metrics[f"k_{key}"] = _mean_std(present)
        for key in sts_keys:
            present = [s.sts[key] for s in members if key in s.sts]
            if present:
                metrics[f"sts_{key}"] = _mean_std(present)
        metrics["delta_pp"] = _mean_std([s.delta_pp for s in members])
        metrics["ge"] = _mean_std([float(s.ge) for s in members])
        buckets.append(
            BucketAggregate(
                lo=lo,
                hi=hi,
                count=len(members),
                excluded=excluded,
                mean_rho=float(np.mean([s.rho for s in members])),
                metrics=metrics,
            )
        )
    auc: dict[str, float] = {}
    for key in k_keys:
        curve = [
            (b.mean_rho, b.metrics[f"k_{key}"]["mean"])
            for b in buckets
            if b.count > 0 and f"k_{key}" in b.metrics and b.mean_rho is not None
        ]
        curve.sort()
        deduped = [pt for i, pt in enumerate(curve) if i == 0 or pt[0] > curve[i - 1][0]]
        if len(deduped) >= 2:
            auc[key] = auc_k(deduped)
    return RobustnessReport(buckets, auc, len(samples))


def auc_k(curve: list[tuple[float, float]]) -> float:
    """Trapezoidal integral of a k-vs-rho curve over its observed range."""
    if len(curve) < 2:
        raise ValueError("need at least 2 curve points to integrate")
    rhos = [p[0] for p in curve]
    if any(b <= a for a, b in zip(rhos, rhos[1:])):
        raise ValueError("rho values must be strictly increasing")
    total = 0.0
    for (r0, k0), (r1, k1) in zip(curve, curve[1:]):
        total += 0.5 * (k0 + k1) * (r1 - r0)
    return total


def relative_auc_increase(auc_new: float, auc_baseline: float) -> float:
    """Relative change (auc_new - auc_baseline) / auc_baseline."""
    if auc_baseline <= 0.0:
        raise ValueError("baseline area must be positive")
    return (auc_new - auc_baseline) / auc_baseline


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def save_samples(samples: list[SampleRobustness], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.to_json(), sort_keys=True) + "\n")


def load_samples(path: str | Path) -> list[SampleRobustness]:
    path = Path(path)
    out = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(SampleRobustness.from_json(json.loads(line)))
    return out
