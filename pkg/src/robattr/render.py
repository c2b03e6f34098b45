"""Render an attack trace as a side-by-side attribution diff.

Tokens are tinted by attribution sign and magnitude (warm = toward the
predicted class, cool = against it); substituted tokens are marked. The
header carries prediction confidence and the summary metrics.
"""

from __future__ import annotations

import html as html_mod

import numpy as np

from .attack import AttackTrace
from .attribution import AttributionMap
from .distances import pearson

__all__ = ["render_diff", "RenderError"]


class RenderError(ValueError):
    pass


def _intensity(score: float, max_abs: float) -> float:
    if max_abs <= 0:
        return 0.0
    return min(1.0, abs(score) / max_abs)


def _annotate_text(tokens, scores, marked) -> str:
    max_abs = float(np.max(np.abs(scores))) if len(scores) else 0.0
    out = []
    for i, (token, score) in enumerate(zip(tokens, scores)):
        if _intensity(score, max_abs) >= 0.25:
            token = f"{token}({score:+.2f})"
        if i in marked:
            token = f"*{token}*"
        out.append(token)
    return " ".join(out)


def _span_html(token: str, score: float, max_abs: float, marked: bool) -> str:
    weight = _intensity(score, max_abs)
    if score > 0:
        color = f"rgba(190, 40, 30, {0.15 + 0.85 * weight:.2f})"
    elif score < 0:
        color = f"rgba(30, 80, 180, {0.15 + 0.85 * weight:.2f})"
    else:
        color = "inherit"
    style = f"color: {color};"
    if weight >= 0.5:
        style += " font-weight: bold;"
    if marked:
        style += " text-decoration: underline;"
    return f'<span style="{style}">{html_mod.escape(token)}</span>'


def _header_fields(trace, a_orig, a_adv, metrics) -> list[tuple[str, str]]:
    metrics = dict(metrics or {})
    if "pcc" not in metrics:
        try:
            metrics["pcc"] = pearson(a_orig.scores, a_adv.scores)
        except (ValueError, ZeroDivisionError):
            metrics["pcc"] = float("nan")
    fields = []
    if "confidence_original" in metrics and "confidence_adversarial" in metrics:
        fields.append(
            (
                "confidence",
                f"{metrics['confidence_original']:.2f} -> "
                f"{metrics['confidence_adversarial']:.2f}",
            )
        )
    fields.append(("PCC", f"{metrics['pcc']:.2f}"))
    if "sems" in metrics:
        fields.append(("SemS", f"{metrics['sems']:.2f}"))
    if "k" in metrics:
        fields.append(("k", f"{metrics['k']:.1f}"))
    return fields


def render_diff(
    trace: AttackTrace,
    a_orig: AttributionMap,
    a_adv: AttributionMap,
    metrics: dict | None = None,
    fmt: str = "text",
) -> str:
    """Produce a text or HTML diff artifact for one attacked sample."""
    if fmt not in ("text", "html"):
        raise RenderError(f"unknown render format {fmt!r}")
    n_orig = len(trace.original.tokens)
    n_adv = len(trace.adversarial.tokens)
    if len(a_orig) != n_orig or len(a_adv) != n_adv:
        raise RenderError(
            f"attribution lengths ({len(a_orig)}, {len(a_adv)}) do not match "
            f"token counts ({n_orig}, {n_adv})"
        )
    marked = {s.position for s in trace.substitutions}
    header = _header_fields(trace, a_orig, a_adv, metrics)

    if fmt == "text":
        lines = [
            " | ".join(f"{k}: {v}" for k, v in header),
            f"label: {trace.label}  rho: {trace.rho:.3f}  queries: {trace.mlm_queries}",
            "original : "
            + _annotate_text(trace.original.tokens, a_orig.scores, set()),
            "perturbed: "
            + _annotate_text(trace.adversarial.tokens, a_adv.scores, marked),
        ]
        if trace.aborted:
            lines.append("note: attack aborted early; best trace so far shown")
        return "\n".join(lines)

    max_orig = float(np.max(np.abs(a_orig.scores))) if n_orig else 0.0
    max_adv = float(np.max(np.abs(a_adv.scores))) if n_adv else 0.0
    orig_spans = " ".join(
        _span_html(tok, s, max_orig, False)
        for tok, s in zip(trace.original.tokens, a_orig.scores)
    )
    adv_spans = " ".join(
        _span_html(tok, s, max_adv, i in marked)
        for i, (tok, s) in enumerate(zip(trace.adversarial.tokens, a_adv.scores))
    )
    header_html = " &middot; ".join(
        f"<b>{html_mod.escape(k)}</b>: {html_mod.escape(v)}" for k, v in header
    )
    return (
        "<!doctype html><html><head><meta charset='utf-8'>"
        "<style>body{font-family:sans-serif;max-width:60em;margin:2em auto;}"
        ".col{padding:0.6em;border:1px solid #ccc;margin:0.4em 0;}</style>"
        "</head><body>"
        f"<p>{header_html} &middot; label {trace.label} &middot; "
        f"rho {trace.rho:.3f}</p>"
        f"<div class='col'><h4>original</h4><p>{orig_spans}</p></div>"
        f"<div class='col'><h4>perturbed</h4><p>{adv_spans}</p></div>"
        "</body></html>"
    )
