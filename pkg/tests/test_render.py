import numpy as np
import pytest

from robattr.attack import AttackConfig, AttackTrace, attack
from robattr.attribution import AttributionMap, compute_attribution
from robattr.render import RenderError, render_diff
from robattr.text import tokenize_aligned


def _identity_trace(text="a wonderful movie tonight ."):
    t = tokenize_aligned(text, sample_id="r0")
    return AttackTrace(
        original=t,
        adversarial=t,
        substitutions=[],
        label=1,
        rho=0.0,
        d_max=0.0,
        prediction_preserved=True,
        mlm_queries=0,
    )


def _map_for(trace_side, scores):
    return AttributionMap(np.asarray(scores, float), "saliency", 1, "r0")


class TestRenderDiff:
    def test_zero_substitution_identical_columns(self):
        trace = _identity_trace()
        scores = [0.1, 0.5, -0.2, 0.3, 0.0]
        text = render_diff(trace, _map_for(trace, scores), _map_for(trace, scores))
        assert "PCC: 1.00" in text
        lines = text.splitlines()
        original = next(l for l in lines if l.startswith("original"))
        perturbed = next(l for l in lines if l.startswith("perturbed"))
        assert original.split(":", 1)[1] == perturbed.split(":", 1)[1]

    def test_reported_header_numbers(self):
        trace = _identity_trace()
        scores = [0.1, 0.5, -0.2, 0.3, 0.0]
        metrics = {"pcc": 0.02, "sems": 0.97, "k": 14.9}
        text = render_diff(
            trace, _map_for(trace, scores), _map_for(trace, scores), metrics
        )
        assert "PCC: 0.02" in text
        assert "SemS: 0.97" in text
        assert "k: 14.9" in text

    def test_negative_token_gets_cool_style(self):
        trace = _identity_trace()
        scores = [0.1, 0.5, -0.9, 0.3, 0.0]
        html = render_diff(
            trace, _map_for(trace, scores), _map_for(trace, scores), fmt="html"
        )
        assert "rgba(30, 80, 180" in html  # against-class tint
        assert "rgba(190, 40, 30" in html  # toward-class tint

    def test_substituted_tokens_marked(self, cnn, distilled_mlm, test_corpus):
        t = tokenize_aligned(test_corpus.texts[0], sample_id="r1")
        cfg = AttackConfig(rho_max=0.3, attribution_method="saliency")
        trace = attack(cnn, distilled_mlm, t, cfg)
        a_orig = compute_attribution("saliency", cnn, trace.original, trace.label)
        a_adv = compute_attribution("saliency", cnn, trace.adversarial, trace.label)
        text = render_diff(trace, a_orig, a_adv)
        html = render_diff(trace, a_orig, a_adv, fmt="html")
        for sub in trace.substitutions[-1:]:
            assert f"*{trace.adversarial.tokens[sub.position]}" in text
        if trace.substitutions:
            assert "text-decoration: underline" in html

    def test_misaligned_lengths_error(self):
        trace = _identity_trace()
        good = _map_for(trace, [0.1, 0.5, -0.2, 0.3, 0.0])
        bad = _map_for(trace, [0.1, 0.5])
        with pytest.raises(RenderError):
            render_diff(trace, good, bad)

    def test_unknown_format(self):
        trace = _identity_trace()
        amap = _map_for(trace, [0.1, 0.5, -0.2, 0.3, 0.0])
        with pytest.raises(RenderError):
            render_diff(trace, amap, amap, fmt="pdf")

    def test_aborted_note_shown(self):
        trace = _identity_trace()
        trace.aborted = True
        amap = _map_for(trace, [0.1, 0.5, -0.2, 0.3, 0.0])
        assert "aborted" in render_diff(trace, amap, amap)
