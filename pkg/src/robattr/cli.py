"""Command-line client for the estimation service.

Every verb is a thin HTTP call: against a remote server when --server is
given, otherwise against an in-process instance of the app (no socket).
Exit codes: 0 success, 2 configuration error, 3 corpus/model resolution
error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from . import __version__

EXIT_CONFIG = 2
EXIT_RESOLUTION = 3


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _call(client: httpx.Client, method: str, path: str, payload: dict | None = None):
    response = client.request(method, path, json=payload)
    if response.status_code >= 400:
        try:
            body = response.json()
            detail = body.get("detail", response.text)
            kind = body.get("kind", "")
        except Exception:
            detail, kind = response.text, ""
        click.echo(f"error: {detail}", err=True)
        if kind == "resolution" or response.status_code == 404:
            sys.exit(EXIT_RESOLUTION)
        sys.exit(EXIT_CONFIG)
    return response.json()


def _config_payload(config_file: str | None, overrides: dict) -> dict:
    payload: dict = {}
    if config_file:
        path = Path(config_file)
        if not path.exists():
            click.echo(f"error: config file not found: {config_file}", err=True)
            sys.exit(EXIT_RESOLUTION)
        try:
            payload = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            click.echo(f"error: invalid config JSON: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
    payload.update({k: v for k, v in overrides.items() if v is not None})
    return payload


_CONFIG_OPTIONS = [
    click.option("--corpus", default=None, help="JSONL corpus path or fixture:<n>."),
    click.option("--model", default=None, help="Architecture name or checkpoint dir."),
    click.option(
        "--attribution-method",
        default=None,
        type=click.Choice(["saliency", "integrated_gradients", "attention"]),
    ),
    click.option("--attack", default=None, type=click.Choice(["mlm", "synonym"])),
    click.option(
        "--rho-max",
        "rho_max_values",
        multiple=True,
        type=float,
        help="Perturbation budget; repeat for a sweep.",
    ),
    click.option("--rho-b", default=None, type=float, help="Batch masking ratio."),
    click.option("--candidates-per-token", default=None, type=int),
    click.option(
        "--distance-key",
        "distance_keys",
        multiple=True,
        help="Input distance keys to evaluate.",
    ),
    click.option("--seed", "seeds", multiple=True, type=int),
    click.option("--output-dir", default=None),
    click.option(
        "--mlm-variant",
        default=None,
        type=click.Choice(["full", "distilled", "distilled+batch"]),
    ),
    click.option("--max-samples", default=None, type=int),
    click.option("--ig-steps", default=None, type=int),
    click.option("--eps-pp", default=None, type=float),
    click.option("--eps-ds", default=None, type=float),
    click.option("--split-seed", default=None, type=int),
    click.option("--max-tokens", default=None, type=int),
    click.option("--workers", default=None, type=int),
    click.option("--synonym-table", default=None),
    click.option("--train-epochs", default=None, type=int),
    click.option("--perplexity-model", default=None, help="Registry name."),
    click.option("--grammar-checker", default=None, help="Registry name."),
]


def _with_config_options(fn):
    for option in reversed(_CONFIG_OPTIONS):
        fn = option(fn)
    return fn


def _collect_config(kwargs: dict) -> dict:
    overrides = {}
    for key in (
        "corpus",
        "model",
        "attribution_method",
        "attack",
        "rho_b",
        "candidates_per_token",
        "output_dir",
        "mlm_variant",
        "max_samples",
        "ig_steps",
        "eps_pp",
        "eps_ds",
        "split_seed",
        "max_tokens",
        "workers",
        "synonym_table",
        "train_epochs",
        "perplexity_model",
        "grammar_checker",
    ):
        overrides[key] = kwargs.pop(key)
    for key, target in (
        ("rho_max_values", "rho_max_values"),
        ("distance_keys", "distance_keys"),
        ("seeds", "seeds"),
    ):
        values = kwargs.pop(key)
        overrides[target] = list(values) if values else None
    return overrides


@click.group()
@click.version_option(__version__)
@click.option(
    "--server",
    default=None,
    envvar="ROBATTR_SERVER",
    help="Base URL of a running service; defaults to an in-process instance.",
)
@click.pass_context
def main(ctx, server):
    """Estimate attribution robustness of text classifiers."""
    ctx.obj = {"server": server}


@main.command()
@click.option("--corpus", default="fixture:400", show_default=True)
@click.option(
    "--arch",
    default="cnn",
    type=click.Choice(["cnn", "attention"]),
    show_default=True,
)
@click.option("--output-dir", required=True, help="Checkpoint directory to create.")
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--epochs", default=40, type=int, show_default=True)
@click.option("--split-seed", default=0, type=int, show_default=True)
@click.pass_context
def train(ctx, corpus, arch, output_dir, seed, epochs, split_seed):
    """Train a reference classifier and save a checkpoint."""
    with _client(ctx.obj["server"]) as client:
        body = _call(
            client,
            "POST",
            "/train",
            {
                "corpus": corpus,
                "arch": arch,
                "output_dir": output_dir,
                "seed": seed,
                "epochs": epochs,
                "split_seed": split_seed,
            },
        )
    manifest = body["manifest"]
    click.echo(
        f"trained {manifest['architecture']} "
        f"(validation accuracy {manifest['accuracy']:.3f}) -> {body['checkpoint_dir']}"
    )


@main.command()
@click.option("--text", required=True, help="Raw sample text to attack.")
@click.option("--config", "config_file", default=None, help="Experiment config JSON.")
@click.option("--html-out", default=None, help="Write the HTML diff here.")
@_with_config_options
@click.pass_context
def attack(ctx, text, config_file, html_out, **kwargs):
    """Attack a single sample and print the attribution diff."""
    payload = _config_payload(config_file, _collect_config(kwargs))
    with _client(ctx.obj["server"]) as client:
        body = _call(client, "POST", "/attack", {"text": text, "config": payload})
    click.echo(body["diff_text"])
    if html_out:
        Path(html_out).write_text(body["diff_html"], encoding="utf-8")
        click.echo(f"wrote {html_out}")


@main.command()
@click.option("--config", "config_file", default=None, help="Experiment config JSON.")
@_with_config_options
@click.pass_context
def estimate(ctx, config_file, **kwargs):
    """Run a full robustness estimation experiment."""
    payload = _config_payload(config_file, _collect_config(kwargs))
    with _client(ctx.obj["server"]) as client:
        body = _call(client, "POST", "/estimate", {"config": payload})
    report = body["report"]
    click.echo(f"artifacts: {body['output_dir']}")
    for name in body["files"]:
        click.echo(f"  {name}")
    click.echo(f"samples: {report['sample_count']}")
    for key, value in sorted(report["auc"].items()):
        click.echo(f"auc k[{key}]: {value:.4f}")
    for bucket in report["buckets"]:
        if bucket["count"] == 0:
            continue
        pcc = bucket["metrics"].get("pcc", {}).get("mean")
        pcc_text = f"{pcc:.3f}" if pcc is not None else "n/a"
        click.echo(
            f"rho ({bucket['lo']:.2f}, {bucket['hi']:.2f}]: "
            f"n={bucket['count']} mean_pcc={pcc_text}"
        )


@main.command()
@click.option("--config", "config_file", default=None, help="Experiment config JSON.")
@click.option(
    "--variant",
    "variants",
    multiple=True,
    type=int,
    help="Variants to time (default 0 1 2 3).",
)
@_with_config_options
@click.pass_context
def bench(ctx, config_file, variants, **kwargs):
    """Time the attack variants on a shared sample set."""
    payload = _config_payload(config_file, _collect_config(kwargs))
    request = {"config": payload}
    if variants:
        request["variants"] = list(variants)
    with _client(ctx.obj["server"]) as client:
        body = _call(client, "POST", "/bench", request)
    click.echo(
        f"{'variant':<22} {'median s':>10} {'mean s':>10} {'std s':>10} {'queries':>8}"
    )
    for variant, stats in sorted(body["summary"].items(), key=lambda kv: int(kv[0])):
        click.echo(
            f"({variant}) {stats['label']:<18} {stats['median_seconds']:>10.4f} "
            f"{stats['mean_seconds']:>10.4f} {stats['std_seconds']:>10.4f} "
            f"{stats['mean_queries']:>8.2f}"
        )


@main.command()
@click.option("--output-dir", required=True, help="Experiment artifact directory.")
@click.pass_context
def report(ctx, output_dir):
    """Re-render report artifacts from persisted per-sample records."""
    with _client(ctx.obj["server"]) as client:
        body = _call(client, "POST", "/report", {"output_dir": output_dir})
    click.echo(f"re-rendered {len(body['reports'])} report(s)")
    for name in body["files"]:
        click.echo(f"  {name}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
