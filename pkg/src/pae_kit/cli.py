"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 numeric/degenerate error. All randomness sits behind explicit --seed
flags, so repeated runs with identical inputs produce byte-identical
outputs.
"""
from __future__ import annotations

import json
import logging
import os
import sys

import click
import numpy as np

from . import fixtures as fixtures_mod
from .analysis import (
    group_heatmap,
    pca2d,
    pca2d_to_csv,
    similarity_matrix,
    trajectory_similarity,
)
from .augmentation import AugKind
from .embeddings import load_bundle, normalize, save_bundle
from .errors import IoError, PaeKitError
from .optimizer import LossSpec, make_generator, optimize as run_optimize
from .pae import PaeConfig, alpha_sweep, compute_pae, sweep_rows_to_csv
from .subspace import (
    build_gs,
    build_pca,
    build_raw,
    build_sample_set,
    load_subspace,
    save_subspace,
)

log = logging.getLogger("pae_kit")

_AUG_ALIASES = {"simple": "simple", "plus": "plus", "ex": "exchange", "exd": "exchange_distinct"}


def _configure_logging() -> None:
    level = os.environ.get("PAE_KIT_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR))


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


@click.group()
def cli() -> None:
    """Projection-augmentation embedding toolkit."""
    _configure_logging()


@cli.group()
def fixtures() -> None:
    """Synthetic fixture bundles."""


@fixtures.command("make")
@click.option("--recipe", required=True, type=click.Choice(fixtures_mod.RECIPES))
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path())
def fixtures_make(recipe: str, seed: int, out: str) -> None:
    """Generate a deterministic synthetic bundle."""
    bundle = fixtures_mod.make_synthetic_fixture(recipe, seed)
    save_bundle(bundle, out)
    log.info("wrote %d items to %s", len(bundle), out)


@cli.group()
def subspace() -> None:
    """Corpus subspace construction."""


@subspace.command("build")
@click.option("--bundle", "bundle_path", required=True, type=click.Path())
@click.option("--method", required=True, type=click.Choice(["gs", "raw", "pca"]))
@click.option("--components", type=int, default=None, help="N for pca")
@click.option("--ids", default=None, help="comma-separated item ids (default: all text items)")
@click.option("--tag", default=None, help="only items carrying this tag")
@click.option("--out", required=True, type=click.Path())
def subspace_build(bundle_path, method, components, ids, tag, out) -> None:
    """Build a subspace from a bundle's text embeddings."""
    bundle = load_bundle(bundle_path)
    items = [i for i in bundle.items if i.kind == "text"]
    if tag is not None:
        items = [i for i in items if tag in i.tags]
    if ids is not None:
        wanted = ids.split(",")
        by_id = {i.id: i for i in items}
        missing = [w for w in wanted if w not in by_id]
        if missing:
            raise click.UsageError(f"ids not found among text items: {missing}")
        items = [by_id[w] for w in wanted]
    if method == "gs":
        s = build_gs(items)
    elif method == "raw":
        s = build_raw(items)
    else:
        if components is None:
            raise click.UsageError("--components is required for --method pca")
        s = build_pca(items, components)
    save_subspace(s, out)


@cli.group()
def pae() -> None:
    """Projection-augmentation operators."""


def _build_config(subspace_path, manifold_path, aug, alpha):
    kind = _AUG_ALIASES[aug]
    if kind in ("simple", "plus"):
        if subspace_path is None:
            raise click.UsageError(f"--subspace is required for --aug {aug}")
        s = load_subspace(subspace_path)
        projection = {"gram_schmidt": "gs", "raw": "raw", "pca": "pca"}[s.method]
        return PaeConfig(projection=projection, space=s, augmentation=AugKind(kind, alpha))
    if manifold_path is None:
        raise click.UsageError(f"--manifold is required for --aug {aug}")
    corpus = [i for i in load_bundle(manifold_path).items if i.kind == "text"]
    m = build_sample_set(corpus)
    return PaeConfig(projection="all", space=m, augmentation=AugKind(kind, alpha))


@pae.command("compute")
@click.option("--bundle", "bundle_path", required=True, type=click.Path())
@click.option("--image", "image_id", required=True)
@click.option("--text", "text_id", required=True)
@click.option("--subspace", "subspace_path", type=click.Path(), default=None)
@click.option("--manifold", "manifold_path", type=click.Path(), default=None,
              help="bundle whose text items form the manifold sample set")
@click.option("--aug", required=True, type=click.Choice(sorted(_AUG_ALIASES)))
@click.option("--alpha", required=True, type=float)
@click.option("--out", required=True, type=click.Path())
def pae_compute(bundle_path, image_id, text_id, subspace_path, manifold_path,
                aug, alpha, out) -> None:
    """Compute one projection-augmentation vector and write it as JSON."""
    bundle = load_bundle(bundle_path)
    cfg = _build_config(subspace_path, manifold_path, aug, alpha)
    vec = compute_pae(cfg, bundle.get(image_id), bundle.get(text_id))
    doc = {
        "config_id": cfg.config_id,
        "alpha": alpha,
        "image_id": image_id,
        "text_id": text_id,
        "dim": bundle.dim,
        "vector": [float(x) for x in vec],
    }
    _write_text(out, json.dumps(doc) + "\n")


@pae.command("sweep")
@click.option("--bundle", "bundle_path", required=True, type=click.Path(),
              help="bundle carrying triple=/role= tagged items")
@click.option("--subspace", "subspace_path", type=click.Path(), default=None)
@click.option("--manifold", "manifold_path", type=click.Path(), default=None)
@click.option("--aug", required=True, type=click.Choice(sorted(_AUG_ALIASES)))
@click.option("--alphas", required=True, help="comma-separated alpha values")
@click.option("--out", required=True, type=click.Path())
def pae_sweep(bundle_path, subspace_path, manifold_path, aug, alphas, out) -> None:
    """Alpha sweep of the selection criteria over tagged triples."""
    bundle = load_bundle(bundle_path)
    triples = fixtures_mod.fixture_triples(bundle)
    if not triples:
        raise click.UsageError("bundle has no triple=/role= tagged items")
    try:
        alpha_list = [float(a) for a in alphas.split(",")]
    except ValueError as exc:
        raise click.UsageError(f"bad --alphas value: {exc}") from exc
    cfg = _build_config(subspace_path, manifold_path, aug, alpha_list[0])
    result = alpha_sweep([cfg], alpha_list, triples)
    _write_text(out, sweep_rows_to_csv(result))
    for config_id, alpha, idx, message in result.skipped:
        click.echo(f"skipped triple {idx} at ({config_id}, alpha={alpha}): {message}", err=True)


@cli.command("optimize")
@click.option("--bundle", "bundle_path", required=True, type=click.Path())
@click.option("--image", "image_id", required=True)
@click.option("--text", "text_id", required=True)
@click.option("--target", required=True,
              type=click.Choice(["naive", "pae", "dpe", "directional"]))
@click.option("--subspace", "subspace_path", type=click.Path(), default=None)
@click.option("--manifold", "manifold_path", type=click.Path(), default=None)
@click.option("--aug", default="plus", type=click.Choice(sorted(_AUG_ALIASES)))
@click.option("--alpha", default=1.0, type=float)
@click.option("--neutral", "neutral_id", default=None,
              help="neutral text id for the directional target")
@click.option("--generator", "gen_kind", default="linear",
              type=click.Choice(["linear", "mlp1"]))
@click.option("--seed", required=True, type=int)
@click.option("--latent-dim", type=int, default=None, help="defaults to the bundle dim")
@click.option("--hidden", type=int, default=32)
@click.option("--lr", default=0.1, type=float)
@click.option("--steps", default=500, type=int)
@click.option("--tol", default=1e-3, type=float)
@click.option("--out-csv", type=click.Path(), default=None)
@click.option("--out-json", type=click.Path(), default=None)
def optimize_cmd(bundle_path, image_id, text_id, target, subspace_path, manifold_path,
                 aug, alpha, neutral_id, gen_kind, seed, latent_dim, hidden, lr,
                 steps, tol, out_csv, out_json) -> None:
    """Gradient descent against a chosen target; writes the trace."""
    bundle = load_bundle(bundle_path)
    e_I = normalize(bundle.get(image_id).vector)
    e_T = normalize(bundle.get(text_id).vector)
    dim = bundle.dim
    latent_dim = latent_dim or dim

    if target == "naive":
        spec = LossSpec(target_kind="naive_text", target=e_T)
    elif target == "pae":
        cfg = _build_config(subspace_path, manifold_path, aug, alpha)
        spec = LossSpec(target_kind="pae", target=compute_pae(cfg, e_I, e_T))
    elif target == "dpe":
        if subspace_path is None:
            raise click.UsageError("--subspace is required for --target dpe")
        s = load_subspace(subspace_path)
        from .pae import compute_dpe_targets

        _, proj_text = compute_dpe_targets(s, e_I, e_T)
        spec = LossSpec(target_kind="dpe", subspace=s, projected_text=proj_text)
    else:
        if neutral_id is None:
            raise click.UsageError("--neutral is required for --target directional")
        e_N = normalize(bundle.get(neutral_id).vector)
        spec = LossSpec(target_kind="directional", origin_image=e_I, text=e_T,
                        neutral_text=e_N)

    g = make_generator(gen_kind, seed, latent_dim, dim,
                       hidden if gen_kind == "mlp1" else None)
    if latent_dim == dim:
        z0 = e_I.copy()
    else:
        z0 = np.random.Generator(np.random.PCG64(seed)).standard_normal(latent_dim)
    trace = run_optimize(spec, g, z0, lr=lr, max_steps=steps, tol=tol)
    trace.save(csv_path=out_csv, json_path=out_json)
    click.echo(f"steps={len(trace.steps)} final_loss={trace.losses[-1]:.6g} "
               f"converged={trace.converged}")


@cli.group()
def analyze() -> None:
    """Embedding-space analyses; outputs are plot-ready CSVs."""


@analyze.command("matrix")
@click.option("--bundle", "bundle_path", required=True, type=click.Path())
@click.option("--grouping", default="group")
@click.option("--out", required=True, type=click.Path())
def analyze_matrix(bundle_path, grouping, out) -> None:
    matrix = similarity_matrix(load_bundle(bundle_path), grouping)
    _write_text(out, matrix.to_csv())


@analyze.command("pca2d")
@click.option("--bundle", "bundle_paths", required=True, multiple=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
def analyze_pca2d(bundle_paths, out) -> None:
    points = pca2d([load_bundle(p) for p in bundle_paths])
    _write_text(out, pca2d_to_csv(points))


@analyze.command("trajectory")
@click.option("--bundle", "bundle_path", required=True, type=click.Path())
@click.option("--frame-tag", default="role=frame")
@click.option("--reference", default="first_frame",
              help="'first_frame' or 'text:<item id>'")
@click.option("--subspace", "subspace_path", type=click.Path(), default=None)
@click.option("--out", required=True, type=click.Path())
def analyze_trajectory(bundle_path, frame_tag, reference, subspace_path, out) -> None:
    bundle = load_bundle(bundle_path)
    frames = bundle.with_tag(frame_tag)
    ref = reference
    if reference.startswith("text:"):
        ref = bundle.get(reference.split(":", 1)[1])
    space = load_subspace(subspace_path) if subspace_path else None
    series = trajectory_similarity(frames, reference=ref, space=space)
    _write_text(out, series.to_csv())


@analyze.command("heatmap")
@click.option("--bundle", "bundle_path", required=True, type=click.Path())
@click.option("--grouping", default="group")
@click.option("--item-tag", default=None, help="restrict to items carrying this tag")
@click.option("--subspace", "subspace_path", type=click.Path(), default=None)
@click.option("--out", required=True, type=click.Path())
def analyze_heatmap(bundle_path, grouping, item_tag, subspace_path, out) -> None:
    bundle = load_bundle(bundle_path)
    items = bundle.with_tag(item_tag) if item_tag else list(bundle.items)
    space = load_subspace(subspace_path) if subspace_path else None
    heatmap = group_heatmap(items, grouping=grouping, space=space)
    _write_text(out, heatmap.to_csv())


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Exit as exc:
        return 0 if exc.exit_code == 0 else 1
    except KeyError as exc:
        click.echo(f"data error: unknown item id {exc}", err=True)
        return 2
    except PaeKitError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        return exc.exit_code
    except click.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
