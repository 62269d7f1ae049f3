"""Real-model acceptance checks.

These need (a) downloadable CLIP weights and (b) an assets directory named
by the CLIP_EXPORTER_ASSETS environment variable:

    assets/
      dog.jpg  cat.jpg            # one clear dog photo, one clear cat photo
      images/                     # >= 5 assorted photos
      texts.txt                   # >= 5 assorted prompts, one per line
      faces/                      # >= 5 face photos
      face_texts.txt              # >= 5 facial descriptions
      emotion_pairs/orig_*.jpg    # original faces ...
      emotion_pairs/happy_*.jpg   # ... and their happy counterparts,
                                  # matched by the suffix after the underscore

Everything here skips cleanly when the model or the assets are missing; the
primary suite does not depend on this module.
"""
import os

import pytest

from clip_exporter import ClipEncoder, ExportManifest, ModelLoadError, collect_images, export
from pae_kit import (
    AugKind,
    PaeConfig,
    alpha_sweep,
    build_gs,
    cosine_similarity,
    load_bundle,
    similarity_matrix,
)
from pae_kit.embeddings import Embedding, EmbeddingBundle

EMOTIONS = ["happy", "sad", "angry", "fearful", "surprised", "disgusted"]

ASSETS = os.environ.get("CLIP_EXPORTER_ASSETS")


@pytest.fixture(scope="module")
def encoder():
    try:
        return ClipEncoder()
    except ModelLoadError as exc:
        pytest.skip(f"CLIP model unavailable: {exc}")


def _asset(*parts):
    if not ASSETS:
        pytest.skip("CLIP_EXPORTER_ASSETS not set")
    path = os.path.join(ASSETS, *parts)
    if not os.path.exists(path):
        pytest.skip(f"asset missing: {path}")
    return path


def _export(tmp_path, encoder, images=(), texts=()):
    out = tmp_path / "bundle.json"
    export(ExportManifest(images=tuple(images), texts=tuple(texts),
                          out_path=str(out)), encoder=encoder)
    return load_bundle(out)


def _with_modality_tags(bundle):
    return EmbeddingBundle(dim=bundle.dim, items=tuple(
        Embedding(id=i.id, kind=i.kind, label=i.label, vector=i.vector,
                  tags=(f"modality={i.kind}",))
        for i in bundle.items
    ))


def test_dog_cat_similarity_pattern(tmp_path, encoder):
    dog = _asset("dog.jpg")
    cat = _asset("cat.jpg")
    bundle = _export(tmp_path, encoder,
                     images=[("img_dog", dog), ("img_cat", cat)],
                     texts=[("txt_dog", "dog"), ("txt_cat", "cat")])
    get = lambda i: bundle.get(i).vector
    assert cosine_similarity(get("img_dog"), get("txt_dog")) == pytest.approx(0.253, abs=0.08)
    assert cosine_similarity(get("img_cat"), get("txt_cat")) == pytest.approx(0.275, abs=0.08)
    assert cosine_similarity(get("img_dog"), get("img_cat")) == pytest.approx(0.841, abs=0.08)
    assert cosine_similarity(get("txt_dog"), get("txt_cat")) == pytest.approx(0.936, abs=0.08)


def test_inter_vs_intra_modality_ordering(tmp_path, encoder):
    image_dir = _asset("images")
    texts_file = _asset("texts.txt")
    from clip_exporter import read_text_manifest

    images = collect_images(image_dir)
    texts = read_text_manifest(texts_file)
    if len(images) < 5 or len(texts) < 5:
        pytest.skip("need >= 5 images and >= 5 texts")
    bundle = _export(tmp_path, encoder, images=images, texts=texts)
    m = similarity_matrix(_with_modality_tags(bundle), "modality")
    assert m.cell("image", "image") > m.cell("image", "text")
    assert m.cell("text", "text") > m.cell("image", "text")


def test_face_similarity_table_values(tmp_path, encoder):
    faces_dir = _asset("faces")
    texts_file = _asset("face_texts.txt")
    from clip_exporter import read_text_manifest

    bundle = _export(tmp_path, encoder, images=collect_images(faces_dir),
                     texts=read_text_manifest(texts_file))
    m = similarity_matrix(_with_modality_tags(bundle), "modality")
    assert m.cell("text", "image") == pytest.approx(0.200, abs=0.08)
    assert m.cell("image", "image") == pytest.approx(0.567, abs=0.08)


def test_emotion_gs_sweep_passing_range(tmp_path, encoder):
    pairs_dir = _asset("emotion_pairs")
    names = sorted(os.listdir(pairs_dir))
    origs = [n for n in names if n.startswith("orig_")]
    suffix = lambda n: n.split("_", 1)[1]
    pairs = [
        (os.path.join(pairs_dir, o), os.path.join(pairs_dir, "happy_" + suffix(o)))
        for o in origs
        if "happy_" + suffix(o) in names
    ]
    if not pairs:
        pytest.skip("no orig_/happy_ pairs found")

    images = []
    for k, (orig, target) in enumerate(pairs):
        images += [(f"orig_{k}", orig), (f"target_{k}", target)]
    texts = [(f"txt_{e}", e) for e in EMOTIONS]
    bundle = _export(tmp_path, encoder, images=images, texts=texts)

    basis = [bundle.get(f"txt_{e}") for e in EMOTIONS]
    s = build_gs(basis)
    cfg = PaeConfig("gs", s, AugKind("plus", 1.0))
    happy = bundle.get("txt_happy")
    triples = [
        (bundle.get(f"orig_{k}"), happy, bundle.get(f"target_{k}"))
        for k in range(len(pairs))
    ]
    alphas = [5.0, 7.5, 10.0, 12.5, 15.0]
    result = alpha_sweep([cfg], alphas, triples)
    passing = result.passing_alphas.get("gs+plus", ())
    assert any(10.0 <= a <= 15.0 for a in passing), (
        f"passing range {passing} does not overlap [10, 15]"
    )
