import json

import numpy as np
import pytest

from clip_exporter import (
    EncodeError,
    ExportManifest,
    ManifestError,
    collect_images,
    export,
    read_text_manifest,
)
from pae_kit import cosine_similarity, load_bundle, similarity_matrix
from pae_kit.embeddings import Embedding, EmbeddingBundle


class FakeEncoder:
    """Deterministic stand-in with the real encoder's modality-gap shape:
    images cluster near one direction, texts near an orthogonal one."""

    dim = 32

    def _item_vector(self, seed_text: str, base: np.ndarray) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(abs(hash(seed_text)) % 2**32))
        return 4.0 * base + rng.standard_normal(self.dim)

    def encode_texts(self, prompts):
        base = np.zeros(self.dim)
        base[1] = 1.0
        return np.array([self._item_vector("t:" + p, base) for p in prompts])

    def encode_images(self, paths):
        base = np.zeros(self.dim)
        base[0] = 1.0
        return np.array([self._item_vector("i:" + p, base) for p in paths])


@pytest.fixture
def image_dir(tmp_path):
    from PIL import Image

    d = tmp_path / "imgs"
    d.mkdir()
    for name in ("dog", "cat"):
        Image.new("RGB", (8, 8), (120, 60, 30)).save(d / f"{name}.png")
    return d


def test_duplicate_id_rejected_before_encoding():
    with pytest.raises(ManifestError):
        ExportManifest(images=(("a", "x.png"),), texts=(("a", "dog"),))


def test_empty_manifest_gives_valid_empty_bundle(tmp_path):
    out = tmp_path / "empty.json"
    export(ExportManifest(out_path=str(out)), encoder=FakeEncoder())
    bundle = load_bundle(out)
    assert len(bundle) == 0
    assert bundle.dim == 32


def test_output_passes_primary_bundle_validation(tmp_path, image_dir):
    out = tmp_path / "b.json"
    manifest = ExportManifest(
        images=tuple(collect_images(str(image_dir))),
        texts=(("txt_dog", "dog"), ("txt_cat", "cat")),
        out_path=str(out),
    )
    export(manifest, encoder=FakeEncoder())
    bundle = load_bundle(out)
    assert len(bundle) == 4
    kinds = {item.id: item.kind for item in bundle.items}
    assert kinds["txt_dog"] == "text"
    assert kinds["img_dog"] == "image"
    # raw encoder outputs, not normalized
    norms = [np.linalg.norm(item.vector) for item in bundle.items]
    assert any(abs(n - 1.0) > 1e-3 for n in norms)


def test_missing_image_reports_item_id(tmp_path):
    manifest = ExportManifest(
        images=(("img_x", str(tmp_path / "missing.png")),),
        out_path=str(tmp_path / "b.json"),
    )
    with pytest.raises(EncodeError, match="img_x"):
        export(manifest, encoder=FakeEncoder())


def test_modality_ordering(tmp_path, image_dir):
    # mean intra-modality similarity exceeds mean inter-modality similarity
    from PIL import Image

    for i in range(4):
        Image.new("RGB", (8, 8), (i * 30, 90, 10)).save(image_dir / f"extra{i}.png")
    texts = tuple((f"txt_{i}", w) for i, w in enumerate(
        ["dog", "cat", "horse", "happy face", "sad face", "a photo of a bird"]
    ))
    out = tmp_path / "b.json"
    export(ExportManifest(images=tuple(collect_images(str(image_dir))),
                          texts=texts, out_path=str(out)),
           encoder=FakeEncoder())
    bundle = load_bundle(out)
    tagged = EmbeddingBundle(dim=bundle.dim, items=tuple(
        Embedding(id=i.id, kind=i.kind, label=i.label, vector=i.vector,
                  tags=(f"modality={i.kind}",))
        for i in bundle.items
    ))
    m = similarity_matrix(tagged, "modality")
    assert m.cell("image", "image") > m.cell("image", "text")
    assert m.cell("text", "text") > m.cell("image", "text")


def test_atomic_write_leaves_no_tmp(tmp_path):
    out = tmp_path / "b.json"
    export(ExportManifest(texts=(("t1", "hello"),), out_path=str(out)),
           encoder=FakeEncoder())
    leftovers = [p for p in tmp_path.iterdir() if p.suffix == ".tmp"]
    assert leftovers == []
    assert json.loads(out.read_text())["format_version"] == 1


class TestTextManifest:
    def test_plain_lines(self, tmp_path):
        f = tmp_path / "texts.txt"
        f.write_text("dog\ncat\n\nhorse\n")
        texts = read_text_manifest(str(f))
        assert texts == (("txt_1", "dog"), ("txt_2", "cat"), ("txt_4", "horse"))

    def test_tsv_ids(self, tmp_path):
        f = tmp_path / "texts.tsv"
        f.write_text("d\tdog\nc\tcat\n")
        assert read_text_manifest(str(f)) == (("d", "dog"), ("c", "cat"))


class TestCollectImages:
    def test_directory_sorted(self, image_dir):
        images = collect_images(str(image_dir))
        assert [i for i, _ in images] == ["img_cat", "img_dog"]

    def test_comma_list(self):
        images = collect_images("a/x.png,b/y.jpg")
        assert images == (("img_x", "a/x.png"), ("img_y", "b/y.jpg"))


class TestCli:
    def test_missing_out_is_usage_error(self):
        from clip_exporter.cli import main

        assert main([]) == 1

    def test_bad_texts_path_is_usage_error(self, tmp_path):
        from clip_exporter.cli import main

        assert main(["--texts", str(tmp_path / "nope.txt"),
                     "--out", str(tmp_path / "b.json")]) == 1
