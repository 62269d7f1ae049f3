"""Encode images and texts with a CLIP model and write an embedding bundle.

The output file follows the pae-kit bundle schema (format_version 1) so it
can feed the subspace, operator, and analysis tooling directly. Vectors are
the raw encoder outputs; the consuming pipeline normalizes at entry.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MODEL = "openai/clip-vit-base-patch32"


class ExporterError(Exception):
    pass


class ManifestError(ExporterError):
    """Invalid manifest: duplicate ids, unreadable inputs."""


class ModelLoadError(ExporterError):
    """The requested model could not be loaded."""


class EncodeError(ExporterError):
    """A single item failed to encode; carries the item id."""

    def __init__(self, item_id: str, message: str):
        super().__init__(f"item {item_id!r}: {message}")
        self.item_id = item_id


@dataclass(frozen=True)
class ExportManifest:
    """What to encode and where to write the bundle."""

    model: str = DEFAULT_MODEL
    images: tuple[tuple[str, str], ...] = ()  # (id, path)
    texts: tuple[tuple[str, str], ...] = ()  # (id, prompt)
    out_path: str = "bundle.json"

    def __post_init__(self):
        ids = [i for i, _ in self.images] + [i for i, _ in self.texts]
        seen = set()
        for item_id in ids:
            if item_id in seen:
                raise ManifestError(f"duplicate id {item_id!r}")
            seen.add(item_id)


class ClipEncoder:
    """Real CLIP encoder backed by transformers; loaded lazily."""

    def __init__(self, model_name: str = DEFAULT_MODEL, batch_size: int = 16):
        try:
            import torch
            from transformers import CLIPModel, CLIPProcessor
        except ImportError as exc:
            raise ModelLoadError(f"torch/transformers unavailable: {exc}") from exc
        try:
            self._model = CLIPModel.from_pretrained(model_name)
            self._processor = CLIPProcessor.from_pretrained(model_name)
        except Exception as exc:
            raise ModelLoadError(f"cannot load {model_name!r}: {exc}") from exc
        self._torch = torch
        self._model.eval()
        self.batch_size = batch_size
        self.dim = int(self._model.config.projection_dim)

    def encode_texts(self, prompts: list[str]) -> np.ndarray:
        torch = self._torch
        chunks = []
        with torch.no_grad():
            for start in range(0, len(prompts), self.batch_size):
                batch = prompts[start:start + self.batch_size]
                inputs = self._processor(text=batch, return_tensors="pt", padding=True)
                chunks.append(self._model.get_text_features(**inputs).cpu().numpy())
        return np.concatenate(chunks) if chunks else np.zeros((0, self.dim))

    def encode_images(self, paths: list[str]) -> np.ndarray:
        from PIL import Image

        torch = self._torch
        chunks = []
        with torch.no_grad():
            for start in range(0, len(paths), self.batch_size):
                batch = [Image.open(p).convert("RGB") for p in paths[start:start + self.batch_size]]
                inputs = self._processor(images=batch, return_tensors="pt")
                chunks.append(self._model.get_image_features(**inputs).cpu().numpy())
        return np.concatenate(chunks) if chunks else np.zeros((0, self.dim))


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export(manifest: ExportManifest, encoder=None) -> str:
    """Encode everything in the manifest and write the bundle atomically.

    Returns the output path. An injected encoder only needs ``dim``,
    ``encode_images(paths)``, and ``encode_texts(prompts)``.
    """
    if encoder is None:
        encoder = ClipEncoder(manifest.model)

    items = []
    if manifest.texts:
        prompts = [t for _, t in manifest.texts]
        try:
            vectors = encoder.encode_texts(prompts)
        except ExporterError:
            raise
        except Exception as exc:
            raise EncodeError(manifest.texts[0][0], str(exc)) from exc
        for (item_id, prompt), vec in zip(manifest.texts, vectors):
            items.append({
                "id": item_id, "kind": "text", "label": prompt, "tags": [],
                "vector": [float(x) for x in vec],
            })
    if manifest.images:
        for item_id, path in manifest.images:
            if not os.path.exists(path):
                raise EncodeError(item_id, f"image file not found: {path}")
        paths = [p for _, p in manifest.images]
        try:
            vectors = encoder.encode_images(paths)
        except ExporterError:
            raise
        except Exception as exc:
            raise EncodeError(manifest.images[0][0], str(exc)) from exc
        for (item_id, path), vec in zip(manifest.images, vectors):
            items.append({
                "id": item_id, "kind": "image",
                "label": os.path.basename(path), "tags": [],
                "vector": [float(x) for x in vec],
            })

    doc = {"format_version": 1, "dim": int(encoder.dim), "items": items}
    _atomic_write(manifest.out_path, json.dumps(doc) + "\n")
    return manifest.out_path


def read_text_manifest(path: str) -> tuple[tuple[str, str], ...]:
    """One prompt per line; a TSV line supplies an explicit id."""
    texts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" in line:
                item_id, prompt = line.split("\t", 1)
            else:
                item_id, prompt = f"txt_{lineno}", line
            texts.append((item_id, prompt))
    return tuple(texts)


def collect_images(spec: str) -> tuple[tuple[str, str], ...]:
    """A directory (all common image files, sorted) or a comma-separated list."""
    exts = (".png", ".jpg", ".jpeg", ".bmp", ".webp")
    if os.path.isdir(spec):
        paths = sorted(
            os.path.join(spec, name)
            for name in os.listdir(spec)
            if name.lower().endswith(exts)
        )
    else:
        paths = [p for p in spec.split(",") if p]
    return tuple(
        (f"img_{os.path.splitext(os.path.basename(p))[0]}", p) for p in paths
    )
