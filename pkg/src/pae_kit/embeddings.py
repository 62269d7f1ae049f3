"""Embedding primitives and the bundle file format.

A bundle is the toolkit's single wire format: a JSON document declaring a
dimension and carrying labeled image/text vectors. Vectors are stored raw;
normalization is always an explicit caller step.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimMismatch,
    IoError,
    ParseError,
    SchemaError,
    VersionError,
    ZeroVector,
)

FORMAT_VERSION = 1
_KINDS = ("image", "text")
_BUNDLE_KEYS = {"format_version", "dim", "items"}


@dataclass(frozen=True)
class Embedding:
    """A labeled D-dimensional vector tagged with its modality."""

    id: str
    kind: str
    label: str
    vector: np.ndarray
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SchemaError(f"item {self.id!r}: kind must be one of {_KINDS}, got {self.kind!r}")
        vec = np.asarray(self.vector, dtype=float)
        if vec.ndim != 1:
            raise SchemaError(f"item {self.id!r}: vector must be one-dimensional")
        if not np.all(np.isfinite(vec)):
            raise SchemaError(f"item {self.id!r}: vector has non-finite components")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)
        object.__setattr__(self, "tags", tuple(self.tags))

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


@dataclass(frozen=True)
class EmbeddingBundle:
    """A validated collection of embeddings sharing one dimension."""

    dim: int
    items: tuple[Embedding, ...]
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.format_version != FORMAT_VERSION:
            raise VersionError(f"unsupported format_version {self.format_version}")
        if self.dim < 1:
            raise SchemaError(f"dim must be positive, got {self.dim}")
        object.__setattr__(self, "items", tuple(self.items))
        seen = set()
        for item in self.items:
            if item.id in seen:
                raise SchemaError(f"duplicate id {item.id!r}")
            seen.add(item.id)
            if item.dim != self.dim:
                raise SchemaError(
                    f"item {item.id!r}: vector length {item.dim} != bundle dim {self.dim}"
                )

    def __len__(self) -> int:
        return len(self.items)

    def get(self, item_id: str) -> Embedding:
        for item in self.items:
            if item.id == item_id:
                return item
        raise KeyError(item_id)

    def with_tag(self, tag: str) -> list[Embedding]:
        return [item for item in self.items if tag in item.tags]


def normalize(v) -> np.ndarray:
    """Return v scaled to unit Euclidean norm."""
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise ZeroVector("cannot normalize a (near-)zero vector")
    return v / norm


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between a and b, clamped to [-1, 1]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < 1e-12 or nb < 1e-12:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def _item_from_json(obj, dim: int) -> Embedding:
    if not isinstance(obj, dict):
        raise SchemaError("item must be an object")
    for key in ("id", "kind", "label", "vector"):
        if key not in obj:
            raise SchemaError(f"item missing required field {key!r}")
    vector = obj["vector"]
    if not isinstance(vector, list) or len(vector) != dim:
        raise SchemaError(f"item {obj['id']!r}: vector length != dim {dim}")
    try:
        vec = np.array(vector, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"item {obj['id']!r}: non-numeric vector component") from exc
    return Embedding(
        id=str(obj["id"]),
        kind=str(obj["kind"]),
        label=str(obj["label"]),
        vector=vec,
        tags=tuple(str(t) for t in obj.get("tags", [])),
    )


def load_bundle(path) -> EmbeddingBundle:
    """Read and validate a bundle JSON file. Vectors are not normalized."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc

    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: top-level document must be an object")
    unknown = set(doc) - _BUNDLE_KEYS
    if unknown:
        raise SchemaError(f"{path}: unknown top-level keys {sorted(unknown)}")
    for key in _BUNDLE_KEYS:
        if key not in doc:
            raise SchemaError(f"{path}: missing top-level key {key!r}")
    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise VersionError(f"{path}: unsupported format_version {version!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"{path}: dim must be a positive integer")
    if not isinstance(doc["items"], list):
        raise SchemaError(f"{path}: items must be a list")
    items = [_item_from_json(obj, dim) for obj in doc["items"]]
    return EmbeddingBundle(dim=dim, items=tuple(items))


def save_bundle(bundle: EmbeddingBundle, path) -> None:
    """Write a bundle as UTF-8 JSON; floats keep full precision."""
    doc = {
        "format_version": bundle.format_version,
        "dim": bundle.dim,
        "items": [
            {
                "id": item.id,
                "kind": item.kind,
                "label": item.label,
                "tags": list(item.tags),
                "vector": [float(x) for x in item.vector],
            }
            for item in bundle.items
        ],
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def chord_length(cos_sim: float) -> float:
    """Euclidean distance between unit vectors with the given cosine."""
    return math.sqrt(max(0.0, 2.0 - 2.0 * cos_sim))
