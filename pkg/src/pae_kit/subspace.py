"""Corpus subspaces and manifold sample sets.

A subspace is an ordered list of basis vectors built from text prompts,
either orthonormalized (Gram-Schmidt), kept raw, or extracted as principal
components. Projection always uses the dot-product form
``sum_k <b_k, v> b_k`` over the stored basis.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .embeddings import Embedding, cosine_similarity, normalize
from .errors import (
    DegenerateBasis,
    DimMismatch,
    IoError,
    ParseError,
    RankDeficient,
    SchemaError,
    ZeroVector,
)

_GS_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class CorpusSubspace:
    """An ordered basis of a linear subspace, with provenance labels."""

    dim: int
    basis: np.ndarray  # (N, dim)
    orthonormal: bool
    method: str  # gram_schmidt | raw | pca
    source_labels: tuple[str, ...]
    explained_variance: tuple[float, ...] | None = None

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[1] != self.dim:
            raise SchemaError("basis must be an (N, dim) array")
        n = basis.shape[0]
        if not 1 <= n <= self.dim:
            raise SchemaError(f"need 1 <= N <= dim, got N={n}, dim={self.dim}")
        if self.method not in ("gram_schmidt", "raw", "pca"):
            raise SchemaError(f"unknown method {self.method!r}")
        if (self.method in ("gram_schmidt", "pca")) != self.orthonormal:
            raise SchemaError(f"method {self.method!r} inconsistent with orthonormal={self.orthonormal}")
        if self.orthonormal:
            gram = basis @ basis.T
            if np.max(np.abs(gram - np.eye(n))) >= 1e-6:
                raise SchemaError("basis marked orthonormal but is not")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "source_labels", tuple(self.source_labels))
        if self.explained_variance is not None:
            ev = tuple(float(x) for x in self.explained_variance)
            if any(ev[i] < ev[i + 1] for i in range(len(ev) - 1)):
                raise SchemaError("explained_variance must be non-increasing")
            object.__setattr__(self, "explained_variance", ev)

    @property
    def n_basis(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class ManifoldSet:
    """Unit-norm corpus samples kept verbatim as points on a manifold."""

    dim: int
    members: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        if not self.members:
            raise SchemaError("manifold set must be non-empty")
        frozen = []
        for label, vec in self.members:
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (self.dim,):
                raise DimMismatch(f"member {label!r} has wrong dimension")
            if abs(np.linalg.norm(vec) - 1.0) >= 1e-6:
                raise SchemaError(f"member {label!r} is not unit-norm")
            vec.setflags(write=False)
            frozen.append((label, vec))
        object.__setattr__(self, "members", tuple(frozen))

    def __len__(self) -> int:
        return len(self.members)


def _prompt_matrix(prompt_embeddings: list[Embedding]) -> tuple[np.ndarray, list[str]]:
    if not prompt_embeddings:
        raise SchemaError("need at least one prompt embedding")
    dim = prompt_embeddings[0].dim
    vectors = []
    labels = []
    for emb in prompt_embeddings:
        if emb.dim != dim:
            raise DimMismatch(f"prompt {emb.id!r} has dim {emb.dim}, expected {dim}")
        vectors.append(np.asarray(emb.vector, dtype=float))
        labels.append(emb.label)
    return np.array(vectors), labels


def build_gs(prompt_embeddings: list[Embedding]) -> CorpusSubspace:
    """Gram-Schmidt orthonormal basis from prompt embeddings, in input order."""
    vectors, labels = _prompt_matrix(prompt_embeddings)
    dim = vectors.shape[1]
    if len(vectors) > dim:
        raise SchemaError(f"{len(vectors)} prompts exceed dimension {dim}")
    basis = []
    for vec, label in zip(vectors, labels):
        residual = vec.copy()
        for b in basis:
            residual -= np.dot(residual, b) * b
        norm = np.linalg.norm(residual)
        if norm < _GS_RESIDUAL_TOL:
            raise DegenerateBasis(f"prompt {label!r} is near-collinear with earlier prompts")
        basis.append(residual / norm)
    return CorpusSubspace(
        dim=dim,
        basis=np.array(basis),
        orthonormal=True,
        method="gram_schmidt",
        source_labels=tuple(labels),
    )


def build_raw(prompt_embeddings: list[Embedding]) -> CorpusSubspace:
    """Unit-normalized prompts as-is, without orthogonalization."""
    vectors, labels = _prompt_matrix(prompt_embeddings)
    basis = np.array([normalize(v) for v in vectors])
    return CorpusSubspace(
        dim=vectors.shape[1],
        basis=basis,
        orthonormal=False,
        method="raw",
        source_labels=tuple(labels),
    )


def _fix_component_signs(components: np.ndarray) -> np.ndarray:
    # deterministic convention: largest-magnitude coordinate positive
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def build_pca(corpus: list[Embedding], n_components: int) -> CorpusSubspace:
    """Top-N principal directions of the mean-centered corpus."""
    vectors, labels = _prompt_matrix(corpus)
    if not 1 <= n_components <= min(vectors.shape):
        raise SchemaError(f"need 1 <= N <= min(corpus size, dim), got {n_components}")
    centered = vectors - vectors.mean(axis=0)
    cov = centered.T @ centered / max(1, len(vectors) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    scale = max(eigvals[0], 0.0)
    rank_tol = max(scale * 1e-10, 1e-12)
    if eigvals[n_components - 1] <= rank_tol:
        raise RankDeficient(
            f"corpus covariance rank < {n_components} requested components"
        )
    components = _fix_component_signs(eigvecs[:, :n_components].T)
    return CorpusSubspace(
        dim=vectors.shape[1],
        basis=components,
        orthonormal=True,
        method="pca",
        source_labels=tuple(labels),
        explained_variance=tuple(float(v) for v in eigvals[:n_components]),
    )


def build_sample_set(corpus: list[Embedding]) -> ManifoldSet:
    """Keep the whole corpus, normalized, as manifold samples."""
    vectors, labels = _prompt_matrix(corpus)
    members = tuple((label, normalize(v)) for label, v in zip(labels, vectors))
    return ManifoldSet(dim=vectors.shape[1], members=members)


def project(s: CorpusSubspace, v) -> np.ndarray:
    """Dot-product projection: sum_k <b_k, v> b_k over the stored basis."""
    v = np.asarray(v, dtype=float)
    if v.shape != (s.dim,):
        raise DimMismatch(f"vector dim {v.shape} != subspace dim {s.dim}")
    return s.basis.T @ (s.basis @ v)


def coefficients(s: CorpusSubspace, v) -> np.ndarray:
    """Per-basis-vector coefficients <v, b_k>."""
    v = np.asarray(v, dtype=float)
    if v.shape != (s.dim,):
        raise DimMismatch(f"vector dim {v.shape} != subspace dim {s.dim}")
    return s.basis @ v


def project_all(m: ManifoldSet, v) -> tuple[str, np.ndarray]:
    """Manifold projection: the stored member most cosine-similar to v.

    Ties break to the first member in storage order.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (m.dim,):
        raise DimMismatch(f"vector dim {v.shape} != manifold dim {m.dim}")
    if np.linalg.norm(v) < 1e-12:
        raise ZeroVector("cannot project a zero vector onto a manifold set")
    sims = [cosine_similarity(v, vec) for _, vec in m.members]
    best = int(np.argmax(sims))
    return m.members[best]


def save_subspace(s: CorpusSubspace, path) -> None:
    doc = {
        "dim": s.dim,
        "method": s.method,
        "orthonormal": s.orthonormal,
        "basis": [[float(x) for x in row] for row in s.basis],
        "source_labels": list(s.source_labels),
        "explained_variance": list(s.explained_variance) if s.explained_variance else None,
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_subspace(path) -> CorpusSubspace:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    for key in ("dim", "method", "orthonormal", "basis", "source_labels"):
        if key not in doc:
            raise SchemaError(f"{path}: missing key {key!r}")
    ev = doc.get("explained_variance")
    return CorpusSubspace(
        dim=int(doc["dim"]),
        basis=np.array(doc["basis"], dtype=float),
        orthonormal=bool(doc["orthonormal"]),
        method=str(doc["method"]),
        source_labels=tuple(str(x) for x in doc["source_labels"]),
        explained_variance=tuple(ev) if ev else None,
    )
