"""Embedding-space studies: similarity matrices, 2-D PCA coordinates,
trajectory distillation curves, and item-level heat-map data.

All outputs are plain data ready for CSV export; rendering is out of scope.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import Embedding, EmbeddingBundle, cosine_similarity
from .errors import (
    DegenerateDirection,
    DimMismatch,
    EmptyGroup,
    MissingTag,
    RankDeficient,
    SchemaError,
)
from .subspace import CorpusSubspace, project


@dataclass(frozen=True)
class SimilarityMatrix:
    """Mean pairwise cosine per (row group, col group) cell."""

    row_groups: tuple[str, ...]
    col_groups: tuple[str, ...]
    values: np.ndarray
    counts: np.ndarray

    def cell(self, row: str, col: str) -> float:
        i = self.row_groups.index(row)
        j = self.col_groups.index(col)
        return float(self.values[i, j])

    def to_csv(self) -> str:
        lines = ["row_group,col_group,mean,count"]
        for i, rg in enumerate(self.row_groups):
            for j, cg in enumerate(self.col_groups):
                lines.append(f"{rg},{cg},{self.values[i, j]:.10g},{int(self.counts[i, j])}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TrajectorySeries:
    """Cosine of each frame to a reference, in full space or a subspace."""

    space: str  # "full" or "subspace"
    reference: str  # "first_frame" or "text"
    values: tuple[float, ...]

    def to_csv(self) -> str:
        lines = ["frame,cosine"]
        lines += [f"{i},{v:.10g}" for i, v in enumerate(self.values)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class HeatmapData:
    """Full item-level pairwise cosine matrix, ordered by group."""

    ids: tuple[str, ...]
    groups: tuple[str, ...]
    matrix: np.ndarray

    def block_contrast(self) -> float:
        """Mean within-group cosine minus mean cross-group cosine
        (diagonal excluded)."""
        n = len(self.ids)
        within, cross = [], []
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                (within if self.groups[i] == self.groups[j] else cross).append(
                    self.matrix[i, j]
                )
        if not within or not cross:
            raise EmptyGroup("need both within-group and cross-group pairs")
        return float(np.mean(within) - np.mean(cross))

    def to_csv(self) -> str:
        lines = ["id_a,group_a,id_b,group_b,cosine"]
        n = len(self.ids)
        for i in range(n):
            for j in range(n):
                lines.append(
                    f"{self.ids[i]},{self.groups[i]},{self.ids[j]},{self.groups[j]},"
                    f"{self.matrix[i, j]:.10g}"
                )
        return "\n".join(lines) + "\n"


def tag_value(item: Embedding, key: str) -> str:
    """Value of a "key=value" tag; raises MissingTag when absent."""
    prefix = key + "="
    for tag in item.tags:
        if tag.startswith(prefix):
            return tag[len(prefix):]
    raise MissingTag(f"item {item.id!r} lacks a {key!r} tag")


def similarity_matrix(bundle: EmbeddingBundle, grouping: str) -> SimilarityMatrix:
    """Group-averaged cosine matrix; self-pairs excluded on the diagonal."""
    groups: dict[str, list[np.ndarray]] = {}
    order: list[str] = []
    for item in bundle.items:
        g = tag_value(item, grouping)
        if g not in groups:
            groups[g] = []
            order.append(g)
        groups[g].append(np.asarray(item.vector, dtype=float))

    n = len(order)
    values = np.zeros((n, n))
    counts = np.zeros((n, n), dtype=int)
    for i, gi in enumerate(order):
        for j, gj in enumerate(order):
            sims = []
            if i == j:
                members = groups[gi]
                for a in range(len(members)):
                    for b in range(a + 1, len(members)):
                        sims.append(cosine_similarity(members[a], members[b]))
            else:
                for va in groups[gi]:
                    for vb in groups[gj]:
                        sims.append(cosine_similarity(va, vb))
            if not sims:
                raise EmptyGroup(f"cell ({gi}, {gj}) has no pairs to average")
            values[i, j] = np.mean(sims)
            counts[i, j] = len(sims)
    return SimilarityMatrix(tuple(order), tuple(order), values, counts)


def _top2_components(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    centered = vectors - vectors.mean(axis=0)
    cov = centered.T @ centered / max(1, len(vectors) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    rank_tol = max(eigvals[0] * 1e-10, 1e-12)
    if len(eigvals) < 2 or eigvals[1] <= rank_tol:
        raise RankDeficient("second principal component undefined")
    comps = eigvecs[:, :2].T.copy()
    for i in range(2):
        j = int(np.argmax(np.abs(comps[i])))
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return comps, eigvals[:2], centered


def pca2d(bundles: list[EmbeddingBundle]) -> list[tuple[str, str, float, float]]:
    """Pooled 2-D PCA coordinates for every item across the given bundles."""
    items: list[Embedding] = []
    for b in bundles:
        items.extend(b.items)
    if len(items) < 3:
        raise SchemaError("pca2d needs at least 3 items")
    dims = {item.dim for item in items}
    if len(dims) != 1:
        raise DimMismatch(f"bundles disagree on dim: {sorted(dims)}")
    vectors = np.array([item.vector for item in items], dtype=float)
    comps, _, centered = _top2_components(vectors)
    coords = centered @ comps.T
    return [
        (item.id, item.label, float(x), float(y))
        for item, (x, y) in zip(items, coords)
    ]


def pca2d_explained(bundles: list[EmbeddingBundle]) -> tuple[float, float]:
    """Top-2 explained variances of the pooled collection."""
    items = [item for b in bundles for item in b.items]
    vectors = np.array([item.vector for item in items], dtype=float)
    _, eigvals, _ = _top2_components(vectors)
    return float(eigvals[0]), float(eigvals[1])


def pca2d_to_csv(points: list[tuple[str, str, float, float]]) -> str:
    lines = ["id,label,x,y"]
    lines += [f"{i},{l},{x:.10g},{y:.10g}" for i, l, x, y in points]
    return "\n".join(lines) + "\n"


def trajectory_similarity(frames: list[Embedding], reference="first_frame",
                          space: CorpusSubspace | None = None) -> TrajectorySeries:
    """Per-frame cosine to the reference, optionally inside a subspace."""
    if len(frames) < 2:
        raise SchemaError("need at least 2 frames")
    vectors = [np.asarray(f.vector, dtype=float) for f in frames]

    if isinstance(reference, str):
        if reference != "first_frame":
            raise SchemaError(f"unknown reference {reference!r}")
        ref_vec = vectors[0]
        ref_name = "first_frame"
    else:
        ref_vec = np.asarray(
            reference.vector if isinstance(reference, Embedding) else reference, dtype=float
        )
        ref_name = "text"

    def transform(v: np.ndarray) -> np.ndarray:
        if space is None:
            return v
        out = project(space, v)
        if np.linalg.norm(out) < 1e-12:
            raise DegenerateDirection("projected frame has vanishing norm")
        return out

    ref_t = transform(ref_vec)
    values = tuple(cosine_similarity(transform(v), ref_t) for v in vectors)
    return TrajectorySeries(
        space="full" if space is None else "subspace",
        reference=ref_name,
        values=values,
    )


def group_heatmap(items: list[Embedding], grouping: str = "group",
                  space: CorpusSubspace | None = None) -> HeatmapData:
    """Item-level pairwise cosine matrix ordered by group, optionally after
    projecting every item onto a subspace."""
    if len(items) < 2:
        raise SchemaError("need at least 2 items")
    tagged = [(tag_value(item, grouping), item) for item in items]
    tagged.sort(key=lambda pair: pair[0])
    vectors = []
    for _, item in tagged:
        v = np.asarray(item.vector, dtype=float)
        if space is not None:
            v = project(space, v)
            if np.linalg.norm(v) < 1e-12:
                raise DegenerateDirection(f"item {item.id!r} projects to zero")
        vectors.append(v)
    n = len(vectors)
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            matrix[i, j] = cosine_similarity(vectors[i], vectors[j]) if i != j else 1.0
    return HeatmapData(
        ids=tuple(item.id for _, item in tagged),
        groups=tuple(g for g, _ in tagged),
        matrix=matrix,
    )
