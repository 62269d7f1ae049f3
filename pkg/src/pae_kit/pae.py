"""The projection-augmentation operator and its selection criteria.

Pipeline for one image/text pair: project the image embedding onto the
corpus subspace, augment the projected part toward the text, then add back
the untouched residual. Criteria compare the resulting vector against the
ideal-target embedding when one is available.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .augmentation import (
    AugKind,
    aug_exchange,
    aug_exchange_distinct,
    aug_plus,
    aug_simple,
)
from .embeddings import Embedding, cosine_similarity, normalize
from .errors import DimMismatch, KindMismatch, PaeKitError, SchemaError
from .subspace import CorpusSubspace, ManifoldSet, project, project_all

PROJECTION_KINDS = ("gs", "raw", "pca", "all")
_SUBSPACE_AUGS = ("simple", "plus")
_MANIFOLD_AUGS = ("exchange", "exchange_distinct")


@dataclass(frozen=True)
class PaeConfig:
    """Full recipe for one operator: projection x augmentation x alpha."""

    projection: str
    space: CorpusSubspace | ManifoldSet
    augmentation: AugKind
    normalize_inputs: bool = True

    def __post_init__(self):
        if self.projection not in PROJECTION_KINDS:
            raise SchemaError(f"unknown projection {self.projection!r}")
        if self.projection == "all":
            if not isinstance(self.space, ManifoldSet):
                raise SchemaError("projection 'all' requires a ManifoldSet")
            if self.augmentation.kind not in _MANIFOLD_AUGS:
                raise SchemaError(
                    f"projection 'all' only pairs with {_MANIFOLD_AUGS}, "
                    f"got {self.augmentation.kind!r}"
                )
        else:
            if not isinstance(self.space, CorpusSubspace):
                raise SchemaError(f"projection {self.projection!r} requires a CorpusSubspace")
            if self.augmentation.kind not in _SUBSPACE_AUGS:
                raise SchemaError(
                    f"projection {self.projection!r} only pairs with {_SUBSPACE_AUGS}, "
                    f"got {self.augmentation.kind!r}"
                )

    @property
    def config_id(self) -> str:
        return f"{self.projection}+{self.augmentation.kind}"

    def with_alpha(self, alpha: float) -> "PaeConfig":
        return replace(self, augmentation=AugKind(self.augmentation.kind, alpha))


@dataclass(frozen=True)
class CriteriaReport:
    """Cosines and pass flags for the two target-selection criteria."""

    sim_pae_target: float
    sim_text_target: float
    sim_pae_original: float
    criterion1_pass: bool
    criterion2_pass: bool


def _as_vector(e, expected_kind: str | None = None) -> np.ndarray:
    if isinstance(e, Embedding):
        if expected_kind is not None and e.kind != expected_kind:
            raise KindMismatch(f"embedding {e.id!r} has kind {e.kind!r}, expected {expected_kind!r}")
        return np.asarray(e.vector, dtype=float)
    return np.asarray(e, dtype=float)


def compute_pae(cfg: PaeConfig, e_I, e_T) -> np.ndarray:
    """Project, augment, add back the residual. Output is not renormalized."""
    v_I = _as_vector(e_I, "image")
    v_T = _as_vector(e_T, "text")
    if v_I.shape != v_T.shape or v_I.shape != (cfg.space.dim,):
        raise DimMismatch("image/text dims must match the configured space")
    if cfg.normalize_inputs:
        v_I = normalize(v_I)
        v_T = normalize(v_T)
    alpha = cfg.augmentation.alpha

    if cfg.projection == "all":
        m: ManifoldSet = cfg.space
        _, nearest = project_all(m, v_I)
        w = nearest
        r = v_I - w
        if cfg.augmentation.kind == "exchange":
            augmented = aug_exchange(w, v_T, nearest, alpha)
        else:
            augmented = aug_exchange_distinct(m, w, v_I, v_T, int(alpha))
        return augmented + r

    s: CorpusSubspace = cfg.space
    w = project(s, v_I)
    r = v_I - w
    if cfg.augmentation.kind == "simple":
        augmented = aug_simple(w, v_T, alpha)
    else:
        augmented = aug_plus(s, w, v_T, alpha)
    return augmented + r


def compute_dpe_targets(s: CorpusSubspace, e_I, e_T) -> tuple[np.ndarray, np.ndarray]:
    """The double-projection ablation: both embeddings projected, no residual."""
    v_I = _as_vector(e_I)
    v_T = _as_vector(e_T)
    if v_I.shape != (s.dim,) or v_T.shape != (s.dim,):
        raise DimMismatch("dims must match the subspace")
    return project(s, v_I), project(s, v_T)


def evaluate_criteria(cfg: PaeConfig, e_I, e_T, e_It) -> CriteriaReport:
    """Score one operator against the ideal-target embedding.

    Criterion 1: the operator output beats the bare text as an approximation
    of the target. Criterion 2: it is closer to the target than to the
    original image, so optimization has somewhere to go.
    """
    v_I = normalize(_as_vector(e_I, "image"))
    v_T = normalize(_as_vector(e_T, "text"))
    v_It = normalize(_as_vector(e_It, "image"))
    pae = compute_pae(cfg, v_I, v_T)
    sim_pae_target = cosine_similarity(pae, v_It)
    sim_text_target = cosine_similarity(v_T, v_It)
    sim_pae_original = cosine_similarity(pae, v_I)
    return CriteriaReport(
        sim_pae_target=sim_pae_target,
        sim_text_target=sim_text_target,
        sim_pae_original=sim_pae_original,
        criterion1_pass=sim_pae_target > sim_text_target,
        criterion2_pass=sim_pae_target > sim_pae_original,
    )


@dataclass(frozen=True)
class SweepRow:
    config_id: str
    alpha: float
    mean_sim_pae_target: float
    mean_sim_text_target: float
    mean_sim_pae_original: float
    criterion1: bool
    criterion2: bool
    n_triples: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    # (config_id, alpha, triple index, error message) for cells that failed
    skipped: tuple[tuple[str, float, int, str], ...]
    # per config_id: alphas where both criteria hold on average
    passing_alphas: dict[str, tuple[float, ...]] = field(default_factory=dict)


def alpha_sweep(cfgs: list[PaeConfig], alphas: list[float], triples) -> SweepResult:
    """Evaluate each (config, alpha) cell averaged over (e_I, e_T, e_It) triples.

    Triples that raise (e.g. a text orthogonal to the subspace) are skipped
    and reported, never silently dropped.
    """
    if not cfgs or not alphas or not triples:
        raise SchemaError("cfgs, alphas, and triples must all be non-empty")
    rows = []
    skipped = []
    passing: dict[str, list[float]] = {}
    for cfg in cfgs:
        for alpha in alphas:
            cfg_a = cfg.with_alpha(alpha)
            reports = []
            for i, (e_I, e_T, e_It) in enumerate(triples):
                try:
                    reports.append(evaluate_criteria(cfg_a, e_I, e_T, e_It))
                except PaeKitError as exc:
                    skipped.append((cfg.config_id, alpha, i, f"{type(exc).__name__}: {exc}"))
            if not reports:
                continue
            mean_pt = float(np.mean([r.sim_pae_target for r in reports]))
            mean_tt = float(np.mean([r.sim_text_target for r in reports]))
            mean_po = float(np.mean([r.sim_pae_original for r in reports]))
            c1 = mean_pt > mean_tt
            c2 = mean_pt > mean_po
            rows.append(
                SweepRow(cfg.config_id, alpha, mean_pt, mean_tt, mean_po, c1, c2, len(reports))
            )
            if c1 and c2:
                passing.setdefault(cfg.config_id, []).append(alpha)
    return SweepResult(
        rows=tuple(sorted(rows, key=lambda r: (r.config_id, r.alpha))),
        skipped=tuple(skipped),
        passing_alphas={k: tuple(sorted(v)) for k, v in passing.items()},
    )


def sweep_rows_to_csv(result: SweepResult) -> str:
    lines = [
        "config_id,alpha,mean_sim_pae_target,mean_sim_text_target,"
        "mean_sim_pae_original,criterion1,criterion2"
    ]
    for r in result.rows:
        lines.append(
            f"{r.config_id},{r.alpha:.10g},{r.mean_sim_pae_target:.10g},"
            f"{r.mean_sim_text_target:.10g},{r.mean_sim_pae_original:.10g},"
            f"{str(r.criterion1).lower()},{str(r.criterion2).lower()}"
        )
    return "\n".join(lines) + "\n"
