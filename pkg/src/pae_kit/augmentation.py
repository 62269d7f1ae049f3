"""Augmentation operators: push a projected image embedding toward a text.

Four variants: a plain additive one, the coefficient-sum-preserving one,
and two exchange forms over a manifold sample set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import cosine_similarity
from .errors import (
    AlphaExceedsCorpus,
    DimMismatch,
    NullTextProjection,
    SchemaError,
    SubspaceViolation,
)
from .subspace import CorpusSubspace, ManifoldSet, coefficients, project

AUG_KINDS = ("simple", "plus", "exchange", "exchange_distinct")


@dataclass(frozen=True)
class AugKind:
    """Augmentation variant plus its augmenting power alpha."""

    kind: str
    alpha: float

    def __post_init__(self):
        if self.kind not in AUG_KINDS:
            raise SchemaError(f"unknown augmentation kind {self.kind!r}")
        if self.alpha < 0:
            raise SchemaError(f"alpha must be non-negative, got {self.alpha}")
        if self.kind == "exchange_distinct":
            if self.alpha != int(self.alpha) or self.alpha < 1:
                raise SchemaError(
                    "exchange_distinct requires a positive integer alpha; "
                    f"got {self.alpha}"
                )


def _check_dims(*vectors) -> None:
    shapes = {np.asarray(v).shape for v in vectors}
    if len(shapes) != 1:
        raise DimMismatch(f"operand shapes differ: {sorted(shapes)}")


def aug_simple(w, e_T, alpha: float) -> np.ndarray:
    """w + alpha * e_T."""
    w = np.asarray(w, dtype=float)
    e_T = np.asarray(e_T, dtype=float)
    _check_dims(w, e_T)
    return w + alpha * e_T


def aug_plus(s: CorpusSubspace, w, e_T, alpha: float) -> np.ndarray:
    """Weaken every component of w and add back the projected text, scaled so
    the basis-coefficient sum of w is preserved.

    Result: sum_k (c_k - alpha*|c_k|) b_k + (alpha * sum|c_k| / sum d_k) * Proj(e_T).
    """
    w = np.asarray(w, dtype=float)
    e_T = np.asarray(e_T, dtype=float)
    if w.shape != (s.dim,) or e_T.shape != (s.dim,):
        raise DimMismatch("operands must match the subspace dimension")
    # least-squares span check works for raw bases too, where the
    # dot-product projector is not idempotent
    coeff, *_ = np.linalg.lstsq(s.basis.T, w, rcond=None)
    if np.linalg.norm(s.basis.T @ coeff - w) >= 1e-6 * max(1.0, np.linalg.norm(w)):
        raise SubspaceViolation("w does not lie in the subspace span")
    if alpha == 0:
        # exact identity; skips the Sum(d_k) division entirely
        return w.copy()
    c = coefficients(s, w)
    proj_text = project(s, e_T)
    d = coefficients(s, proj_text)
    d_sum = float(np.sum(d))
    if abs(d_sum) < 1e-9:
        raise NullTextProjection("projected text coefficients sum to ~0")
    weakened = s.basis.T @ (c - alpha * np.abs(c))
    return weakened + (alpha * float(np.sum(np.abs(c))) / d_sum) * proj_text


def aug_exchange(w, e_T, nearest, alpha: float) -> np.ndarray:
    """One-for-one exchange: w + alpha * (e_T - nearest)."""
    w = np.asarray(w, dtype=float)
    e_T = np.asarray(e_T, dtype=float)
    nearest = np.asarray(nearest, dtype=float)
    _check_dims(w, e_T, nearest)
    return w + alpha * (e_T - nearest)


def aug_exchange_distinct(m: ManifoldSet, w, e_I, e_T, alpha: int) -> np.ndarray:
    """One-for-alpha exchange: add alpha copies of e_T, subtract the alpha
    distinct members most similar to e_I, each exactly once.

    Similarity ties break by member storage order.
    """
    if alpha != int(alpha) or alpha < 1:
        raise SchemaError(f"exchange_distinct requires a positive integer alpha, got {alpha}")
    alpha = int(alpha)
    if alpha > len(m):
        raise AlphaExceedsCorpus(f"alpha={alpha} exceeds corpus size {len(m)}")
    w = np.asarray(w, dtype=float)
    e_I = np.asarray(e_I, dtype=float)
    e_T = np.asarray(e_T, dtype=float)
    _check_dims(w, e_I, e_T)
    if w.shape != (m.dim,):
        raise DimMismatch("operands must match the manifold dimension")
    sims = np.array([cosine_similarity(e_I, vec) for _, vec in m.members])
    # stable sort on negated sims keeps first-occurrence tie order
    top = np.argsort(-sims, kind="stable")[:alpha]
    out = w + alpha * e_T
    for idx in top:
        out = out - m.members[int(idx)][1]
    return out
