"""Deterministic synthetic bundles used by the analysis and optimizer tests.

Recipes are versioned and frozen: downstream expected values are computed
against these exact constructions, so any change here is breaking.

Recipe catalog (all dim=16, seeded PCG64):

* two_modality_clusters: an "image" cluster around one axis and a "text"
  cluster around an orthogonal axis, noise scale 0.15. Items carry
  ``modality=...`` and ``group=...`` tags.
* attribute_trajectory: frames f_t = normalize(a + 0.25*t*v) for t=0..9,
  where v lies in the attribute plane span(e0, e1) and a is mostly outside
  it (in-plane component 0.15). Basis prompts for the plane are included as
  text items tagged ``role=basis``; a text reference aligned with v is
  tagged ``role=text_ref``.
* grouped_attributes: four groups sharing axis components e0..e3 (weight
  0.8) plus per-item noise (weight 0.6) confined to coordinates 4..15.
  Axis basis prompts tagged ``role=basis``; one probe image
  (``role=image``) and one target text (``role=target``) for the
  double-projection ablation.
* pae_triples: five (image, text, ideal-target) triples over the subspace
  span(e0, e1, e2). The ideal target is constructed as the exact
  plus-augmentation output at alpha=1, so the gs+plus operator passes both
  selection criteria there by construction.
"""
from __future__ import annotations

import numpy as np

from .augmentation import aug_plus
from .embeddings import Embedding, EmbeddingBundle, normalize
from .errors import UnknownRecipe
from .subspace import build_gs, project

DIM = 16

RECIPES = (
    "two_modality_clusters",
    "attribute_trajectory",
    "grouped_attributes",
    "pae_triples",
)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _axis(i: int) -> np.ndarray:
    v = np.zeros(DIM)
    v[i] = 1.0
    return v


def _two_modality_clusters(seed: int) -> EmbeddingBundle:
    rng = _rng(seed)
    image_center = _axis(0)
    text_center = _axis(1)
    items = []
    for i in range(8):
        vec = normalize(image_center + 0.15 * rng.standard_normal(DIM))
        items.append(Embedding(
            id=f"img_{i:02d}", kind="image", label=f"image {i}",
            vector=vec, tags=("modality=image", "group=image"),
        ))
    for i in range(8):
        vec = normalize(text_center + 0.15 * rng.standard_normal(DIM))
        items.append(Embedding(
            id=f"txt_{i:02d}", kind="text", label=f"text {i}",
            vector=vec, tags=("modality=text", "group=text"),
        ))
    return EmbeddingBundle(dim=DIM, items=tuple(items))


def _attribute_trajectory(seed: int) -> EmbeddingBundle:
    del seed  # construction is fully deterministic
    v = _axis(1)  # attribute direction, inside the plane
    a = normalize(0.15 * _axis(0) + _axis(2))  # start point, mostly outside
    items = [
        Embedding(id="basis_0", kind="text", label="attribute axis 0",
                  vector=_axis(0), tags=("role=basis",)),
        Embedding(id="basis_1", kind="text", label="attribute axis 1",
                  vector=_axis(1), tags=("role=basis",)),
        Embedding(id="text_ref", kind="text", label="attribute reference",
                  vector=v, tags=("role=text_ref",)),
    ]
    for t in range(10):
        frame = normalize(a + 0.25 * t * v)
        items.append(Embedding(
            id=f"frame_{t:02d}", kind="image", label=f"frame {t}",
            vector=frame, tags=("role=frame",),
        ))
    return EmbeddingBundle(dim=DIM, items=tuple(items))


def _grouped_attributes(seed: int) -> EmbeddingBundle:
    rng = _rng(seed)
    items = [
        Embedding(id=f"basis_{i}", kind="text", label=f"group axis {i}",
                  vector=_axis(i), tags=("role=basis",))
        for i in range(4)
    ]
    for g in range(4):
        for i in range(5):
            noise = np.zeros(DIM)
            noise[4:] = rng.standard_normal(DIM - 4)
            vec = normalize(0.8 * _axis(g) + 0.6 * normalize(noise))
            items.append(Embedding(
                id=f"g{g}_item{i}", kind="text", label=f"group {g} member {i}",
                vector=vec, tags=(f"group=g{g}", "role=member"),
            ))
    probe_noise = np.zeros(DIM)
    probe_noise[4:] = rng.standard_normal(DIM - 4)
    items.append(Embedding(
        id="img_probe", kind="image", label="probe image",
        vector=normalize(0.7 * _axis(0) + 0.7 * normalize(probe_noise)),
        tags=("role=image",),
    ))
    items.append(Embedding(
        id="txt_target", kind="text", label="target text",
        vector=normalize(_axis(2) + 0.1 * _axis(0)),
        tags=("role=target",),
    ))
    return EmbeddingBundle(dim=DIM, items=tuple(items))


def _pae_triples(seed: int) -> EmbeddingBundle:
    rng = _rng(seed)
    basis_items = [
        Embedding(id=f"basis_{i}", kind="text", label=f"attribute axis {i}",
                  vector=_axis(i), tags=("role=basis",))
        for i in range(3)
    ]
    s = build_gs(basis_items)
    items = list(basis_items)
    for t in range(5):
        c = rng.uniform(0.2, 0.6, size=3)
        w = c[0] * _axis(0) + c[1] * _axis(1) + c[2] * _axis(2)
        r_dir = np.zeros(DIM)
        r_dir[3:] = rng.standard_normal(DIM - 3)
        r = 0.8 * normalize(r_dir)
        e_I = normalize(w + r)

        k = t % 3
        q_dir = np.zeros(DIM)
        q_dir[3:] = rng.standard_normal(DIM - 3)
        # keep the text's out-of-plane part orthogonal to the residual so a
        # naive-text optimum cannot accidentally reproduce the residual
        q_dir -= (q_dir @ r_dir) / (r_dir @ r_dir) * r_dir
        e_T = normalize(0.95 * _axis(k) + 0.3 * normalize(q_dir))

        w_n = project(s, e_I)
        r_n = e_I - w_n
        e_It = normalize(aug_plus(s, w_n, normalize(e_T), 1.0) + r_n)

        items.append(Embedding(id=f"triple{t}_image", kind="image",
                               label=f"triple {t} original image", vector=e_I,
                               tags=(f"triple={t}", "role=image")))
        items.append(Embedding(id=f"triple{t}_text", kind="text",
                               label=f"triple {t} prompt", vector=e_T,
                               tags=(f"triple={t}", "role=text")))
        items.append(Embedding(id=f"triple{t}_target", kind="image",
                               label=f"triple {t} ideal target", vector=e_It,
                               tags=(f"triple={t}", "role=target")))
    return EmbeddingBundle(dim=DIM, items=tuple(items))


_BUILDERS = {
    "two_modality_clusters": _two_modality_clusters,
    "attribute_trajectory": _attribute_trajectory,
    "grouped_attributes": _grouped_attributes,
    "pae_triples": _pae_triples,
}


def make_synthetic_fixture(recipe: str, seed: int) -> EmbeddingBundle:
    """Build one of the documented fixture bundles, deterministic per seed."""
    try:
        builder = _BUILDERS[recipe]
    except KeyError:
        raise UnknownRecipe(
            f"unknown recipe {recipe!r}; known: {', '.join(RECIPES)}"
        ) from None
    return builder(seed)


def fixture_basis_items(bundle: EmbeddingBundle) -> list[Embedding]:
    """Items tagged role=basis, in bundle order."""
    return [item for item in bundle.items if "role=basis" in item.tags]


def fixture_triples(bundle: EmbeddingBundle):
    """(image, text, ideal target) triples from a pae_triples bundle."""
    by_triple: dict[str, dict[str, Embedding]] = {}
    for item in bundle.items:
        triple = next((t.split("=", 1)[1] for t in item.tags if t.startswith("triple=")), None)
        role = next((t.split("=", 1)[1] for t in item.tags if t.startswith("role=")), None)
        if triple is not None and role is not None:
            by_triple.setdefault(triple, {})[role] = item
    out = []
    for key in sorted(by_triple, key=int):
        roles = by_triple[key]
        out.append((roles["image"], roles["text"], roles["target"]))
    return out
