import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", deadline=None)
settings.load_profile("ci")

from pae_kit import AugKind, Embedding, PaeConfig, build_gs


def text_emb(id_, vector, label=None, tags=()):
    return Embedding(id=id_, kind="text", label=label or id_,
                     vector=np.asarray(vector, dtype=float), tags=tags)


def image_emb(id_, vector, label=None, tags=()):
    return Embedding(id=id_, kind="image", label=label or id_,
                     vector=np.asarray(vector, dtype=float), tags=tags)


@pytest.fixture
def r3_subspace():
    """Orthonormal basis {e1, e2} of the xy-plane in R^3."""
    return build_gs([text_emb("p0", [1, 0, 0]), text_emb("p1", [0, 1, 0])])


@pytest.fixture
def r3_plus_config(r3_subspace):
    return PaeConfig("gs", r3_subspace, AugKind("plus", 1.0))


def random_unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)
