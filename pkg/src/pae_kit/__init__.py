"""pae_kit: projection-augmentation embeddings over a joint image/text space.

Corpus-subspace construction, augmentation operators, target-selection
criteria, a latent-optimization harness, and embedding-space analysis
utilities, all over a single JSON bundle format.
"""

from . import errors
from .analysis import (
    HeatmapData,
    SimilarityMatrix,
    TrajectorySeries,
    group_heatmap,
    pca2d,
    similarity_matrix,
    trajectory_similarity,
)
from .augmentation import (
    AugKind,
    aug_exchange,
    aug_exchange_distinct,
    aug_plus,
    aug_simple,
)
from .embeddings import (
    Embedding,
    EmbeddingBundle,
    cosine_similarity,
    load_bundle,
    normalize,
    save_bundle,
)
from .fixtures import fixture_basis_items, fixture_triples, make_synthetic_fixture
from .optimizer import (
    Generator,
    LossSpec,
    OptimizationTrace,
    finite_diff_check,
    loss_value_and_grad,
    make_generator,
    optimize,
)
from .pae import (
    CriteriaReport,
    PaeConfig,
    alpha_sweep,
    compute_dpe_targets,
    compute_pae,
    evaluate_criteria,
)
from .subspace import (
    CorpusSubspace,
    ManifoldSet,
    build_gs,
    build_pca,
    build_raw,
    build_sample_set,
    coefficients,
    load_subspace,
    project,
    project_all,
    save_subspace,
)

__version__ = "0.1.0"
