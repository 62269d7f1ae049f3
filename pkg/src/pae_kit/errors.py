"""Exception hierarchy shared by all pae_kit modules.

Each error carries an ``exit_code`` so the CLI can map failures onto its
documented exit-code classes: 2 for data/validation problems, 3 for
numeric/degenerate conditions.
"""


class PaeKitError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


# --- data / validation errors (CLI exit code 2) ---

class ParseError(PaeKitError):
    """Input file is not valid JSON."""


class SchemaError(PaeKitError):
    """Input file parsed but violates the bundle schema."""


class VersionError(PaeKitError):
    """Unsupported format_version."""


class IoError(PaeKitError):
    """Filesystem read/write failure."""


class DimMismatch(PaeKitError):
    """Operands have incompatible dimensions."""


class KindMismatch(PaeKitError):
    """An embedding of the wrong modality was supplied."""


class MissingTag(PaeKitError):
    """An item lacks the tag required for grouping."""


class EmptyGroup(PaeKitError):
    """A similarity-matrix cell has no pairs to average."""


class AlphaExceedsCorpus(PaeKitError):
    """Integer augmenting power exceeds the manifold-set size."""


class UnknownRecipe(PaeKitError):
    """Requested synthetic-fixture recipe does not exist."""


class BadDims(PaeKitError):
    """Generator dimensions out of range."""


# --- numeric / degenerate errors (CLI exit code 3) ---

class NumericError(PaeKitError):
    exit_code = 3


class ZeroVector(NumericError):
    """A vector with (near-)zero norm where a direction is required."""


class DegenerateBasis(NumericError):
    """Gram-Schmidt residual collapsed; prompts are near-collinear."""


class RankDeficient(NumericError):
    """Corpus covariance rank is below the requested component count."""


class NullTextProjection(NumericError):
    """Projected text coefficients sum to ~0; augmentation would divide by it."""


class SubspaceViolation(NumericError):
    """A vector required to lie in the subspace does not."""


class DegenerateDirection(NumericError):
    """A cosine argument has vanishing norm."""
