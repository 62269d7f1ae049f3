from .export import (
    DEFAULT_MODEL,
    ClipEncoder,
    EncodeError,
    ExporterError,
    ExportManifest,
    ManifestError,
    ModelLoadError,
    collect_images,
    export,
    read_text_manifest,
)

__version__ = "0.1.0"
