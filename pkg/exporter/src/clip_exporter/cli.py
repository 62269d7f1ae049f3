"""export-clip command line: encode images/texts into an embedding bundle."""
from __future__ import annotations

import sys

import click

from .export import (
    DEFAULT_MODEL,
    ExporterError,
    ExportManifest,
    collect_images,
    export,
    read_text_manifest,
)


@click.command()
@click.option("--model", default=DEFAULT_MODEL, show_default=True)
@click.option("--images", default=None,
              help="directory of images, or a comma-separated list of files")
@click.option("--texts", default=None, type=click.Path(exists=True),
              help="text file: one prompt per line, or TSV id<TAB>text")
@click.option("--out", required=True, type=click.Path())
def run(model, images, texts, out) -> None:
    """Encode inputs with a CLIP model and write a pae-kit bundle."""
    manifest = ExportManifest(
        model=model,
        images=collect_images(images) if images else (),
        texts=read_text_manifest(texts) if texts else (),
        out_path=out,
    )
    path = export(manifest)
    total = len(manifest.images) + len(manifest.texts)
    click.echo(f"wrote {total} embeddings to {path}")


def main(argv=None) -> int:
    try:
        run.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Exit as exc:
        return 0 if exc.exit_code == 0 else 1
    except ExporterError as exc:
        click.echo(f"{type(exc).__name__}: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
