"""End-to-end rendering of example directories into embeddable artifacts.

An example unit is a directory holding the annotated source (main.rs) and
the event specification (events.evspec). Rendering parses both, validates
the events against the borrow rules, compiles the timelines and writes
vis_code.svg, vis_timeline.svg and embed.html next to the inputs (or into
--out-dir). Writes are atomic (temp file + rename) and nothing is written
at all when any stage fails, so stale outputs never mix with new ones.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import dsl, svg, timeline, validator
from .errors import OwnvizError
from .source import parse_annotated_source

SOURCE_FILENAME = "main.rs"
SPEC_FILENAME = "events.evspec"
CODE_SVG_NAME = "vis_code.svg"
TIMELINE_SVG_NAME = "vis_timeline.svg"
EMBED_NAME = "embed.html"
RUNTIME_SCRIPT_NAME = "ownviz-hover.js"

_EXAMPLE_NAME_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*\Z")


class MissingInput(OwnvizError):
    def __init__(self, path: Path):
        super().__init__(f"missing input file: {path}")
        self.path = path


class InvalidName(OwnvizError):
    pass


class ValidationFailure(OwnvizError):
    def __init__(self, report: validator.ValidationReport):
        super().__init__("event log violates the ownership and borrowing rules")
        self.report = report


@dataclass
class ExampleReport:
    directory: Path
    ok: bool
    files_written: list[Path] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def emit_embed_snippet(example_name: str) -> str:
    """HTML fragment embedding the two SVGs plus one runtime script load.

    The fragment works without the runtime: the SVGs carry native <title>
    tooltips. Browsers load module scripts once per URL, so repeating the
    fragment on a page still initializes the runtime a single time.
    """
    if not _EXAMPLE_NAME_RE.match(example_name) or ".." in example_name:
        raise InvalidName(f"example name {example_name!r} is not a safe identifier")
    return (
        f'<div class="ownviz-example" data-example="{example_name}">\n'
        f'  <object class="ownviz-panel ownviz-code" type="image/svg+xml"\n'
        f'          data="{CODE_SVG_NAME}" role="img"\n'
        f'          aria-label="annotated source for {example_name}"></object>\n'
        f'  <object class="ownviz-panel ownviz-timeline" type="image/svg+xml"\n'
        f'          data="{TIMELINE_SVG_NAME}" role="img"\n'
        f'          aria-label="ownership timeline for {example_name}"></object>\n'
        f"</div>\n"
        f'<script type="module" src="{RUNTIME_SCRIPT_NAME}"></script>\n'
    )


def _atomic_write(path: Path, text: str) -> None:
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.", delete=False
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        os.unlink(handle.name)
        raise


def render_example(
    directory: str | Path,
    *,
    out_dir: str | Path | None = None,
    lenient: bool = False,
    theme: svg.Theme | None = None,
    check_only: bool = False,
) -> ExampleReport:
    """Run the full pipeline for one example directory.

    Strict mode (the default) refuses to render logs that break the borrow
    rules by raising ValidationFailure; lenient mode demotes violations to
    warnings on the report. ``check_only`` stops after validation.
    """
    directory = Path(directory)
    source_path = directory / SOURCE_FILENAME
    spec_path = directory / SPEC_FILENAME
    for path in (source_path, spec_path):
        if not path.is_file():
            raise MissingInput(path)

    declarations, log = dsl.parse_spec(spec_path.read_text(encoding="utf-8"))
    listing = parse_annotated_source(source_path.read_text(encoding="utf-8"))
    for hash_, line in listing.referenced_hashes():
        if hash_ not in log.declarations:
            raise svg.UnknownHashInSource(hash_, line)

    report = validator.validate(log)
    if not report.ok and not lenient:
        raise ValidationFailure(report)

    result = ExampleReport(directory=directory, ok=report.ok, warnings=report.diagnostics())
    if check_only:
        return result

    panel = timeline.compile_timelines(log, lenient=lenient)
    lay = svg.layout(panel, listing, theme)
    document = svg.RenderedDocument(
        code_svg=svg.render_code_panel(listing, lay, log),
        timeline_svg=svg.render_timeline_panel(panel, lay, log),
        embed_html=emit_embed_snippet(directory.resolve().name),
    )

    target = Path(out_dir) if out_dir is not None else directory
    target.mkdir(parents=True, exist_ok=True)
    for name, text in (
        (CODE_SVG_NAME, document.code_svg),
        (TIMELINE_SVG_NAME, document.timeline_svg),
        (EMBED_NAME, document.embed_html),
    ):
        path = target / name
        _atomic_write(path, text)
        result.files_written.append(path)
    return result


def iter_example_dirs(root: str | Path) -> list[Path]:
    """Example directories under a root, in sorted order."""
    root = Path(root)
    return sorted(
        child
        for child in root.iterdir()
        if child.is_dir()
        and (child / SOURCE_FILENAME).is_file()
        and (child / SPEC_FILENAME).is_file()
    )
