"""Command-line entry point: ownviz render | check | batch."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import docgen, svg
from .errors import OwnvizError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ERROR = 2

THEME_ENV_VAR = "OWNVIZ_THEME"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ownviz",
        description="Render ownership and borrowing timeline visualizations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--theme", metavar="FILE", help=f"theme file (default: ${THEME_ENV_VAR})")
        p.add_argument(
            "--lenient",
            action="store_true",
            help="demote borrow-rule violations to warnings and render anyway",
        )

    render = sub.add_parser("render", help="render one example directory")
    render.add_argument("directory", type=Path)
    render.add_argument("--out-dir", type=Path, help="write outputs here instead of the example dir")
    render.add_argument("--check", action="store_true", help="validate only, write nothing")
    add_common(render)

    check = sub.add_parser("check", help="validate one example directory without rendering")
    check.add_argument("directory", type=Path)
    add_common(check)

    batch = sub.add_parser("batch", help="render every example directory under a root")
    batch.add_argument("root", type=Path)
    add_common(batch)
    return parser


def _load_theme(path_arg: str | None) -> svg.Theme | None:
    path = path_arg or os.environ.get(THEME_ENV_VAR)
    if not path:
        return None
    return svg.load_theme(path)


def _report_outcome(report: docgen.ExampleReport) -> None:
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path in report.files_written:
        print(f"wrote {path}")
    if not report.files_written and report.ok:
        print(f"ok {report.directory}")


def _run_one(directory: Path, args: argparse.Namespace, check_only: bool) -> int:
    try:
        report = docgen.render_example(
            directory,
            out_dir=getattr(args, "out_dir", None),
            lenient=args.lenient,
            theme=_load_theme(args.theme),
            check_only=check_only,
        )
    except docgen.ValidationFailure as failure:
        for diagnostic in failure.report.diagnostics():
            print(diagnostic, file=sys.stderr)
        return EXIT_VALIDATION
    except OwnvizError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR
    _report_outcome(report)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "render":
        return _run_one(args.directory, args, check_only=args.check)
    if args.command == "check":
        return _run_one(args.directory, args, check_only=True)

    # batch: keep going after failures, report the worst outcome
    directories = docgen.iter_example_dirs(args.root)
    if not directories:
        print(f"error: no example directories under {args.root}", file=sys.stderr)
        return EXIT_ERROR
    worst = EXIT_OK
    for directory in directories:
        print(f"-- {directory}")
        status = _run_one(directory, args, check_only=False)
        worst = max(worst, status)
    return worst


if __name__ == "__main__":
    sys.exit(main())
