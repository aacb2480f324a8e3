"""Deterministic SVG rendering of timeline panels and annotated code.

Both panels share one vertical metric: the row for source line n sits at
y = header_height + (n - 0.5) * line_height in either document, so the
timeline reads against the code when the two are placed side by side.
All coordinates are formatted with exactly two decimals and elements are
emitted in a fixed order, which makes output byte-stable for equal inputs.

Interactive elements carry data-hash/data-hover attributes for the hover
runtime and a nested <title> so plain SVG viewers still show the messages.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .errors import OwnvizError
from .events import EventLog, RapKind
from .source import AnnotatedListing
from .timeline import ElementKind, Style, TimelineElement, TimelinePanel

SVG_NS = "http://www.w3.org/2000/svg"


class LineCountMismatch(OwnvizError):
    def __init__(self, panel_lines: int, listing_lines: int):
        super().__init__(
            f"timeline needs {panel_lines} source lines but the listing has {listing_lines}"
        )


class UnknownHashInSource(OwnvizError):
    def __init__(self, hash_: int, line: int):
        super().__init__(f"line {line}: annotated hash {hash_} is not declared in the event log")
        self.hash = hash_
        self.line = line


class ThemeError(OwnvizError):
    pass


DEFAULT_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#e377c2",
)


@dataclass(frozen=True)
class Theme:
    """Rendering metrics and colors; every value can come from a theme file."""

    line_height: float = 30.0
    header_height: float = 40.0
    dot_radius: float = 5.0
    column_gap: float = 90.0
    curve_extra: float = 30.0  # extra column width reserved for access curves
    curve_dx: float = 24.0  # curve track offset right of the column spine
    curve_bulge: float = 14.0
    segment_width: float = 4.0
    curve_stroke: float = 2.0
    arrow_stroke: float = 1.8
    arrow_head_length: float = 8.0
    arrow_head_width: float = 7.0
    arrow_stack_dy: float = 5.0
    fn_label_dx: float = 64.0  # gap between a column spine and a function label
    side_margin: float = 150.0  # room for function labels left/right of columns
    font_size: float = 14.0
    char_width: float = 8.4
    gutter_width: float = 34.0
    bottom_pad: float = 12.0
    font_family: str = "Menlo, Consolas, monospace"
    background: str = "#ffffff"
    hollow_opacity: float = 0.5
    function_color: str = "#777777"
    arrow_color: str = "#555555"
    text_color: str = "#1a1a1a"
    palette: tuple[str, ...] = DEFAULT_PALETTE


def load_theme(path: str | Path, base: Theme | None = None) -> Theme:
    """Read "key = value" overrides over the default theme.

    Unknown keys and unparseable values fail loudly. Lines starting with
    "#" are comments (full-line only: values may contain hex colors). The
    palette is given as a comma-separated color list.
    """
    theme = base or Theme()
    known = {f.name: f.type for f in fields(Theme)}
    overrides: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ThemeError(f"{path}: line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ThemeError(f"{path}: line {lineno}: unknown theme key {key!r}")
        if key == "palette":
            overrides[key] = tuple(c.strip() for c in value.split(",") if c.strip())
        elif known[key] == "float":
            try:
                overrides[key] = float(value)
            except ValueError:
                raise ThemeError(f"{path}: line {lineno}: {key} needs a number") from None
        else:
            overrides[key] = value
    return replace(theme, **overrides)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


@dataclass(frozen=True)
class Layout:
    """Resolved geometry shared by the two panels."""

    theme: Theme
    rows: int
    column_x: dict[int, float]
    column_width: dict[int, float]
    curve_x: dict[int, float]
    palette: dict[int, str]
    timeline_width: float
    code_width: float
    height: float
    code_x: float

    def y_for_line(self, line: int) -> float:
        return self.theme.header_height + (line - 0.5) * self.theme.line_height


def layout(
    panel: TimelinePanel,
    listing: AnnotatedListing | None = None,
    theme: Theme | None = None,
) -> Layout:
    """Position columns and rows for a panel and its source listing.

    The listing may run past the last event line (trailing braces render as
    plain rows) but must not be shorter than the timeline.
    """
    theme = theme or Theme()
    rows = panel.last_line
    code_chars = 1
    if listing is not None:
        if panel.last_line > listing.line_count:
            raise LineCountMismatch(panel.last_line, listing.line_count)
        rows = listing.line_count
        code_chars = max(
            (sum(len(s.text) for s in spans) for spans in listing.lines), default=1
        )

    column_x: dict[int, float] = {}
    column_width: dict[int, float] = {}
    curve_x: dict[int, float] = {}
    cursor = theme.side_margin
    for rap, _ in panel.columns:
        column_x[rap.hash] = cursor
        width = theme.column_gap
        if rap.kind.is_reference:
            width += theme.curve_extra
            curve_x[rap.hash] = cursor + theme.curve_dx
        column_width[rap.hash] = width
        cursor += width

    palette: dict[int, str] = {}
    variable_hashes = {rap.hash for rap, _ in panel.columns}
    for index, hash_ in enumerate(sorted(variable_hashes)):
        palette[hash_] = theme.palette[index % len(theme.palette)]

    code_x = theme.gutter_width + 12.0
    return Layout(
        theme=theme,
        rows=rows,
        column_x=column_x,
        column_width=column_width,
        curve_x=curve_x,
        palette=palette,
        timeline_width=cursor - theme.column_gap + theme.side_margin if panel.columns else 2 * theme.side_margin,
        code_width=code_x + code_chars * theme.char_width + 16.0,
        height=theme.header_height + rows * theme.line_height + theme.bottom_pad,
        code_x=code_x,
    )


def _svg_open(width: float, height: float, theme: Theme, css_class: str) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="{SVG_NS}" class={quoteattr(css_class)} '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
        f"font-family={quoteattr(theme.font_family)} font-size=\"{_fmt(theme.font_size)}\">"
    )


def _interactive(hash_: int, hover: str) -> str:
    return f"data-hash=\"{hash_}\" data-hover={quoteattr(hover)}"


def _title(hover: str) -> str:
    return f"<title>{escape(hover)}</title>"


def _render_dot(e: TimelineElement, lay: Layout, color: str) -> str:
    cx = lay.column_x[e.column]
    cy = lay.y_for_line(e.line_start)
    return (
        f'<circle class="dot" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(lay.theme.dot_radius)}" '
        f'fill="{color}" {_interactive(e.column, e.hover)}>{_title(e.hover)}</circle>'
    )


def _render_segment(e: TimelineElement, lay: Layout, color: str) -> str:
    t = lay.theme
    x = lay.column_x[e.column] - t.segment_width / 2
    y1 = lay.y_for_line(e.line_start)
    y2 = lay.y_for_line(e.line_end)
    if e.style is Style.SOLID:
        paint = f'fill="{color}" fill-opacity="1.00"'
        cls = "segment solid"
    else:
        paint = (
            f'fill="{t.background}" stroke="{color}" '
            f'stroke-opacity="{_fmt(t.hollow_opacity)}" stroke-width="1.50"'
        )
        cls = "segment hollow"
    return (
        f'<rect class="{cls}" x="{_fmt(x)}" y="{_fmt(y1)}" '
        f'width="{_fmt(t.segment_width)}" height="{_fmt(y2 - y1)}" {paint} '
        f"{_interactive(e.column, e.hover)}>{_title(e.hover)}</rect>"
    )


def _render_curve(e: TimelineElement, lay: Layout, color: str) -> str:
    t = lay.theme
    x = lay.curve_x[e.column]
    y1 = lay.y_for_line(e.line_start)
    y2 = lay.y_for_line(e.line_end)
    bulge = x + t.curve_bulge
    third = (y2 - y1) / 3
    d = (
        f"M {_fmt(x)},{_fmt(y1)} "
        f"C {_fmt(bulge)},{_fmt(y1 + third)} {_fmt(bulge)},{_fmt(y2 - third)} "
        f"{_fmt(x)},{_fmt(y2)}"
    )
    opacity = "1.00" if e.style is Style.SOLID else _fmt(t.hollow_opacity)
    cls = "curve solid" if e.style is Style.SOLID else "curve hollow"
    return (
        f'<path class="{cls}" d="{d}" fill="none" stroke="{color}" '
        f'stroke-width="{_fmt(t.curve_stroke)}" stroke-opacity="{opacity}" '
        f"{_interactive(e.column, e.hover)}>{_title(e.hover)}</path>"
    )


def _render_mark(e: TimelineElement, lay: Layout) -> str:
    x = lay.curve_x.get(e.column, lay.column_x[e.column])
    y = lay.y_for_line(e.line_start)
    return (
        f'<text class="fn-read" x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="middle" '
        f'dominant-baseline="central" font-style="italic" fill="{lay.theme.text_color}" '
        f"{_interactive(e.counterpart, e.hover)}>{_title(e.hover)}f</text>"
    )


def _render_arrow(
    e: TimelineElement,
    lay: Layout,
    stack_index: int,
    counterpart_is_fn: bool,
    counterpart_name: str | None,
) -> list[str]:
    t = lay.theme
    y = lay.y_for_line(e.line_start) + stack_index * t.arrow_stack_dy
    col_x = lay.column_x[e.column]
    edge = t.dot_radius + 2.0

    out: list[str] = []
    if counterpart_is_fn:
        if e.incoming:  # function produces: label left, arrow into the dot
            label_x = col_x - t.fn_label_dx
            x1, x2 = label_x + 6.0, col_x - edge
            anchor = "end"
        else:  # variable hands off: arrow from the dot out to the label
            label_x = col_x + t.fn_label_dx
            x1, x2 = col_x + edge, label_x - 6.0
            anchor = "start"
        data_hash = e.counterpart
    else:
        other_x = lay.column_x[e.counterpart]
        if e.incoming:
            x1, x2 = other_x + edge, col_x - edge
        else:
            x1, x2 = col_x + edge, other_x - edge
        data_hash = e.column if not e.incoming else e.counterpart
        label_x = None
        anchor = ""

    direction = 1.0 if x2 >= x1 else -1.0
    tip_x = x2
    base_x = x2 - direction * t.arrow_head_length
    half = t.arrow_head_width / 2
    points = (
        f"{_fmt(tip_x)},{_fmt(y)} {_fmt(base_x)},{_fmt(y - half)} {_fmt(base_x)},{_fmt(y + half)}"
    )
    out.append(
        f'<g class="arrow" {_interactive(data_hash, e.hover)}>{_title(e.hover)}'
        f'<line x1="{_fmt(x1)}" y1="{_fmt(y)}" x2="{_fmt(base_x)}" y2="{_fmt(y)}" '
        f'stroke="{t.arrow_color}" stroke-width="{_fmt(t.arrow_stroke)}"/>'
        f'<polygon class="arrowhead" points="{points}" fill="{t.arrow_color}"/></g>'
    )
    if counterpart_is_fn:
        out.append(
            f'<text class="fn-label" x="{_fmt(label_x)}" y="{_fmt(y)}" '
            f'text-anchor="{anchor}" dominant-baseline="central" '
            f'fill="{t.function_color}" {_interactive(e.counterpart, counterpart_name)}>'
            f"{_title(counterpart_name)}{escape(counterpart_name)}</text>"
        )
    return out


def render_timeline_panel(panel: TimelinePanel, lay: Layout, log: EventLog) -> str:
    """Emit the timeline SVG: headers, per-column elements, then arrows."""
    t = lay.theme
    parts = [_svg_open(lay.timeline_width, lay.height, t, "ownviz-timeline-svg")]

    header_y = t.header_height / 2
    parts.append('<g class="headers">')
    for rap, _ in panel.columns:
        x = lay.column_x[rap.hash]
        color = lay.palette[rap.hash]
        parts.append(
            f'<text class="header" x="{_fmt(x)}" y="{_fmt(header_y)}" text-anchor="middle" '
            f'dominant-baseline="central" fill="{color}" {_interactive(rap.hash, rap.name)}>'
            f"{_title(rap.name)}{escape(rap.name)}</text>"
        )
        if rap.kind.is_reference:
            deref = f"*{rap.name}"
            parts.append(
                f'<text class="header deref" x="{_fmt(lay.curve_x[rap.hash])}" '
                f'y="{_fmt(header_y)}" text-anchor="middle" dominant-baseline="central" '
                f'fill="{color}" {_interactive(rap.hash, deref)}>'
                f"{_title(deref)}{escape(deref)}</text>"
            )
    parts.append("</g>")

    arrows: list[TimelineElement] = []
    for rap, elements in panel.columns:
        color = lay.palette[rap.hash]
        parts.append(f'<g class="column" data-hash="{rap.hash}">')
        for kind in (ElementKind.SEGMENT, ElementKind.ACCESS_CURVE, ElementKind.FUNCTION_READ_MARK, ElementKind.DOT):
            for e in elements:
                if e.kind is not kind:
                    continue
                if kind is ElementKind.SEGMENT:
                    parts.append(_render_segment(e, lay, color))
                elif kind is ElementKind.ACCESS_CURVE:
                    parts.append(_render_curve(e, lay, color))
                elif kind is ElementKind.FUNCTION_READ_MARK:
                    parts.append(_render_mark(e, lay))
                else:
                    parts.append(_render_dot(e, lay, color))
        parts.append("</g>")
        arrows.extend(e for e in elements if e.kind is ElementKind.ARROW)

    arrows.sort(key=lambda e: (e.line_start, e.seq))
    parts.append('<g class="arrows">')
    stack_at_line: dict[int, int] = {}
    for e in arrows:
        index = stack_at_line.get(e.line_start, 0)
        stack_at_line[e.line_start] = index + 1
        counterpart = log.rap(e.counterpart)
        is_fn = counterpart.kind is RapKind.FUNCTION
        parts.extend(_render_arrow(e, lay, index, is_fn, counterpart.name if is_fn else None))
    parts.append("</g>")

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_code_panel(listing: AnnotatedListing, lay: Layout, log: EventLog) -> str:
    """Emit the annotated-code SVG with rows aligned to the timeline."""
    for hash_, line in listing.referenced_hashes():
        if hash_ not in log.declarations:
            raise UnknownHashInSource(hash_, line)

    t = lay.theme
    parts = [_svg_open(lay.code_width, lay.height, t, "ownviz-code-svg")]
    for lineno, spans in enumerate(listing.lines, start=1):
        y = lay.y_for_line(lineno)
        parts.append(
            f'<text class="lineno" x="{_fmt(t.gutter_width)}" y="{_fmt(y)}" '
            f'text-anchor="end" dominant-baseline="central" fill="{t.function_color}">'
            f"{lineno}</text>"
        )
        pieces = []
        for span in spans:
            if span.participant_hash is None:
                pieces.append(escape(span.text))
            else:
                cls = "code-fn" if span.is_fn else "code-var"
                pieces.append(
                    f'<tspan class="{cls}" data-hash="{span.participant_hash}">'
                    f"{escape(span.text)}</tspan>"
                )
        parts.append(
            f'<text class="code" x="{_fmt(lay.code_x)}" y="{_fmt(y)}" '
            f'dominant-baseline="central" xml:space="preserve" fill="{t.text_color}">'
            + "".join(pieces)
            + "</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class RenderedDocument:
    """The three texts written for one example."""

    code_svg: str
    timeline_svg: str
    embed_html: str
