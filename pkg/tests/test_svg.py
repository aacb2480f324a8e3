"""SVG rendering: layout geometry, element counts, determinism, XML validity."""

from __future__ import annotations

import random
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from ownviz.events import EventKind as E, EventLogBuilder, RapKind as K
from ownviz.source import parse_annotated_source
from ownviz.svg import (
    LineCountMismatch,
    Theme,
    UnknownHashInSource,
    layout,
    load_theme,
    render_code_panel,
    render_timeline_panel,
)
from ownviz.timeline import compile_timelines

from .genlogs import random_accepted_log

FIG1_SOURCE = Path(__file__).parent.parent / "gallery" / "moves_copies_drops" / "main.rs"


def svg_elements(text: str, css_class: str) -> list[ET.Element]:
    root = ET.fromstring(text)
    out = []
    for element in root.iter():
        classes = element.get("class", "").split()
        if css_class in classes:
            out.append(element)
    return out


class TestLayout:
    def test_fig1_columns_strictly_increase(self, fig1_log):
        panel = compile_timelines(fig1_log)
        lay = layout(panel)
        xs = [lay.column_x[rap.hash] for rap, _ in panel.columns]
        assert len(xs) == 3
        assert xs == sorted(xs)
        assert len(set(xs)) == 3
        assert lay.rows == 7

    def test_empty_panel(self):
        lay = layout(compile_timelines(EventLogBuilder().finalize()))
        assert lay.column_x == {}
        assert lay.rows == 0

    def test_reference_columns_reserve_more_width(self, fig2_log):
        panel = compile_timelines(fig2_log)
        lay = layout(panel)
        owner_width = lay.column_width[1]
        for ref_hash in (3, 4, 6):
            assert lay.column_width[ref_hash] > owner_width

    def test_listing_shorter_than_timeline_is_rejected(self, fig1_log):
        panel = compile_timelines(fig1_log)
        listing = parse_annotated_source("one line only")
        with pytest.raises(LineCountMismatch):
            layout(panel, listing)

    def test_listing_may_run_past_the_last_event(self, walkthrough_log):
        panel = compile_timelines(walkthrough_log)  # last event on line 3
        listing = parse_annotated_source("a\nb\nc\nd")
        assert layout(panel, listing).rows == 4

    def test_palette_is_deterministic(self, fig1_log):
        panel = compile_timelines(fig1_log)
        assert layout(panel).palette == layout(panel).palette


class TestTimelinePanelRendering:
    def test_fig1_element_counts(self, fig1_log):
        panel = compile_timelines(fig1_log)
        text = render_timeline_panel(panel, layout(panel), fig1_log)
        assert len(svg_elements(text, "dot")) == 9
        segments = svg_elements(text, "segment")
        assert len(segments) == 5
        styles = [s.get("class").split()[1] for s in segments]
        assert styles.count("hollow") == 2
        assert styles.count("solid") == 3
        assert len(svg_elements(text, "arrow")) == 3

    def test_fig2_access_curves(self, fig2_log):
        panel = compile_timelines(fig2_log)
        text = render_timeline_panel(panel, layout(panel), fig2_log)
        curves = svg_elements(text, "curve")
        styles = [c.get("class").split()[1] for c in curves]
        assert styles.count("hollow") == 2
        assert styles.count("solid") == 1
        assert len(svg_elements(text, "fn-read")) == 3

    def test_single_dot_panel(self):
        b = EventLogBuilder()
        b.declare_rap(K.OWNER, 1, "s")
        b.append(E.ACQUIRE, None, 1, line=1)
        log = b.finalize()
        panel = compile_timelines(log)
        text = render_timeline_panel(panel, layout(panel), log)
        assert len(svg_elements(text, "dot")) == 1

    def test_every_interactive_element_has_hover_and_hash(self, fig2_log):
        panel = compile_timelines(fig2_log)
        text = render_timeline_panel(panel, layout(panel), fig2_log)
        for css in ("dot", "segment", "curve", "fn-read", "arrow", "fn-label"):
            for element in svg_elements(text, css):
                assert element.get("data-hover")
                assert element.get("data-hash")

    def test_function_labels_emitted(self, fig1_log):
        panel = compile_timelines(fig1_log)
        text = render_timeline_panel(panel, layout(panel), fig1_log)
        labels = {e.get("data-hover") for e in svg_elements(text, "fn-label")}
        assert labels == {"String::from()", "takes_ownership()"}

    def test_reference_headers_include_dereference(self, fig2_log):
        panel = compile_timelines(fig2_log)
        text = render_timeline_panel(panel, layout(panel), fig2_log)
        headers = {e.get("data-hover") for e in svg_elements(text, "header")}
        assert {"s", "r1", "*r1", "r2", "*r2", "r3", "*r3"} <= headers

    def test_stacked_arrows_get_distinct_y(self, fig2_log):
        panel = compile_timelines(fig2_log)
        text = render_timeline_panel(panel, layout(panel), fig2_log)
        line6 = [
            float(e.find("{http://www.w3.org/2000/svg}line").get("y1"))
            for e in svg_elements(text, "arrow")
            if "Return immutably" in e.get("data-hover")
        ]
        assert len(line6) == 2
        assert line6[0] != line6[1]


class TestCodePanelRendering:
    def test_walkthrough_span_tagged(self, walkthrough_log):
        listing = parse_annotated_source(
            'fn main() {\n    let <tspan data-hash="1">s</tspan> =\n'
            '    <tspan class="fn" data-hash="0" hash="2">String::from</tspan>("hello");\n}'
        )
        panel = compile_timelines(walkthrough_log)
        lay = layout(panel, listing)
        text = render_code_panel(listing, lay, walkthrough_log)
        variable_spans = svg_elements(text, "code-var")
        assert [(s.get("data-hash"), s.text) for s in variable_spans] == [("1", "s")]
        fn_spans = svg_elements(text, "code-fn")
        assert [(s.get("data-hash"), s.text) for s in fn_spans] == [("2", "String::from")]

    def test_plain_listing(self, walkthrough_log):
        listing = parse_annotated_source("a\nb\nc")
        panel = compile_timelines(walkthrough_log)
        text = render_code_panel(listing, layout(panel, listing), walkthrough_log)
        assert svg_elements(text, "code-var") == []
        assert len(svg_elements(text, "code")) == 3

    def test_unknown_hash_rejected(self, walkthrough_log):
        listing = parse_annotated_source('<tspan data-hash="9">s</tspan>\nx\ny')
        panel = compile_timelines(walkthrough_log)
        lay = layout(panel, listing)
        with pytest.raises(UnknownHashInSource) as info:
            render_code_panel(listing, lay, walkthrough_log)
        assert info.value.hash == 9
        assert info.value.line == 1

    def test_rows_align_with_timeline(self, fig1_log):
        listing = parse_annotated_source(FIG1_SOURCE.read_text())
        panel = compile_timelines(fig1_log)
        lay = layout(panel, listing)
        code = render_code_panel(listing, lay, fig1_log)
        timeline = render_timeline_panel(panel, lay, fig1_log)
        code_rows = {e.get("y") for e in svg_elements(code, "code")}
        dot_rows = {e.get("cy") for e in svg_elements(timeline, "dot")}
        assert dot_rows <= code_rows  # every event row lines up with a code row


class TestDeterminismAndValidity:
    def test_byte_identical_rerenders(self, fig2_log):
        panel = compile_timelines(fig2_log)
        lay = layout(panel)
        first = render_timeline_panel(panel, lay, fig2_log)
        second = render_timeline_panel(compile_timelines(fig2_log), layout(panel), fig2_log)
        assert first == second

    def test_random_panels_are_well_formed_xml(self):
        rng = random.Random(13)
        for _ in range(60):
            log = random_accepted_log(rng)
            panel = compile_timelines(log)
            text = render_timeline_panel(panel, layout(panel), log)
            ET.fromstring(text)  # raises on malformed output

    def test_element_count_conservation(self):
        from ownviz.timeline import ElementKind

        rng = random.Random(29)
        for _ in range(40):
            log = random_accepted_log(rng)
            panel = compile_timelines(log)
            text = render_timeline_panel(panel, layout(panel), log)
            assert len(svg_elements(text, "dot")) == len(panel.elements(ElementKind.DOT))
            assert len(svg_elements(text, "arrow")) == len(panel.elements(ElementKind.ARROW))
            assert len(svg_elements(text, "curve")) == len(
                panel.elements(ElementKind.ACCESS_CURVE)
            )


class TestTheme:
    def test_overrides(self, tmp_path):
        theme_file = tmp_path / "big.theme"
        theme_file.write_text(
            "# chunkier everything\nline_height = 44\ndot_radius = 9\n"
            "palette = #111111, #222222\nfont_family = serif\n"
        )
        theme = load_theme(theme_file)
        assert theme.line_height == 44.0
        assert theme.dot_radius == 9.0
        assert theme.palette == ("#111111", "#222222")
        assert theme.font_family == "serif"

    def test_unknown_key_rejected(self, tmp_path):
        from ownviz.svg import ThemeError

        theme_file = tmp_path / "bad.theme"
        theme_file.write_text("sparkle = yes\n")
        with pytest.raises(ThemeError):
            load_theme(theme_file)

    def test_bad_number_rejected(self, tmp_path):
        from ownviz.svg import ThemeError

        theme_file = tmp_path / "bad.theme"
        theme_file.write_text("line_height = tall\n")
        with pytest.raises(ThemeError):
            load_theme(theme_file)

    def test_theme_changes_output(self, fig1_log):
        panel = compile_timelines(fig1_log)
        default = render_timeline_panel(panel, layout(panel), fig1_log)
        chunky = render_timeline_panel(
            panel, layout(panel, theme=Theme(dot_radius=11.0)), fig1_log
        )
        assert default != chunky
        assert 'r="11.00"' in chunky
