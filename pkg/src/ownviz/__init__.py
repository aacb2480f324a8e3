"""ownviz: deterministic, interactive SVG timelines of ownership and borrowing.

Pipeline: author an .evspec event specification and a hash-annotated source
listing, validate the events against the borrow rules, compile per-variable
timelines, and render two aligned SVG panels plus an embeddable HTML
snippet for documentation builds.
"""

from .dsl import parse_spec, print_spec
from .errors import OwnvizError
from .events import (
    EventKind,
    EventLog,
    EventLogBuilder,
    ExternalEvent,
    LifetimeTrait,
    RapKind,
    ResourceAccessPoint,
    finalize,
)
from .docgen import emit_embed_snippet, render_example
from .source import AnnotatedListing, parse_annotated_source, strip_annotations
from .svg import Layout, RenderedDocument, Theme, layout, load_theme, render_code_panel, render_timeline_panel
from .timeline import (
    ElementKind,
    Style,
    TimelineElement,
    TimelinePanel,
    compile_timelines,
    hover_message,
    infer_drops,
)
from .validator import ResourceState, ValidationReport, Violation, resource_state_at, validate

__all__ = [
    "AnnotatedListing",
    "ElementKind",
    "EventKind",
    "EventLog",
    "EventLogBuilder",
    "ExternalEvent",
    "Layout",
    "LifetimeTrait",
    "OwnvizError",
    "RapKind",
    "RenderedDocument",
    "ResourceAccessPoint",
    "ResourceState",
    "Style",
    "Theme",
    "TimelineElement",
    "TimelinePanel",
    "ValidationReport",
    "Violation",
    "compile_timelines",
    "emit_embed_snippet",
    "finalize",
    "hover_message",
    "infer_drops",
    "layout",
    "load_theme",
    "parse_annotated_source",
    "parse_spec",
    "print_spec",
    "render_code_panel",
    "render_example",
    "render_timeline_panel",
    "resource_state_at",
    "strip_annotations",
    "validate",
]
