"""narvis: decompose an SVG visualization and author slideshow tutorials."""

from .svg_ingest import (
    ChannelValues,
    SceneNode,
    SvgDocument,
    VisualPrimitive,
    extract_primitives,
    parse_svg,
    serialize_document,
)
from .component_tree import (
    ClusterNode,
    ComponentTree,
    VisualUnit,
    build_tree,
    descendants_of,
    edit_tree,
    select_units,
)
from .channels import (
    ChannelPlan,
    ChannelSpec,
    detect_channels,
    reorder_channels,
    set_complexity,
    toggle_channel,
)
from .narrative import (
    Edge,
    NarrativeSequence,
    RelationGraph,
    new_graph,
    set_relation,
    suggest_sequence,
    validate_sequence,
)
from .deck import (
    AnnotationSpec,
    Deck,
    QuestionSpec,
    Slide,
    Step,
    TransitionSpec,
    assemble_deck,
    deck_stats,
    edit_slide,
    parse_deck,
    serialize_deck,
)
from .compiler import CompiledSlideshow, CompileOptions, compile, render_effect
from .analytics import DeckStats, EventLog, ViewerEvent, aggregate, ingest

__version__ = "0.1.0"

__all__ = [
    "AnnotationSpec", "ChannelPlan", "ChannelSpec", "ChannelValues", "ClusterNode",
    "CompileOptions", "CompiledSlideshow", "ComponentTree", "Deck", "DeckStats",
    "Edge", "EventLog", "NarrativeSequence", "QuestionSpec", "RelationGraph",
    "SceneNode", "Slide", "Step", "SvgDocument", "TransitionSpec", "ViewerEvent",
    "VisualPrimitive", "VisualUnit", "aggregate", "assemble_deck", "build_tree",
    "compile", "deck_stats", "descendants_of", "detect_channels", "edit_slide",
    "edit_tree", "extract_primitives", "ingest", "new_graph", "parse_deck",
    "parse_svg", "render_effect", "reorder_channels", "select_units",
    "serialize_deck", "serialize_document", "set_complexity", "set_relation",
    "suggest_sequence", "toggle_channel", "validate_sequence",
]
