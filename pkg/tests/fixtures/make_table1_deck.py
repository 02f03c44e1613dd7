"""Regenerate table1_deck.json, the authored TextFlow demo deck.

Per-slide counts follow the five observed slideshows: slide 1 = (Fade-in,
Highlight | 2 | 6 | 6), slide 2 = (N/A | 0 | 7 | 2), slide 3 = (Fade-in,
Highlight, Add-color | 4 | 8 | 8), slide 4 = (Fade-in, Highlight, Morphing
| 4 | 6 | 6), slide 5 = (Fade-in, Add-color | 3 | 9 | 3).
"""

from pathlib import Path

from narvis.component_tree import VisualUnit
from narvis.deck import (AnnotationSpec, Deck, QuestionSpec, Slide, Step,
                         TransitionSpec, serialize_deck, validate_deck)
from narvis.narrative import NarrativeSequence

HERE = Path(__file__).parent

FLOWS = tuple(f"p2-{i}" for i in range(4))
KEYWORDS = tuple(f"p3-{i}" for i in range(8))


def _sym(i, x, y):
    forms = ["circle", "arrow_line", "double_arrow_line", "freeform_line", "color_legend"]
    form = forms[i % len(forms)]
    pts = ((x, y),) if form in ("circle", "color_legend") else ((x, y), (x + 50.0, y + 20.0))
    content = "topic:#4C78A8;event:#E45756" if form == "color_legend" else ""
    return AnnotationSpec(form, pts, content)


def _text(content, x, y):
    return AnnotationSpec("text", ((x, y),), content)


def build_deck() -> Deck:
    units = [
        VisualUnit("u0", "flows", FLOWS, "n-flows"),
        VisualUnit("u1", "keywords", KEYWORDS, "n-keywords"),
    ]
    seq = NarrativeSequence(("u0", "u1"), "author_adjusted")

    def steps(slide_id, specs):
        return tuple(Step(f"{slide_id}-st{i}", spec) for i, spec in enumerate(specs))

    s1 = Slide("s1", "u0", steps("s1", [
        TransitionSpec("fade_in", "all"),
        TransitionSpec("highlight", FLOWS[:2], params={"dim_opacity": 0.2}),
        *[_sym(i, 100.0 + 40 * i, 90.0) for i in range(6)],
        *[_text(f"Each band is one topic stream ({i + 1})", 80.0, 40.0 + 14 * i)
          for i in range(6)],
    ]), notes="Introduce the topic flows")

    s2 = Slide("s2", "u0", steps("s2", [
        *[_sym(i, 120.0 + 30 * i, 180.0) for i in range(7)],
        _text("The x-axis is time", 320.0, 405.0),
        _text("Vertical order groups related topics", 320.0, 30.0),
    ]), channel_tags=("position",), notes="Where a band sits")

    s3 = Slide("s3", "u0", steps("s3", [
        TransitionSpec("fade_in", FLOWS[:1]),
        TransitionSpec("fade_in", FLOWS[1:3]),
        TransitionSpec("highlight", FLOWS[2:3], params={"dim_opacity": 0.15}),
        TransitionSpec("add_color", FLOWS),
        *[_sym(i, 90.0 + 35 * i, 250.0) for i in range(8)],
        *[_text(f"Color distinguishes topics ({i + 1})", 60.0, 60.0 + 13 * i)
          for i in range(8)],
    ]), channel_tags=("color_fill",), notes="What the colors mean")

    s4 = Slide("s4", "u1", steps("s4", [
        TransitionSpec("fade_in", "all"),
        TransitionSpec("fade_in", KEYWORDS[:4]),
        TransitionSpec("highlight", KEYWORDS[:2], params={"dim_opacity": 0.25}),
        TransitionSpec("morph", KEYWORDS[:2], params={
            "target": {KEYWORDS[0]: {"r": 14.0}, KEYWORDS[1]: {"r": 16.0}}}),
        *[_sym(i, 140.0 + 45 * i, 130.0) for i in range(6)],
        *[_text(f"Dot size tracks keyword weight ({i + 1})", 420.0, 50.0 + 14 * i)
          for i in range(6)],
    ]), channel_tags=("size",), notes="Keyword glyphs and their size")

    s5 = Slide("s5", "u1", steps("s5", [
        TransitionSpec("fade_in", KEYWORDS[4:]),
        TransitionSpec("add_color", KEYWORDS[:4]),
        TransitionSpec("add_color", KEYWORDS[4:]),
        *[_sym(i, 160.0 + 40 * i, 230.0) for i in range(9)],
        *[_text(f"Keyword color matches its topic ({i + 1})", 60.0, 300.0 + 14 * i)
          for i in range(3)],
        QuestionSpec(
            "q-size", "single_choice",
            "What does a larger keyword dot mean?",
            ("A more important keyword", "An older article", "A merged topic"),
            frozenset({0})),
    ]), channel_tags=("color_fill",), notes="Keyword colors and a check")

    deck = Deck(
        deck_id="textflow-demo",
        title="Reading TextFlow",
        sequence=seq,
        slides=(s1, s2, s3, s4, s5),
        units=tuple(units),
        overview_slide=False,
        svg_doc_ref="textflow",
    )
    validate_deck(deck)
    return deck


if __name__ == "__main__":
    out = HERE / "table1_deck.json"
    out.write_text(serialize_deck(build_deck()), encoding="utf-8")
    print(f"wrote {out}")
