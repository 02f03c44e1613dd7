from __future__ import annotations

import json

import pytest

from narvis import compiler as cp, deck as dm, svg_ingest as si
from narvis.channels import SALIENCE_RANK, ChannelPlan, ChannelSpec
from narvis.component_tree import VisualUnit
from narvis.narrative import NarrativeSequence

MARKUP = ('<svg viewBox="0 0 100 100">'
          '<g class="a"><rect x="0" y="0" width="10" height="10" fill="#FF0000"/>'
          '<rect x="20" y="0" width="10" height="10" fill="#00FF00"/>'
          '<rect x="40" y="0" width="10" height="10" fill="#0000FF"/></g>'
          '<g class="b"><circle cx="70" cy="50" r="8" fill="#123456"/>'
          '<circle cx="30" cy="60" r="5" fill="#654321"/></g>'
          "</svg>")


def build_doc():
    return si.parse_svg(MARKUP)


def plan_with(unit_id, enabled):
    return ChannelPlan(unit_id, tuple(
        ChannelSpec(name, 2 if name in enabled else 1, rank,
                    enabled=name in enabled or name == "position")
        for name, rank in sorted(SALIENCE_RANK.items(), key=lambda kv: kv[1])))


def skeleton_deck():
    units = [VisualUnit("bars", "bars", ("p0-0", "p0-1", "p0-2"), "n1"),
             VisualUnit("dots", "dots", ("p1-0", "p1-1"), "n2")]
    seq = NarrativeSequence(("bars", "dots"), "suggested")
    plans = [plan_with("bars", ["position", "color_fill"]), plan_with("dots", ["position"])]
    return dm.assemble_deck(seq, plans, units, deck_id="demo", title="Demo deck")


def test_skeleton_compiles_to_seven_containers():
    compiled = cp.compile(skeleton_deck(), build_doc())
    assert compiled.slide_count == 7
    assert compiled.html.count("data-slide-id=") == 7


def test_byte_identical_output():
    a = cp.compile(skeleton_deck(), build_doc())
    b = cp.compile(skeleton_deck(), build_doc())
    assert a.html == b.html


def test_self_contained_without_beacon():
    compiled = cp.compile(skeleton_deck(), build_doc())
    assert "http" not in compiled.html


def test_beacon_url_embedded_when_set():
    opts = cp.CompileOptions(beacon_url="https://collector.test/events")
    compiled = cp.compile(skeleton_deck(), build_doc(), opts)
    assert "https://collector.test/events" in compiled.html
    stripped = compiled.html.replace("https://collector.test/events", "")
    assert "http" not in stripped


def test_manifest_has_every_step_once():
    deck = skeleton_deck()
    compiled = cp.compile(deck, build_doc())
    step_ids = [s.step_id for _, s in deck.all_steps()]
    assert sorted(compiled.manifest["steps"]) == sorted(step_ids)
    total_steps = len(step_ids)
    assert compiled.manifest["states"] == compiled.slide_count + total_steps
    states = [v["state"] for v in compiled.manifest["steps"].values()]
    assert len(states) == len(set(states))


def test_question_form_rendered():
    deck = skeleton_deck()
    q = dm.Step("quiz-1", dm.QuestionSpec("q1", "single_choice", "Which channel?",
                                          ("position", "size", "color"), frozenset({0})))
    deck = dm.edit_slide(deck, deck.slides[1].slide_id, dm.AddStep(q))
    compiled = cp.compile(deck, build_doc())
    assert compiled.html.count('data-question-id="q1"') == 1
    assert compiled.html.count('name="q1"') == 3
    assert compiled.manifest["questions"] == ["q1"]


def test_dangling_primitive_ref():
    # the deck is internally consistent, but p9-9 does not exist in the doc
    units = [VisualUnit("bars", "bars", ("p0-0", "p9-9"), "n1")]
    seq = NarrativeSequence(("bars",), "suggested")
    deck = dm.assemble_deck(seq, [plan_with("bars", [])], units, overview_slide=False)
    with pytest.raises(cp.DanglingPrimitiveRef):
        cp.compile(deck, build_doc())
    # a step targeting a primitive the doc lacks is caught too
    ok_units = [VisualUnit("bars", "bars", ("p0-0", "p0-1"), "n1")]
    deck2 = dm.Deck("d", "t", seq, (
        dm.Slide("s0", "bars",
                 (dm.Step("s0-st0", dm.TransitionSpec("highlight", ("p5-5",))),)),),
        tuple(ok_units))
    with pytest.raises(cp.DanglingPrimitiveRef):
        cp.compile(deck2, build_doc())


def test_svg_embedded_with_prim_tags():
    compiled = cp.compile(skeleton_deck(), build_doc())
    for pid in ("p0-0", "p0-1", "p0-2", "p1-0", "p1-1"):
        assert f'data-prim="{pid}"' in compiled.html
    assert "xmlns" not in compiled.html


# -- render_effect -------------------------------------------------------------------

def shapes_map():
    return {("p" + "-".join(str(i) for i in n.node_path)): n
            for n in build_doc().iter_shapes()}


def test_highlight_payload():
    payload = cp.render_effect(dm.TransitionSpec("highlight", ("p0-0",),
                                                 params={"dim_opacity": 0.2}))
    assert payload["effect"] == "highlight"
    assert payload["dim_opacity"] == 0.2
    assert payload["targets"] == ["p0-0"]


def test_add_color_payload_defaults_to_neutral_gray():
    payload = cp.render_effect(dm.TransitionSpec("add_color", "all"))
    assert payload["from_color"] == "#BBBBBB"
    assert payload["targets"] == "all"


def test_change_size_scale():
    payload = cp.render_effect(dm.TransitionSpec("change_size", "all",
                                                 params={"scale": 2.5}))
    assert payload["scale"] == 2.5


def test_morph_circle_to_circle_interpolates_attrs():
    spec = dm.TransitionSpec("morph", ("p1-0",),
                             params={"target": {"p1-0": {"r": 20}}})
    payload = cp.render_effect(spec, shapes_map())
    morph = payload["morph"]["p1-0"]
    assert morph["mode"] == "attrs"
    assert morph["from"] == {"r": 8.0}
    assert morph["to"] == {"r": 20.0}


def test_morph_circle_to_path_without_resampling_incompatible():
    spec = dm.TransitionSpec("morph", ("p1-0",),
                             params={"target": {"p1-0": {"d": "M0 0 C1 1 2 2 3 3 C4 4 5 5 6 6 Z"}},
                                     "resample": False})
    with pytest.raises(cp.MorphIncompatible):
        cp.render_effect(spec, shapes_map())


def test_morph_circle_to_path_resamples_to_polygons():
    spec = dm.TransitionSpec("morph", ("p1-0",),
                             params={"target": {"p1-0": {"d": "M0 0 C1 1 2 2 3 3 Z"}}})
    payload = cp.render_effect(spec, shapes_map())
    morph = payload["morph"]["p1-0"]
    assert morph["mode"] == "polygon"
    # 64 sample points on both sides: count coordinate pairs
    assert morph["from"].count(" ") == morph["to"].count(" ")
    assert len(morph["from"].split()) == 2 + 2 * 64  # M + 64 pairs + Z


def test_morph_same_signature_paths_lerp_raw():
    markup = ('<svg><path d="M0 0 C1 1 2 2 3 3 Z"/></svg>')
    doc = si.parse_svg(markup)
    shapes = {"p0": list(doc.iter_shapes())[0]}
    spec = dm.TransitionSpec("morph", ("p0",),
                             params={"target": {"p0": {"d": "M9 9 C8 8 7 7 6 6 Z"}}})
    payload = cp.render_effect(spec, shapes)
    assert payload["morph"]["p0"]["mode"] == "path"


def test_polygon_morph_pre_renders_source_as_path():
    deck = skeleton_deck()
    step = dm.Step("m-1", dm.TransitionSpec(
        "morph", ("p1-0",),
        params={"target": {"p1-0": {"d": "M0 0 C1 1 2 2 3 3 Z"}}}))
    deck = dm.edit_slide(deck, deck.slides[4].slide_id, dm.AddStep(step))
    compiled = cp.compile(deck, build_doc())
    # the circle that will morph is emitted as a path with the polygonized d
    assert 'data-prim="p1-0"' in compiled.html
    segment = compiled.html.split('data-prim="p1-0"')[0].rsplit("<", 1)[1]
    assert segment.startswith("path")


def test_runtime_payload_is_valid_json():
    compiled = cp.compile(skeleton_deck(), build_doc())
    payload = compiled.html.split('type="application/json">')[1].split("</script>")[0]
    data = json.loads(payload)
    assert data["deck_id"] == "demo"
    assert set(data["units"]) == {"bars", "dots"}
    assert len(data["containers"]) == 7


def test_annotation_fragments_in_overlay():
    deck = skeleton_deck()
    anno = dm.Step("a-1", dm.AnnotationSpec("circle", ((10.0, 20.0),),
                                            style={"radius": 5}))
    deck = dm.edit_slide(deck, deck.slides[1].slide_id, dm.AddStep(anno))
    compiled = cp.compile(deck, build_doc())
    assert 'data-anno="a-1"' in compiled.html
    assert 'id="anno-layer"' in compiled.html


def test_compile_theme_overrides():
    opts = cp.CompileOptions(theme={"transition_ms": 500, "accent": "#FF00AA"})
    compiled = cp.compile(skeleton_deck(), build_doc(), opts)
    assert "--dur:500ms" in compiled.html
    assert "#FF00AA" in compiled.html
