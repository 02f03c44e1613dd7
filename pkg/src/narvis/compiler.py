"""Compile a deck plus its SVG document into one self-contained HTML file.

The output embeds the SVG inline (every shape tagged with its primitive id),
an annotation overlay, per-slide panels with question forms, and a small
vanilla-JS runtime that replays steps one navigation click at a time.
Compilation is a pure function: identical inputs give byte-identical HTML.
"""

from __future__ import annotations

import html
import json
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import NarvisError
from .deck import AnnotationSpec, Deck, QuestionSpec, Slide, Step, TransitionSpec
from .svg_ingest import SceneNode, SvgDocument, sample_path

NEUTRAL_COLOR = "#BBBBBB"
MORPH_SAMPLES = 64

DEFAULT_THEME = {
    "transition_ms": 800,
    "easing": "ease-in-out",
    "introduced_opacity": 0.35,
    "dim_opacity": 0.2,
    "accent": "#1F6FB2",
    "background": "#FAFAF8",
}


class DanglingPrimitiveRef(NarvisError):
    code = "dangling_primitive_ref"


class MorphIncompatible(NarvisError):
    code = "morph_incompatible"


@dataclass(frozen=True)
class CompileOptions:
    beacon_url: str | None = None
    student_token: str | None = None
    embed_fonts: bool = False  # reserved; output uses the system font stack either way
    theme: dict = field(default_factory=dict)

    def resolved_theme(self) -> dict:
        return {**DEFAULT_THEME, **self.theme}


@dataclass(frozen=True)
class CompiledSlideshow:
    html: str
    slide_count: int
    manifest: dict


OVERVIEW_CONTAINER_ID = "__overview__"


def compile(deck: Deck, doc: SvgDocument, opts: CompileOptions | None = None) -> CompiledSlideshow:
    """Render the deck as a standalone slideshow; see module docstring."""
    opts = opts or CompileOptions()
    theme = opts.resolved_theme()
    shape_nodes = _shape_node_map(doc)
    _check_references(deck, shape_nodes)

    containers: list[dict] = []
    panels: list[str] = []
    overlay_frags: list[str] = []
    manifest_steps: dict[str, dict] = {}
    questions: list[str] = []
    polygon_morphs: dict[str, str] = {}

    if deck.overview_slide:
        containers.append({"slide_id": OVERVIEW_CONTAINER_ID, "unit_id": None, "steps": []})
        panels.append(_title_panel(deck))

    state_index = len(containers)  # one enter-state per container emitted so far
    for slide in deck.slides:
        step_payloads = []
        for si, step in enumerate(slide.steps):
            payload = _step_payload(step, shape_nodes)
            step_payloads.append(payload)
            manifest_steps[step.step_id] = {
                "slide_id": slide.slide_id,
                "state": state_index + 1 + si,
            }
            for pid, morph in payload.get("morph", {}).items():
                if morph["mode"] == "polygon":
                    # pre-render the source as a path so the runtime can lerp `d`
                    polygon_morphs.setdefault(pid, morph["from"])
            if isinstance(step.spec, AnnotationSpec):
                overlay_frags.append(
                    _annotation_fragment(step.spec, step.step_id, len(containers), si))
        containers.append({"slide_id": slide.slide_id, "unit_id": slide.unit_id,
                           "steps": step_payloads})
        q_ids = [s.spec.question_id for s in slide.steps if isinstance(s.spec, QuestionSpec)]
        questions.extend(q_ids)
        panels.append(_slide_panel(deck, slide))
        state_index += 1 + len(slide.steps)

    svg_markup = _embed_svg(doc, shape_nodes, overlay_frags, polygon_morphs)
    data = {
        "deck_id": deck.deck_id,
        "beacon_url": opts.beacon_url,
        "student_token": opts.student_token,
        "theme": theme,
        "units": {u.unit_id: list(u.primitive_ids) for u in deck.units},
        "containers": containers,
    }
    page = _page(deck, svg_markup, panels, data, theme)
    manifest = {
        "slides": [c["slide_id"] for c in containers],
        "steps": manifest_steps,
        "questions": questions,
        "states": state_index,
    }
    return CompiledSlideshow(page, len(containers), manifest)


def _shape_node_map(doc: SvgDocument) -> dict[str, SceneNode]:
    out = {}
    for node in doc.iter_shapes():
        out["p" + "-".join(str(i) for i in node.node_path)] = node
    return out


def _check_references(deck: Deck, shapes: dict[str, SceneNode]) -> None:
    for unit in deck.units:
        for pid in unit.primitive_ids:
            if pid not in shapes:
                raise DanglingPrimitiveRef(
                    f"unit {unit.unit_id!r} references missing primitive {pid!r}")
    for slide, step in deck.all_steps():
        spec = step.spec
        if isinstance(spec, TransitionSpec):
            for pid in spec.target_ids():
                if pid not in shapes:
                    raise DanglingPrimitiveRef(
                        f"step {step.step_id!r} targets missing primitive {pid!r}")


# ---------------------------------------------------------------------------
# step payloads / effects

def render_effect(spec: TransitionSpec,
                  shapes: dict[str, SceneNode] | None = None) -> dict:
    """Runtime instruction for one transition step.

    Morph payloads embed the start and end geometry; incompatible shapes
    raise MorphIncompatible unless uniform resampling is enabled (default).
    """
    out: dict = {
        "effect": spec.effect,
        "targets": spec.targets if spec.targets == "all" else list(spec.targets),
        "duration_ms": spec.duration_ms,
    }
    if spec.effect == "highlight":
        out["dim_opacity"] = spec.params.get("dim_opacity", DEFAULT_THEME["dim_opacity"])
    elif spec.effect == "change_size":
        out["scale"] = spec.params.get("scale", 1.5)
    elif spec.effect == "add_color":
        out["from_color"] = spec.params.get("from_color", NEUTRAL_COLOR)
    elif spec.effect == "morph":
        resample = spec.params.get("resample", True)
        morphs = {}
        for pid in spec.target_ids():
            node = (shapes or {}).get(pid)
            if node is None:
                raise MorphIncompatible(f"no source geometry for {pid!r}")
            morphs[pid] = _morph_payload(node, spec.params["target"][pid], resample)
        out["morph"] = morphs
    return out


def _step_payload(step: Step, shapes: dict[str, SceneNode]) -> dict:
    spec = step.spec
    if isinstance(spec, TransitionSpec):
        payload = render_effect(spec, shapes)
        payload["kind"] = "transition"
    elif isinstance(spec, AnnotationSpec):
        payload = {"kind": "annotation"}
    else:
        payload = {"kind": "question", "question_id": spec.question_id,
                   "correct": sorted(spec.correct)}
    payload["step_id"] = step.step_id
    return payload


_NUMERIC_ATTRS = {
    "circle": ("cx", "cy", "r"),
    "ellipse": ("cx", "cy", "rx", "ry"),
    "rect": ("x", "y", "width", "height"),
    "line": ("x1", "y1", "x2", "y2"),
}


def _morph_payload(node: SceneNode, target: dict, resample: bool) -> dict:
    et = node.element_type
    if et != "path" and not ("d" in target) and et in _NUMERIC_ATTRS:
        keys = [k for k in _NUMERIC_ATTRS[et] if k in target]
        if keys:
            frm = {k: float(node.attributes.get(k, "0") or 0) for k in keys}
            to = {k: float(target[k]) for k in keys}
            return {"mode": "attrs", "from": frm, "to": to}
    if et == "path" and "d" in target:
        src_d = node.attributes.get("d", "")
        src_sig = _signature(src_d)
        tgt_sig = _signature(target["d"])
        if src_sig == tgt_sig and _numbers(src_d) is not None \
                and len(_numbers(src_d)) == len(_numbers(target["d"])):
            return {"mode": "path", "from": src_d, "to": target["d"]}
    if not resample:
        raise MorphIncompatible(
            f"cannot morph <{et}> into {sorted(target)} without resampling")
    frm_pts = _outline(node)
    if frm_pts is None:
        raise MorphIncompatible(f"no usable outline for <{et}>")
    if "d" in target:
        try:
            to_pts = sample_path(target["d"])
        except ValueError as exc:
            raise MorphIncompatible(f"bad target path: {exc}") from exc
    else:
        fake = SceneNode("shape", et, {k: str(v) for k, v in target.items()}, (), node.node_path)
        to_pts = _outline(fake)
        if to_pts is None:
            raise MorphIncompatible(f"cannot build target outline from {sorted(target)}")
    return {"mode": "polygon",
            "from": _polygon_d(_resample(frm_pts, MORPH_SAMPLES)),
            "to": _polygon_d(_resample(to_pts, MORPH_SAMPLES))}


_NUM_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def _signature(d: str) -> str:
    return "".join(ch for ch in d if ch.isalpha()).upper()


def _numbers(d: str) -> list[float] | None:
    try:
        return [float(v) for v in _NUM_RE.findall(d)]
    except ValueError:
        return None


def _outline(node: SceneNode) -> list[tuple[float, float]] | None:
    et = node.element_type

    def f(name, default=0.0):
        try:
            return float(node.attributes.get(name, default) or default)
        except ValueError:
            return default

    if et in ("circle", "ellipse"):
        cx, cy = f("cx"), f("cy")
        rx = f("r") if et == "circle" else f("rx")
        ry = f("r") if et == "circle" else f("ry")
        return [(cx + rx * math.cos(2 * math.pi * i / MORPH_SAMPLES),
                 cy + ry * math.sin(2 * math.pi * i / MORPH_SAMPLES))
                for i in range(MORPH_SAMPLES)]
    if et == "rect":
        x, y, w, h = f("x"), f("y"), f("width"), f("height")
        return [(x, y), (x + w, y), (x + w, y + h), (x, y + h), (x, y)]
    if et == "line":
        return [(f("x1"), f("y1")), (f("x2"), f("y2"))]
    if et in ("polygon", "polyline"):
        nums = [float(v) for v in _NUM_RE.findall(node.attributes.get("points", ""))]
        pts = list(zip(nums[0::2], nums[1::2]))
        return pts or None
    if et == "path":
        try:
            return sample_path(node.attributes.get("d", ""))
        except ValueError:
            return None
    return None


def _resample(pts: list[tuple[float, float]], n: int) -> list[tuple[float, float]]:
    """Uniform arc-length resampling to exactly n points."""
    if len(pts) == 1:
        return pts * n
    lengths = [0.0]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        lengths.append(lengths[-1] + math.hypot(x1 - x0, y1 - y0))
    total = lengths[-1]
    if total == 0:
        return [pts[0]] * n
    out = []
    j = 0
    for i in range(n):
        want = total * i / n
        while j < len(lengths) - 2 and lengths[j + 1] < want:
            j += 1
        seg = lengths[j + 1] - lengths[j]
        t = (want - lengths[j]) / seg if seg else 0.0
        x = pts[j][0] + t * (pts[j + 1][0] - pts[j][0])
        y = pts[j][1] + t * (pts[j + 1][1] - pts[j][1])
        out.append((x, y))
    return out


def _polygon_d(pts: list[tuple[float, float]]) -> str:
    coords = " ".join(f"{x:.2f} {y:.2f}" for x, y in pts)
    head, _, tail = coords.partition(" ")
    return f"M {head} {tail} Z".replace("M  ", "M ")


# ---------------------------------------------------------------------------
# SVG embedding

def _embed_svg(doc: SvgDocument, shapes: dict[str, SceneNode],
               overlay_frags: list[str], morph_as_path: dict[str, str]) -> str:
    id_by_path = {node.node_path: pid for pid, node in shapes.items()}

    def emit(node: SceneNode) -> ET.Element:
        attrs = {k: v for k, v in node.attributes.items() if not k.startswith("xmlns")}
        if node.kind == "shape":
            pid = id_by_path[node.node_path]
            if pid in morph_as_path:
                el = ET.Element("path")
                geometry_keys = set(_NUMERIC_ATTRS.get(node.element_type, ())) | {"points", "d"}
                for k, v in attrs.items():
                    if k not in geometry_keys:
                        el.set(k, v)
                el.set("d", morph_as_path[pid])
            else:
                el = ET.Element(node.element_type)
                for k, v in attrs.items():
                    el.set(k, v)
            el.set("data-prim", pid)
            el.set("class", (attrs.get("class", "") + " prim").strip())
            if node.text:
                el.text = node.text
            return el
        el = ET.Element(node.element_type)
        for k, v in attrs.items():
            el.set(k, v)
        for child in node.children:
            el.append(emit(child))
        return el

    root = emit(doc.root)
    markup = ET.tostring(root, encoding="unicode")
    overlay = ('<defs><marker id="nv-arrow" viewBox="0 0 10 10" refX="9" refY="5" '
               'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
               '<path d="M 0 0 L 10 5 L 0 10 z" fill="currentColor"/></marker></defs>'
               '<g id="anno-layer">' + "".join(overlay_frags) + "</g>")
    return markup[:-len("</svg>")] + overlay + "</svg>"


def _title_panel(deck: Deck) -> str:
    names = []
    by_id = {u.unit_id: u.name for u in deck.units}
    for uid in deck.sequence.order:
        names.append(by_id.get(uid, uid))
    items = "".join(f"<li>{html.escape(n)}</li>" for n in names)
    return (f'<section class="slide" data-slide-id="{OVERVIEW_CONTAINER_ID}" hidden>'
            f"<h2>{html.escape(deck.title)}</h2>"
            f'<p class="muted">This tutorial walks through the visualization '
            f"in {len(names)} parts:</p><ol>{items}</ol></section>")


def _slide_panel(deck: Deck, slide: Slide) -> str:
    unit_name = ""
    for u in deck.units:
        if u.unit_id == slide.unit_id:
            unit_name = u.name
    heading = unit_name or (slide.unit_id or deck.title)
    if slide.channel_tags:
        heading += " · " + ", ".join(slide.channel_tags)
    parts = [f'<section class="slide" data-slide-id="{html.escape(slide.slide_id)}" hidden>',
             f"<h2>{html.escape(heading)}</h2>"]
    if slide.notes:
        parts.append(f'<p class="notes">{html.escape(slide.notes)}</p>')
    for si, step in enumerate(slide.steps):
        spec = step.spec
        if isinstance(spec, AnnotationSpec) and spec.is_text and spec.content:
            parts.append(f'<p class="caption" data-step-index="{si}" hidden>'
                         f"{html.escape(spec.content)}</p>")
        elif isinstance(spec, QuestionSpec):
            parts.append(_question_form(spec, si))
    parts.append("</section>")
    return "".join(parts)


def _question_form(q: QuestionSpec, step_index: int) -> str:
    input_type = "radio" if q.mode == "single_choice" else "checkbox"
    options = "".join(
        f'<label><input type="{input_type}" name="{html.escape(q.question_id)}" '
        f'value="{i}"> {html.escape(opt)}</label>'
        for i, opt in enumerate(q.options))
    return (f'<form class="question" data-step-index="{step_index}" '
            f'data-question-id="{html.escape(q.question_id)}" hidden>'
            f"<fieldset><legend>{html.escape(q.prompt)}</legend>{options}</fieldset>"
            f'<button type="submit">Submit</button> <output></output></form>')


def _annotation_fragment(spec: AnnotationSpec, step_id: str,
                         container_idx: int, step_index: int) -> str:
    st = spec.style
    stroke = st.get("stroke", "#D94A38")
    fill = st.get("fill", "none")
    width = st.get("stroke_width", 2)
    font = st.get("font_size", 14)
    pts = list(spec.geometry)
    if len(pts) == 1:
        pts.append((pts[0][0] + 60.0, pts[0][1]))
    common = (f'data-anno="{html.escape(step_id)}" data-container="{container_idx}" '
              f'data-step-index="{step_index}" visibility="hidden"')
    if spec.form == "circle":
        r = st.get("radius", 24)
        (cx, cy) = spec.geometry[0]
        body = (f'<circle cx="{cx:g}" cy="{cy:g}" r="{r:g}" fill="{fill}" '
                f'stroke="{stroke}" stroke-width="{width}"/>')
    elif spec.form in ("arrow_line", "double_arrow_line"):
        (x1, y1), (x2, y2) = pts[0], pts[1]
        markers = 'marker-end="url(#nv-arrow)"'
        if spec.form == "double_arrow_line":
            markers += ' marker-start="url(#nv-arrow)"'
        body = (f'<line x1="{x1:g}" y1="{y1:g}" x2="{x2:g}" y2="{y2:g}" '
                f'stroke="{stroke}" stroke-width="{width}" color="{stroke}" {markers}/>')
    elif spec.form == "freeform_line":
        path = " ".join(f"{x:g},{y:g}" for x, y in spec.geometry)
        body = (f'<polyline points="{path}" fill="none" stroke="{stroke}" '
                f'stroke-width="{width}"/>')
    elif spec.form == "color_legend":
        rows = []
        (x, y) = spec.geometry[0]
        for i, entry in enumerate([e for e in spec.content.split(";") if e.strip()]):
            label, _, color = entry.partition(":")
            ry = y + i * 20
            rows.append(f'<rect x="{x:g}" y="{ry:g}" width="14" height="14" '
                        f'fill="{html.escape(color.strip() or "#888888")}"/>'
                        f'<text x="{x + 20:g}" y="{ry + 12:g}" font-size="{font}">'
                        f"{html.escape(label.strip())}</text>")
        body = "".join(rows)
    else:  # text
        (x, y) = spec.geometry[0]
        color = st.get("fill", "#222222")
        body = (f'<text x="{x:g}" y="{y:g}" font-size="{font}" fill="{color}">'
                f"{html.escape(spec.content)}</text>")
    if spec.form == "text" and not spec.content:
        body = ""
    return f"<g {common}>{body}</g>"


# ---------------------------------------------------------------------------
# page assembly

def _page(deck: Deck, svg_markup: str, panels: list[str], data: dict, theme: dict) -> str:
    payload = json.dumps(data, sort_keys=True, separators=(",", ":"))
    payload = payload.replace("</", "<\\/")  # keep </script> out of the data block
    css_vars = (f":root{{--accent:{theme['accent']};--bg:{theme['background']};"
                f"--dur:{theme['transition_ms']}ms;--easing:{theme['easing']};"
                f"--introduced:{theme['introduced_opacity']};}}")
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        '<meta name="viewport" content="width=device-width, initial-scale=1">\n'
        f"<title>{html.escape(deck.title)}</title>\n"
        f"<style>{css_vars}{_CSS}</style>\n</head>\n"
        f'<body data-deck-id="{html.escape(deck.deck_id)}">\n'
        f"<header><h1>{html.escape(deck.title)}</h1>"
        '<span id="progress"></span></header>\n'
        '<main>\n<figure id="stage">' + svg_markup + "</figure>\n"
        '<aside id="panel">' + "".join(panels) + "</aside>\n</main>\n"
        '<nav id="controls"><button id="prev" type="button">&#8592; Back</button>'
        '<span id="pos"></span>'
        '<button id="next" type="button">Next &#8594;</button></nav>\n'
        '<footer><form id="comment-form"><label>Questions or comments? '
        '<input type="text" name="text" size="40"></label> '
        "<button type=\"submit\">Send</button> <output></output></form></footer>\n"
        f'<script id="deck-data" type="application/json">{payload}</script>\n'
        f"<script>{_JS}</script>\n</body>\n</html>\n"
    )


_CSS = """
*{box-sizing:border-box}
body{margin:0;font-family:system-ui,sans-serif;background:var(--bg);color:#222;
  display:flex;flex-direction:column;min-height:100vh}
header{display:flex;align-items:baseline;gap:1rem;padding:.6rem 1.2rem;
  border-bottom:2px solid var(--accent)}
header h1{font-size:1.15rem;margin:0}
#progress{color:#777;font-size:.85rem}
main{display:flex;flex:1;gap:1rem;padding:1rem}
#stage{flex:2;margin:0;min-width:0;background:#fff;border:1px solid #ddd;
  border-radius:6px;padding:.5rem;display:flex;align-items:center;justify-content:center}
#stage svg{max-width:100%;height:auto}
#panel{flex:1;min-width:16rem}
.slide h2{margin-top:0;color:var(--accent)}
.notes{color:#555}
.caption{background:#FFF8E1;padding:.5rem .7rem;border-left:3px solid var(--accent)}
.question fieldset{border:1px solid #ccc;border-radius:4px}
.question label{display:block;margin:.25rem 0}
nav#controls{display:flex;justify-content:center;gap:1.5rem;align-items:center;
  padding:.6rem;border-top:1px solid #ddd}
nav#controls button{font-size:1rem;padding:.45rem 1.1rem;border:1px solid var(--accent);
  background:#fff;color:var(--accent);border-radius:4px;cursor:pointer}
nav#controls button:disabled{opacity:.35;cursor:default}
footer{padding:.5rem 1.2rem;border-top:1px solid #eee;font-size:.9rem}
.prim{transition:opacity var(--dur) var(--easing),fill var(--dur) var(--easing),
  transform var(--dur) var(--easing);transform-box:fill-box;transform-origin:center}
.prim.nv-hidden{opacity:0 !important}
@keyframes nv-fade-in{from{opacity:0}}
@keyframes nv-fade-out{to{opacity:0}}
@keyframes nv-grow{from{transform:scale(0)}}
.fx-fade-in{animation:nv-fade-in var(--dur) var(--easing)}
.fx-fade-out{animation:nv-fade-out var(--dur) var(--easing) forwards}
.fx-grow{animation:nv-grow var(--dur) var(--easing)}
"""

_JS = r"""
(function () {
  "use strict";
  var DATA = JSON.parse(document.getElementById("deck-data").textContent);
  var containers = DATA.containers;
  var theme = DATA.theme;
  var prims = {};
  var pristine = {};
  document.querySelectorAll("[data-prim]").forEach(function (el) {
    var id = el.getAttribute("data-prim");
    prims[id] = el;
    pristine[id] = {
      fill: el.getAttribute("fill"),
      transform: el.getAttribute("transform"),
      d: el.getAttribute("d"),
      style: el.getAttribute("style")
    };
  });
  var unitOf = {};
  Object.keys(DATA.units).forEach(function (uid) {
    DATA.units[uid].forEach(function (pid) { unitOf[pid] = uid; });
  });

  var states = [];
  containers.forEach(function (c, ci) {
    states.push({ c: ci, s: null });
    c.steps.forEach(function (_, si) { states.push({ c: ci, s: si }); });
  });
  var cur = 0;
  var lastContainer = -1;

  var panelSections = document.querySelectorAll("#panel .slide");
  var annos = document.querySelectorAll("[data-anno]");

  function token() {
    if (DATA.student_token) return DATA.student_token;
    try {
      var t = localStorage.getItem("nv-token");
      if (!t) {
        t = "s-" + Math.random().toString(36).slice(2, 10);
        localStorage.setItem("nv-token", t);
      }
      return t;
    } catch (e) { return "s-anonymous"; }
  }

  function send(type, extra) {
    if (!DATA.beacon_url) return;
    var body = Object.assign({
      deck_id: DATA.deck_id,
      student_token: token(),
      event_type: type,
      slide_id: containers[cur < 0 ? 0 : states[cur].c].slide_id,
      timestamp_ms: Date.now()
    }, extra || {});
    try {
      fetch(DATA.beacon_url, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        keepalive: true
      }).catch(function () {});
    } catch (e) { /* never block playback */ }
  }

  function targetsOf(step, c) {
    if (step.targets === "all") {
      return c.unit_id && DATA.units[c.unit_id] ? DATA.units[c.unit_id] : Object.keys(prims);
    }
    return step.targets;
  }

  function resetScene() {
    Object.keys(prims).forEach(function (id) {
      var el = prims[id];
      var p = pristine[id];
      el.classList.remove("nv-hidden", "fx-fade-in", "fx-fade-out", "fx-grow");
      el.style.cssText = "";
      if (p.fill === null) el.removeAttribute("fill"); else el.setAttribute("fill", p.fill);
      if (p.transform === null) el.removeAttribute("transform"); else el.setAttribute("transform", p.transform);
      if (p.d !== null) el.setAttribute("d", p.d);
      if (p.style === null) el.removeAttribute("style"); else el.setAttribute("style", p.style);
    });
  }

  function render(instant) {
    var st = states[cur];
    var c = containers[st.c];
    resetScene();

    // panel + annotations + captions + questions
    panelSections.forEach(function (sec, i) { sec.hidden = i !== st.c; });
    var section = panelSections[st.c];
    if (section) {
      section.querySelectorAll("[data-step-index]").forEach(function (el) {
        el.hidden = st.s === null || Number(el.getAttribute("data-step-index")) > st.s;
      });
    }
    annos.forEach(function (g) {
      var show = Number(g.getAttribute("data-container")) === st.c &&
        st.s !== null && Number(g.getAttribute("data-step-index")) <= st.s;
      g.setAttribute("visibility", show ? "visible" : "hidden");
    });

    // visibility replay across slides
    var visible = {};
    var overviewState = c.unit_id === null;
    if (overviewState) {
      Object.keys(prims).forEach(function (id) { visible[id] = true; });
    } else {
      Object.keys(prims).forEach(function (id) {
        if (!unitOf[id]) visible[id] = true;  // primitives outside all units stay as context
      });
      containers.forEach(function (cj, j) {
        if (j > st.c || cj.unit_id === null) return;
        var upto = j < st.c ? cj.steps.length - 1 : (st.s === null ? -1 : st.s);
        cj.steps.forEach(function (step, si) {
          if (si > upto || step.kind !== "transition") return;
          var t = targetsOf(step, cj);
          if (step.effect === "fade_in" || step.effect === "grow") {
            t.forEach(function (id) { visible[id] = true; });
          } else if (step.effect === "fade_out") {
            t.forEach(function (id) { visible[id] = false; });
          }
        });
      });
    }

    // introduced-unit emphasis
    var introduced = {};
    containers.forEach(function (cj, j) {
      if (j <= st.c && cj.unit_id) introduced[cj.unit_id] = true;
    });
    Object.keys(prims).forEach(function (id) {
      var el = prims[id];
      if (!visible[id]) { el.classList.add("nv-hidden"); return; }
      var uid = unitOf[id];
      if (!overviewState && uid && uid !== c.unit_id) {
        el.style.opacity = String(theme.introduced_opacity);
      } else if (!overviewState && !uid && c.unit_id) {
        el.style.opacity = String(theme.introduced_opacity);
      }
    });

    // persistent effects of earlier steps in this slide
    if (st.s !== null) {
      for (var k = 0; k < st.s; k++) {
        var stp = c.steps[k];
        if (stp.kind !== "transition") continue;
        if (stp.effect === "change_size") {
          targetsOf(stp, c).forEach(function (id) {
            prims[id].style.transform = "scale(" + stp.scale + ")";
          });
        } else if (stp.effect === "morph") {
          Object.keys(stp.morph).forEach(function (id) {
            applyMorphEnd(prims[id], stp.morph[id]);
          });
        }
      }
      playStep(c.steps[st.s], c, instant);
    }

    document.getElementById("prev").disabled = cur === 0;
    document.getElementById("next").disabled = cur === states.length - 1;
    document.getElementById("pos").textContent = (st.c + 1) + " / " + containers.length;
    document.getElementById("progress").textContent =
      st.s === null ? "" : "step " + (st.s + 1) + " of " + c.steps.length;

    if (st.c !== lastContainer) {
      if (lastContainer >= 0) {
        send("slide_exit", { slide_id: containers[lastContainer].slide_id });
      }
      send("slide_enter", { slide_id: c.slide_id });
      lastContainer = st.c;
    }
  }

  function playStep(step, c, instant) {
    if (step.kind !== "transition") return;
    var t = targetsOf(step, c);
    var dur = step.duration_ms + "ms";
    if (step.effect === "fade_in") {
      t.forEach(function (id) {
        prims[id].style.animationDuration = dur;
        if (!instant) prims[id].classList.add("fx-fade-in");
      });
    } else if (step.effect === "fade_out") {
      t.forEach(function (id) {
        var el = prims[id];
        el.classList.remove("nv-hidden");
        el.style.animationDuration = dur;
        if (!instant) el.classList.add("fx-fade-out");
        else el.classList.add("nv-hidden");
      });
    } else if (step.effect === "grow") {
      t.forEach(function (id) {
        prims[id].style.animationDuration = dur;
        if (!instant) prims[id].classList.add("fx-grow");
      });
    } else if (step.effect === "change_size") {
      t.forEach(function (id) {
        var el = prims[id];
        el.style.transitionDuration = dur;
        if (instant) { el.style.transform = "scale(" + step.scale + ")"; return; }
        requestAnimationFrame(function () {
          el.style.transform = "scale(" + step.scale + ")";
        });
      });
    } else if (step.effect === "add_color") {
      t.forEach(function (id) {
        var el = prims[id];
        var own = pristine[id].fill;
        el.style.transitionDuration = dur;
        el.setAttribute("fill", step.from_color);
        if (instant) {
          if (own === null) el.removeAttribute("fill"); else el.setAttribute("fill", own);
          return;
        }
        requestAnimationFrame(function () {
          requestAnimationFrame(function () {
            if (own === null) el.removeAttribute("fill"); else el.setAttribute("fill", own);
          });
        });
      });
    } else if (step.effect === "highlight") {
      Object.keys(prims).forEach(function (id) {
        if (t.indexOf(id) >= 0 || prims[id].classList.contains("nv-hidden")) return;
        prims[id].style.opacity = String(step.dim_opacity);
      });
      t.forEach(function (id) { prims[id].style.opacity = "1"; });
    } else if (step.effect === "morph") {
      Object.keys(step.morph).forEach(function (id) {
        if (instant) applyMorphEnd(prims[id], step.morph[id]);
        else animateMorph(prims[id], step.morph[id], step.duration_ms);
      });
    }
  }

  function applyMorphEnd(el, m) {
    if (m.mode === "attrs") {
      Object.keys(m.to).forEach(function (k) { el.setAttribute(k, m.to[k]); });
    } else {
      el.setAttribute("d", m.to);
    }
  }

  var NUM = /[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?/g;

  function lerpNumbers(from, to, t) {
    var a = from.match(NUM).map(Number);
    var b = to.match(NUM).map(Number);
    var i = -1;
    return to.replace(NUM, function () {
      i += 1;
      return (a[i] + (b[i] - a[i]) * t).toFixed(2);
    });
  }

  function animateMorph(el, m, duration) {
    var start = null;
    function frame(ts) {
      if (start === null) start = ts;
      var t = Math.min(1, (ts - start) / duration);
      var e = t < 0.5 ? 2 * t * t : 1 - Math.pow(-2 * t + 2, 2) / 2;
      if (m.mode === "attrs") {
        Object.keys(m.to).forEach(function (k) {
          el.setAttribute(k, m.from[k] + (m.to[k] - m.from[k]) * e);
        });
      } else {
        el.setAttribute("d", lerpNumbers(m.from, m.to, e));
      }
      if (t < 1) requestAnimationFrame(frame);
      else applyMorphEnd(el, m);
    }
    requestAnimationFrame(frame);
  }

  function go(delta) {
    var next = cur + delta;
    if (next < 0 || next >= states.length) return;
    cur = next;
    render(delta < 0);
  }

  document.getElementById("next").addEventListener("click", function () { go(1); });
  document.getElementById("prev").addEventListener("click", function () { go(-1); });
  document.addEventListener("keydown", function (ev) {
    if (ev.key === "ArrowRight" || ev.key === " ") go(1);
    else if (ev.key === "ArrowLeft") go(-1);
  });

  document.querySelectorAll("form.question").forEach(function (form) {
    form.addEventListener("submit", function (ev) {
      ev.preventDefault();
      var qid = form.getAttribute("data-question-id");
      var selected = [];
      form.querySelectorAll("input:checked").forEach(function (inp) {
        selected.push(Number(inp.value));
      });
      var out = form.querySelector("output");
      if (!selected.length) { out.textContent = "Pick an option first."; return; }
      var correct = null;
      containers.forEach(function (c) {
        c.steps.forEach(function (s) {
          if (s.kind === "question" && s.question_id === qid) correct = s.correct;
        });
      });
      var ok = correct !== null && correct.length === selected.length &&
        correct.every(function (v) { return selected.indexOf(v) >= 0; });
      out.textContent = ok ? "Correct!" : "Not quite - have another look.";
      send("answer", { question_id: qid, selected: selected.slice().sort() });
    });
  });

  document.getElementById("comment-form").addEventListener("submit", function (ev) {
    ev.preventDefault();
    var input = ev.target.querySelector("input[name=text]");
    if (!input.value) return;
    send("comment", { text: input.value });
    ev.target.querySelector("output").textContent = "Thanks!";
    input.value = "";
  });

  render(true);
})();
"""
