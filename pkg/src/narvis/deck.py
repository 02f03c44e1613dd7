"""The authored slideshow: slides, steps, transitions, annotations, questions.

Deck JSON (format_version 1) is the single persistence format shared by the
service, the compiler and the UI; parse_deck rejects unknown fields and bad
enum values with a JSON pointer to the offending spot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import NarvisError, SchemaViolation
from .channels import ChannelPlan
from .component_tree import VisualUnit
from .narrative import NarrativeSequence, sequence_from_json, sequence_to_json

FORMAT_VERSION = 1

EFFECTS = ("fade_in", "fade_out", "grow", "change_size", "add_color", "morph", "highlight")
ANNOTATION_FORMS = ("color_legend", "circle", "arrow_line", "double_arrow_line",
                    "freeform_line", "text")
QUESTION_MODES = ("single_choice", "multiple_choice")

EFFECT_DISPLAY = {
    "fade_in": "Fade-in",
    "fade_out": "Fade-out",
    "grow": "Growing",
    "change_size": "Changing-size",
    "add_color": "Add-color",
    "morph": "Morphing",
    "highlight": "Highlight",
}

DEFAULT_DURATION_MS = 800


class InvariantViolation(NarvisError):
    code = "invariant_violation"


class MissingPlan(NarvisError):
    code = "missing_plan"


class UnknownSlide(NarvisError):
    code = "unknown_slide"


class UnknownStep(NarvisError):
    code = "unknown_step"


class TargetOutsideUnit(NarvisError):
    code = "target_outside_unit"


# ---------------------------------------------------------------------------
# step payloads

@dataclass(frozen=True)
class TransitionSpec:
    effect: str
    targets: tuple[str, ...] | str = "all"   # explicit ids or "all" (whole unit)
    duration_ms: int = DEFAULT_DURATION_MS
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.effect not in EFFECTS:
            raise InvariantViolation(f"unknown transition effect {self.effect!r}")
        if isinstance(self.targets, str):
            if self.targets != "all":
                raise InvariantViolation('targets must be a tuple of ids or "all"')
        elif not self.targets:
            raise InvariantViolation("transition needs at least one target")
        if self.duration_ms <= 0:
            raise InvariantViolation("duration_ms must be positive")
        if self.effect == "morph":
            if self.targets == "all":
                raise InvariantViolation("morph requires explicit target ids")
            geometry = self.params.get("target")
            if not isinstance(geometry, dict) or not set(self.targets) <= set(geometry):
                raise InvariantViolation("morph requires a target geometry per primitive")

    def target_ids(self) -> tuple[str, ...]:
        return () if self.targets == "all" else tuple(self.targets)


@dataclass(frozen=True)
class AnnotationSpec:
    form: str
    geometry: tuple[tuple[float, float], ...]
    content: str = ""
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.form not in ANNOTATION_FORMS:
            raise InvariantViolation(f"unknown annotation form {self.form!r}")
        if not self.geometry:
            raise InvariantViolation("annotation needs at least one anchor point")
        if self.form == "freeform_line" and len(self.geometry) < 2:
            raise InvariantViolation("freeform_line needs at least two points")

    @property
    def is_text(self) -> bool:
        return self.form == "text"


@dataclass(frozen=True)
class QuestionSpec:
    question_id: str
    mode: str
    prompt: str
    options: tuple[str, ...]
    correct: frozenset[int]

    def __post_init__(self):
        if self.mode not in QUESTION_MODES:
            raise InvariantViolation(f"unknown question mode {self.mode!r}")
        if len(self.options) < 2:
            raise InvariantViolation("question needs at least two options")
        if not self.correct:
            raise InvariantViolation("question needs at least one correct option")
        if self.mode == "single_choice" and len(self.correct) != 1:
            raise InvariantViolation("single_choice takes exactly one correct option")
        if not all(0 <= i < len(self.options) for i in self.correct):
            raise InvariantViolation("correct indices outside options range")


StepSpec = TransitionSpec | AnnotationSpec | QuestionSpec
_KIND_OF = {TransitionSpec: "transition", AnnotationSpec: "annotation", QuestionSpec: "question"}


@dataclass(frozen=True)
class Step:
    step_id: str
    spec: StepSpec

    @property
    def kind(self) -> str:
        return _KIND_OF[type(self.spec)]


@dataclass(frozen=True)
class Slide:
    slide_id: str
    unit_id: str | None          # None marks the sequence-overview slide
    steps: tuple[Step, ...]
    channel_tags: tuple[str, ...] = ()
    notes: str = ""

    def __post_init__(self):
        if not self.steps:
            raise InvariantViolation(f"slide {self.slide_id!r} has no steps")


@dataclass(frozen=True)
class Deck:
    deck_id: str
    title: str
    sequence: NarrativeSequence
    slides: tuple[Slide, ...]
    units: tuple[VisualUnit, ...] = ()
    overview_slide: bool = True
    svg_doc_ref: str = ""

    def find_slide(self, slide_id: str) -> Slide:
        for slide in self.slides:
            if slide.slide_id == slide_id:
                return slide
        raise UnknownSlide(f"slide {slide_id!r} not in deck")

    def unit_primitives(self, unit_id: str) -> tuple[str, ...]:
        for unit in self.units:
            if unit.unit_id == unit_id:
                return unit.primitive_ids
        return ()

    def all_steps(self) -> list[tuple[Slide, Step]]:
        return [(slide, step) for slide in self.slides for step in slide.steps]


def validate_deck(deck: Deck) -> None:
    """Re-check cross-slide invariants (slide/sequence order consistency)."""
    order = {u: i for i, u in enumerate(deck.sequence.order)}
    seen_units: list[str] = []
    unit_done = False
    for slide in deck.slides:
        if slide.unit_id is None:
            if unit_done or seen_units:
                raise InvariantViolation("overview slides must precede unit slides")
            continue
        if slide.unit_id not in order:
            raise InvariantViolation(
                f"slide {slide.slide_id!r} references unit {slide.unit_id!r} "
                "outside the narrative sequence")
        if not seen_units or seen_units[-1] != slide.unit_id:
            if slide.unit_id in seen_units:
                raise InvariantViolation(
                    f"slides of unit {slide.unit_id!r} are not contiguous")
            if seen_units and order[slide.unit_id] < order[seen_units[-1]]:
                raise InvariantViolation(
                    "slide order contradicts the narrative sequence "
                    f"({slide.unit_id!r} after {seen_units[-1]!r})")
            seen_units.append(slide.unit_id)
    step_ids = [step.step_id for _, step in deck.all_steps()]
    if len(step_ids) != len(set(step_ids)):
        raise InvariantViolation("step ids must be unique across the deck")


def orphaned_slides(deck: Deck, plans: dict[str, ChannelPlan]) -> list[str]:
    """Slides whose channel tags are no longer enabled in the unit's plan."""
    out = []
    for slide in deck.slides:
        if slide.unit_id is None or slide.unit_id not in plans:
            continue
        enabled = set(plans[slide.unit_id].enabled_channels())
        if any(tag not in enabled for tag in slide.channel_tags):
            out.append(slide.slide_id)
    return out


# ---------------------------------------------------------------------------
# assembly

def assemble_deck(sequence: NarrativeSequence, plans: list[ChannelPlan],
                  units: list[VisualUnit], *, deck_id: str = "deck",
                  title: str = "Untitled tutorial", svg_doc_ref: str = "",
                  overview_slide: bool = True) -> Deck:
    """Skeleton deck: sequence overview, then per unit an entrance slide
    followed by one slide per enabled channel, in plan order."""
    plan_by_unit = {p.unit_id: p for p in plans}
    unit_by_id = {u.unit_id: u for u in units}
    for unit_id in sequence.order:
        if unit_id not in plan_by_unit:
            raise MissingPlan(f"no channel plan for unit {unit_id!r}")
        if unit_id not in unit_by_id:
            raise MissingPlan(f"no unit definition for unit {unit_id!r}")

    slides: list[Slide] = []
    counter = 0

    def sid() -> str:
        nonlocal counter
        slide_id = f"s{counter}"
        counter += 1
        return slide_id

    if overview_slide:
        names = [unit_by_id[u].name for u in sequence.order]
        slide_id = sid()
        slides.append(Slide(
            slide_id=slide_id,
            unit_id=None,
            steps=(Step(f"{slide_id}-st0",
                        AnnotationSpec("text", ((0.0, 0.0),),
                                       "Reading order: " + " → ".join(names))),),
            notes="Narrative overview",
        ))
    for unit_id in sequence.order:
        unit = unit_by_id[unit_id]
        slide_id = sid()
        slides.append(Slide(
            slide_id=slide_id,
            unit_id=unit_id,
            steps=(Step(f"{slide_id}-st0", TransitionSpec("fade_in", "all")),),
            notes=f"Introduce {unit.name}",
        ))
        for channel in plan_by_unit[unit_id].enabled_channels():
            slide_id = sid()
            slides.append(Slide(
                slide_id=slide_id,
                unit_id=unit_id,
                channel_tags=(channel,),
                steps=(Step(f"{slide_id}-st0",
                            AnnotationSpec("text", ((0.0, 0.0),),
                                           f"{unit.name}: {channel}")),),
            ))
    deck = Deck(deck_id=deck_id, title=title, sequence=sequence,
                slides=tuple(slides), units=tuple(units),
                overview_slide=overview_slide, svg_doc_ref=svg_doc_ref)
    validate_deck(deck)
    return deck


# ---------------------------------------------------------------------------
# slide edits

@dataclass(frozen=True)
class AddStep:
    step: Step
    index: int | None = None


@dataclass(frozen=True)
class RemoveStep:
    step_id: str


@dataclass(frozen=True)
class ReorderSteps:
    step_ids: tuple[str, ...]


@dataclass(frozen=True)
class SetNotes:
    notes: str


@dataclass(frozen=True)
class RetargetStep:
    step_id: str
    targets: tuple[str, ...] | str


SlideEdit = AddStep | RemoveStep | ReorderSteps | SetNotes | RetargetStep


def edit_slide(deck: Deck, slide_id: str, edit: SlideEdit) -> Deck:
    """Apply one slide edit; all deck invariants are re-checked."""
    slide = deck.find_slide(slide_id)

    if isinstance(edit, AddStep):
        _check_targets(deck, slide, edit.step.spec)
        if any(s.step_id == edit.step.step_id for _, s in deck.all_steps()):
            raise InvariantViolation(f"step id {edit.step.step_id!r} already used")
        steps = list(slide.steps)
        steps.insert(len(steps) if edit.index is None else edit.index, edit.step)
        new_slide = replace(slide, steps=tuple(steps))
    elif isinstance(edit, RemoveStep):
        steps = [s for s in slide.steps if s.step_id != edit.step_id]
        if len(steps) == len(slide.steps):
            raise UnknownStep(f"step {edit.step_id!r} not in slide {slide_id!r}")
        if not steps:
            raise InvariantViolation("a slide must keep at least one step")
        new_slide = replace(slide, steps=tuple(steps))
    elif isinstance(edit, ReorderSteps):
        current = {s.step_id: s for s in slide.steps}
        if sorted(edit.step_ids) != sorted(current):
            raise InvariantViolation("reorder must permute the slide's own steps")
        new_slide = replace(slide, steps=tuple(current[i] for i in edit.step_ids))
    elif isinstance(edit, SetNotes):
        new_slide = replace(slide, notes=edit.notes)
    elif isinstance(edit, RetargetStep):
        matches = [s for s in slide.steps if s.step_id == edit.step_id]
        if not matches:
            raise UnknownStep(f"step {edit.step_id!r} not in slide {slide_id!r}")
        step = matches[0]
        if not isinstance(step.spec, TransitionSpec):
            raise InvariantViolation("only transitions can be retargeted")
        spec = replace(step.spec, targets=edit.targets if edit.targets == "all"
                       else tuple(edit.targets))
        _check_targets(deck, slide, spec)
        new_slide = replace(slide, steps=tuple(
            replace(s, spec=spec) if s.step_id == edit.step_id else s
            for s in slide.steps))
    else:
        raise InvariantViolation(f"unknown edit type {type(edit).__name__}")

    new_deck = replace(deck, slides=tuple(
        new_slide if s.slide_id == slide_id else s for s in deck.slides))
    validate_deck(new_deck)
    return new_deck


def _check_targets(deck: Deck, slide: Slide, spec: StepSpec) -> None:
    if not isinstance(spec, TransitionSpec) or spec.targets == "all":
        return
    if slide.unit_id is None:
        raise TargetOutsideUnit("overview slides cannot target primitives")
    allowed = set(deck.unit_primitives(slide.unit_id))
    if not allowed:
        return  # deck carries no membership; service always provides it
    outside = [t for t in spec.target_ids() if t not in allowed]
    if outside:
        raise TargetOutsideUnit(
            f"targets {outside} are not part of unit {slide.unit_id!r}")


# ---------------------------------------------------------------------------
# stats (Table-style deck report)

@dataclass(frozen=True)
class SlideStats:
    slide_id: str
    transition_types: tuple[str, ...]
    transitions: int
    symbol_annotations: int
    text_annotations: int


def deck_stats(deck: Deck) -> list[SlideStats]:
    rows = []
    for slide in deck.slides:
        types: list[str] = []
        n_trans = n_symbol = n_text = 0
        for step in slide.steps:
            spec = step.spec
            if isinstance(spec, TransitionSpec):
                n_trans += 1
                display = EFFECT_DISPLAY[spec.effect]
                if display not in types:
                    types.append(display)
            elif isinstance(spec, AnnotationSpec):
                if spec.is_text:
                    n_text += 1
                else:
                    n_symbol += 1
        rows.append(SlideStats(slide.slide_id, tuple(types), n_trans, n_symbol, n_text))
    return rows


def stats_to_json(rows: list[SlideStats]) -> list[dict]:
    return [{"slide_id": r.slide_id, "transition_types": list(r.transition_types),
             "transitions": r.transitions, "symbol_annotations": r.symbol_annotations,
             "text_annotations": r.text_annotations} for r in rows]


def format_stats_table(rows: list[SlideStats]) -> str:
    """Plain-text table: one column per slide, the four observation rows."""
    headers = [""] + [f"Slide {i + 1}" for i in range(len(rows))]
    body = [
        ["Types of Animated Transitions"] + [", ".join(r.transition_types) or "N/A" for r in rows],
        ["Number of Animated Transitions"] + [str(r.transitions) for r in rows],
        ["Number of Symbol-based Annotation"] + [str(r.symbol_annotations) for r in rows],
        ["Number of Text-based Annotation"] + [str(r.text_annotations) for r in rows],
    ]
    widths = [max(len(line[i]) for line in [headers] + body) for i in range(len(headers))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join(fmt.format(*line).rstrip() for line in [headers] + body)


# ---------------------------------------------------------------------------
# serialization

def serialize_deck(deck: Deck) -> str:
    return json.dumps(deck_to_json(deck), indent=2, sort_keys=True)


def deck_to_json(deck: Deck) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "deck_id": deck.deck_id,
        "title": deck.title,
        "sequence": sequence_to_json(deck.sequence),
        "overview_slide": deck.overview_slide,
        "svg_doc_ref": deck.svg_doc_ref,
        "units": [{"unit_id": u.unit_id, "name": u.name,
                   "primitive_ids": list(u.primitive_ids), "source_node": u.source_node}
                  for u in deck.units],
        "slides": [_slide_to_json(s) for s in deck.slides],
    }


def _slide_to_json(slide: Slide) -> dict:
    return {
        "slide_id": slide.slide_id,
        "unit_id": slide.unit_id,
        "channel_tags": list(slide.channel_tags),
        "notes": slide.notes,
        "steps": [_step_to_json(s) for s in slide.steps],
    }


def _step_to_json(step: Step) -> dict:
    spec = step.spec
    out: dict = {"step_id": step.step_id, "kind": step.kind}
    if isinstance(spec, TransitionSpec):
        out["effect"] = spec.effect
        out["target_primitive_ids"] = ("all" if spec.targets == "all"
                                       else list(spec.targets))
        out["duration_ms"] = spec.duration_ms
        out["params"] = spec.params
    elif isinstance(spec, AnnotationSpec):
        out["form"] = spec.form
        out["geometry"] = [list(p) for p in spec.geometry]
        out["content"] = spec.content
        out["style"] = spec.style
    else:
        out["question_id"] = spec.question_id
        out["mode"] = spec.mode
        out["prompt"] = spec.prompt
        out["options"] = list(spec.options)
        out["correct"] = sorted(spec.correct)
    return out


# -- validating parse -------------------------------------------------------

def parse_deck(text: str) -> Deck:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}", pointer="") from exc
    return deck_from_json(data)


def deck_from_json(data) -> Deck:
    fields = _obj(data, "", {"format_version", "deck_id", "title", "sequence",
                             "overview_slide", "svg_doc_ref", "slides"}, {"units"})
    if fields["format_version"] != FORMAT_VERSION:
        raise SchemaViolation(f"unsupported format_version {fields['format_version']!r}",
                              pointer="/format_version")
    seq_fields = _obj(fields["sequence"], "/sequence", {"order", "provenance"}, set())
    _expect(isinstance(seq_fields["order"], list), "/sequence/order", "array expected")
    _expect(seq_fields["provenance"] in ("suggested", "author_adjusted"),
            "/sequence/provenance", "must be suggested|author_adjusted")
    sequence = sequence_from_json(seq_fields)

    units = []
    for i, item in enumerate(_array(fields.get("units", []), "/units")):
        uf = _obj(item, f"/units/{i}", {"unit_id", "name", "primitive_ids"}, {"source_node"})
        units.append(VisualUnit(uf["unit_id"], uf["name"],
                                tuple(_array(uf["primitive_ids"], f"/units/{i}/primitive_ids")),
                                uf.get("source_node", "")))

    slides = []
    for i, item in enumerate(_array(fields["slides"], "/slides")):
        slides.append(_slide_from_json(item, f"/slides/{i}"))

    _expect(isinstance(fields["overview_slide"], bool), "/overview_slide", "boolean expected")
    try:
        deck = Deck(deck_id=_string(fields["deck_id"], "/deck_id"),
                    title=_string(fields["title"], "/title"),
                    sequence=sequence, slides=tuple(slides), units=tuple(units),
                    overview_slide=fields["overview_slide"],
                    svg_doc_ref=_string(fields["svg_doc_ref"], "/svg_doc_ref"))
        validate_deck(deck)
    except InvariantViolation as exc:
        raise SchemaViolation(str(exc), pointer="") from exc
    return deck


def _slide_from_json(data, ptr: str) -> Slide:
    fields = _obj(data, ptr, {"slide_id", "unit_id", "steps"}, {"channel_tags", "notes"})
    unit_id = fields["unit_id"]
    if unit_id is not None:
        unit_id = _string(unit_id, f"{ptr}/unit_id")
    steps = []
    for i, item in enumerate(_array(fields["steps"], f"{ptr}/steps")):
        steps.append(_step_from_json(item, f"{ptr}/steps/{i}"))
    try:
        return Slide(slide_id=_string(fields["slide_id"], f"{ptr}/slide_id"),
                     unit_id=unit_id, steps=tuple(steps),
                     channel_tags=tuple(_array(fields.get("channel_tags", []),
                                               f"{ptr}/channel_tags")),
                     notes=fields.get("notes", ""))
    except InvariantViolation as exc:
        raise SchemaViolation(str(exc), pointer=ptr) from exc


def _step_from_json(data, ptr: str) -> Step:
    kind = _obj(data, ptr, {"step_id", "kind"}, None, partial=True).get("kind")
    try:
        if kind == "transition":
            fields = _obj(data, ptr, {"step_id", "kind", "effect"},
                          {"target_primitive_ids", "duration_ms", "params"})
            effect = fields["effect"]
            _expect(effect in EFFECTS, f"{ptr}/effect",
                    f"must be one of {', '.join(EFFECTS)}")
            targets = fields.get("target_primitive_ids", "all")
            if targets != "all":
                targets = tuple(_array(targets, f"{ptr}/target_primitive_ids"))
            duration = fields.get("duration_ms", DEFAULT_DURATION_MS)
            _expect(isinstance(duration, int) and not isinstance(duration, bool),
                    f"{ptr}/duration_ms", "integer expected")
            spec: StepSpec = TransitionSpec(effect, targets, duration,
                                            fields.get("params", {}))
        elif kind == "annotation":
            fields = _obj(data, ptr, {"step_id", "kind", "form", "geometry"},
                          {"content", "style"})
            form = fields["form"]
            _expect(form in ANNOTATION_FORMS, f"{ptr}/form",
                    f"must be one of {', '.join(ANNOTATION_FORMS)}")
            geometry = tuple(
                (float(p[0]), float(p[1]))
                for p in _array(fields["geometry"], f"{ptr}/geometry"))
            spec = AnnotationSpec(form, geometry, fields.get("content", ""),
                                  fields.get("style", {}))
        elif kind == "question":
            fields = _obj(data, ptr, {"step_id", "kind", "question_id", "mode",
                                      "prompt", "options", "correct"}, set())
            _expect(fields["mode"] in QUESTION_MODES, f"{ptr}/mode",
                    f"must be one of {', '.join(QUESTION_MODES)}")
            spec = QuestionSpec(fields["question_id"], fields["mode"], fields["prompt"],
                                tuple(_array(fields["options"], f"{ptr}/options")),
                                frozenset(_array(fields["correct"], f"{ptr}/correct")))
        else:
            raise SchemaViolation("kind must be transition|annotation|question",
                                  pointer=f"{ptr}/kind")
    except InvariantViolation as exc:
        raise SchemaViolation(str(exc), pointer=ptr) from exc
    except (TypeError, ValueError) as exc:
        raise SchemaViolation(f"malformed step: {exc}", pointer=ptr) from exc
    return Step(_string(data["step_id"], f"{ptr}/step_id"), spec)


def _obj(data, ptr: str, required: set[str], optional: set[str] | None,
         partial: bool = False) -> dict:
    if not isinstance(data, dict):
        raise SchemaViolation("object expected", pointer=ptr or "")
    if partial:
        return data
    for key in required:
        if key not in data:
            raise SchemaViolation(f"missing required field {key!r}", pointer=f"{ptr}/{key}")
    allowed = required | (optional or set())
    for key in data:
        if key not in allowed:
            raise SchemaViolation(f"unknown field {key!r}", pointer=f"{ptr}/{key}")
    return data


def _array(data, ptr: str) -> list:
    if not isinstance(data, list):
        raise SchemaViolation("array expected", pointer=ptr)
    return data


def _string(data, ptr: str) -> str:
    if not isinstance(data, str):
        raise SchemaViolation("string expected", pointer=ptr)
    return data


def _expect(cond: bool, ptr: str, message: str) -> None:
    if not cond:
        raise SchemaViolation(message, pointer=ptr)
