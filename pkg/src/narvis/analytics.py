"""Viewer-event ingestion and the aggregates behind the feedback charts.

Events arrive as append-only newline-delimited JSON per deck.  Aggregation
replays each student's events in timestamp order: every stay on a slide
becomes a dwell segment, the k-th stay on the same slide is viewing pass k,
and per-slide means are taken over the students who reached that pass.
Client timestamps drive all durations; a silence longer than the session
gap inside a segment truncates it (abandoned tabs must not dominate means).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NarvisError, SchemaViolation
from .deck import Deck, QuestionSpec

EVENT_TYPES = ("slide_enter", "slide_exit", "answer", "comment")
SESSION_GAP_MS = 30 * 60 * 1000


class UnknownDeck(NarvisError):
    code = "unknown_deck"


@dataclass(frozen=True)
class ViewerEvent:
    deck_id: str
    student_token: str
    event_type: str
    timestamp_ms: int
    slide_id: str | None = None
    question_id: str | None = None
    selected: tuple[int, ...] | None = None
    text: str | None = None


def event_from_json(data: dict) -> ViewerEvent:
    if not isinstance(data, dict):
        raise SchemaViolation("event must be an object", pointer="")
    for key in ("deck_id", "student_token", "event_type", "timestamp_ms"):
        if key not in data:
            raise SchemaViolation(f"missing required field {key!r}", pointer=f"/{key}")
    etype = data["event_type"]
    if etype not in EVENT_TYPES:
        raise SchemaViolation(f"must be one of {', '.join(EVENT_TYPES)}",
                              pointer="/event_type")
    if not isinstance(data["timestamp_ms"], (int, float)) or isinstance(data["timestamp_ms"], bool):
        raise SchemaViolation("number expected", pointer="/timestamp_ms")
    if etype in ("slide_enter", "slide_exit") and not data.get("slide_id"):
        raise SchemaViolation("enter/exit events need slide_id", pointer="/slide_id")
    if etype == "answer":
        if not data.get("question_id"):
            raise SchemaViolation("answer events need question_id", pointer="/question_id")
        if not isinstance(data.get("selected"), list):
            raise SchemaViolation("answer events need a selected array", pointer="/selected")
    if etype == "comment" and not isinstance(data.get("text"), str):
        raise SchemaViolation("comment events need text", pointer="/text")
    known = {"deck_id", "student_token", "event_type", "timestamp_ms", "slide_id",
             "question_id", "selected", "text"}
    for key in data:
        if key not in known:
            raise SchemaViolation(f"unknown field {key!r}", pointer=f"/{key}")
    return ViewerEvent(
        deck_id=data["deck_id"],
        student_token=data["student_token"],
        event_type=etype,
        timestamp_ms=int(data["timestamp_ms"]),
        slide_id=data.get("slide_id"),
        question_id=data.get("question_id"),
        selected=tuple(data["selected"]) if etype == "answer" else None,
        text=data.get("text"),
    )


def event_to_json(ev: ViewerEvent) -> dict:
    out = {"deck_id": ev.deck_id, "student_token": ev.student_token,
           "event_type": ev.event_type, "timestamp_ms": ev.timestamp_ms}
    if ev.slide_id is not None:
        out["slide_id"] = ev.slide_id
    if ev.question_id is not None:
        out["question_id"] = ev.question_id
    if ev.selected is not None:
        out["selected"] = list(ev.selected)
    if ev.text is not None:
        out["text"] = ev.text
    return out


class EventLog:
    """Append-only event store; file-backed when a path is given."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.events: list[ViewerEvent] = []
        if self.path and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self.events.append(event_from_json(json.loads(line)))

    def append(self, event: ViewerEvent) -> int:
        position = len(self.events)
        if self.path:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event_to_json(event), sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        self.events.append(event)
        return position

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


def ingest(log: EventLog, event: ViewerEvent) -> int:
    """Append one event; the entry is durable before the position returns."""
    return log.append(event)


def read_ndjson(path: str | Path) -> list[ViewerEvent]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                events.append(event_from_json(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"line {i + 1}: {exc}", pointer="") from exc
    return events


# ---------------------------------------------------------------------------
# aggregation

@dataclass
class DeckStats:
    per_slide: list[dict]                    # {slide_id, pass_means_s: [..]}
    per_student: dict[str, list[tuple[int, float]]]
    per_question: dict[str, dict]            # {answers, correct, accuracy}
    comments: list[dict]
    quality: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_slide": self.per_slide,
            "per_student": {k: [[t, s] for t, s in v] for k, v in self.per_student.items()},
            "per_question": self.per_question,
            "comments": self.comments,
            "quality": self.quality,
        }


@dataclass
class _Segment:
    slide_id: str
    start_ms: int
    end_ms: int
    duration_s: float


def aggregate(deck_id: str, events, deck: Deck | None = None,
              question_keys: dict[str, frozenset[int]] | None = None) -> DeckStats:
    """Replay a deck's event log into the per-slide / per-student / per-question stats."""
    events = [e for e in events if e.deck_id == deck_id]
    keys = dict(question_keys or {})
    if deck is not None:
        for _, step in deck.all_steps():
            if isinstance(step.spec, QuestionSpec):
                keys.setdefault(step.spec.question_id, step.spec.correct)

    by_student: dict[str, list[ViewerEvent]] = {}
    for ev in events:
        by_student.setdefault(ev.student_token, []).append(ev)

    quality = {"dangling_segments": 0, "truncated_segments": 0, "orphan_exits": 0}
    slide_order: list[str] = []
    passes: dict[str, dict[str, list[float]]] = {}   # student -> slide -> durations
    cumulative: dict[str, list[tuple[int, float]]] = {}
    first_answers: dict[tuple[str, str], tuple[int, ...]] = {}
    comments: list[dict] = []

    for student, evs in by_student.items():
        evs = sorted(evs, key=lambda e: e.timestamp_ms)
        segments = _replay_segments(evs, quality)
        passes[student] = {}
        series: list[tuple[int, float]] = []
        total = 0.0
        for seg in segments:
            passes[student].setdefault(seg.slide_id, []).append(seg.duration_s)
            if seg.slide_id not in slide_order:
                slide_order.append(seg.slide_id)
            total += seg.duration_s
            series.append((seg.end_ms, round(total, 6)))
        cumulative[student] = series
        for ev in evs:
            if ev.event_type == "answer":
                first_answers.setdefault((student, ev.question_id),
                                         tuple(sorted(ev.selected or ())))
            elif ev.event_type == "comment":
                comments.append({"student_token": student, "text": ev.text,
                                 "timestamp_ms": ev.timestamp_ms,
                                 "slide_id": ev.slide_id})

    per_slide = []
    for slide_id in slide_order:
        max_pass = max(len(p.get(slide_id, [])) for p in passes.values())
        means = []
        for k in range(max_pass):
            values = [p[slide_id][k] for p in passes.values()
                      if len(p.get(slide_id, [])) > k]
            means.append(round(sum(values) / len(values), 6))
        per_slide.append({"slide_id": slide_id, "pass_means_s": means})

    per_question: dict[str, dict] = {}
    for (_, qid), selected in sorted(first_answers.items()):
        entry = per_question.setdefault(qid, {"answers": 0, "correct": 0, "accuracy": 0.0})
        entry["answers"] += 1
        if qid in keys and frozenset(selected) == keys[qid]:
            entry["correct"] += 1
    for entry in per_question.values():
        entry["accuracy"] = (entry["correct"] / entry["answers"]) if entry["answers"] else 0.0

    comments.sort(key=lambda c: c["timestamp_ms"])
    return DeckStats(per_slide, cumulative, per_question, comments, quality)


def _replay_segments(evs: list[ViewerEvent], quality: dict) -> list[_Segment]:
    segments: list[_Segment] = []
    open_slide: str | None = None
    open_start = 0
    inner: list[int] = []
    final_ts = evs[-1].timestamp_ms if evs else 0

    def close(end_ms: int):
        nonlocal open_slide
        times = [open_start] + inner + [end_ms]
        end = end_ms
        for a, b in zip(times, times[1:]):
            if b - a > SESSION_GAP_MS:
                end = a
                quality["truncated_segments"] += 1
                break
        segments.append(_Segment(open_slide, open_start, end, (end - open_start) / 1000.0))
        open_slide = None

    for ev in evs:
        if ev.event_type == "slide_enter":
            if open_slide is not None:
                close(ev.timestamp_ms)
            open_slide = ev.slide_id
            open_start = ev.timestamp_ms
            inner = []
        elif ev.event_type == "slide_exit":
            if open_slide == ev.slide_id:
                close(ev.timestamp_ms)
            else:
                quality["orphan_exits"] += 1
                if open_slide is not None:
                    inner.append(ev.timestamp_ms)  # still counts as activity
        else:
            if open_slide is not None:
                inner.append(ev.timestamp_ms)
    if open_slide is not None:
        if final_ts > open_start:
            close(final_ts)
        else:
            quality["dangling_segments"] += 1
    return segments
