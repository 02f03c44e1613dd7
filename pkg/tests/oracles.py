"""Independent brute-force oracles and randomized generators for tests.

Everything here is deliberately written without reusing the library's
algorithms: permutation checking walks raw edge tuples, the replay oracle
re-derives dwell times from scratch, and generators build plain dicts.
"""

from __future__ import annotations

import itertools
import random

from narvis.analytics import ViewerEvent
from narvis.channels import SALIENCE_RANK
from narvis.component_tree import VisualUnit
from narvis.deck import (AnnotationSpec, Deck, QuestionSpec, Slide, Step,
                         TransitionSpec)
from narvis.narrative import NarrativeSequence

SESSION_GAP_MS = 30 * 60 * 1000


# ---------------------------------------------------------------------------
# sequencing

def brute_force_valid_orders(units: list[str],
                             dependent_edges: list[tuple[str, str]]) -> set[tuple[str, ...]]:
    """All permutations where every (prerequisite, dependent) pair is in order."""
    valid = set()
    for perm in itertools.permutations(units):
        index = {u: i for i, u in enumerate(perm)}
        if all(index[pre] < index[dep] for pre, dep in dependent_edges):
            valid.add(perm)
    return valid


def random_dag(rng: random.Random, n_units: int) -> tuple[list[str], list[tuple[str, str, str]]]:
    """Units plus (a, b, kind) triples; dependent edges follow a random topological
    order so the graph is a DAG by construction."""
    units = [f"u{i}" for i in range(n_units)]
    rank = units[:]
    rng.shuffle(rank)
    position = {u: i for i, u in enumerate(rank)}
    triples = []
    for a, b in itertools.combinations(units, 2):
        roll = rng.random()
        if roll < 0.25:
            pre, dep = (a, b) if position[a] < position[b] else (b, a)
            triples.append((pre, dep, "dependent"))
        elif roll < 0.4:
            triples.append((a, b, "independent"))
    return units, triples


def enumerate_graphs(units: list[str]):
    """Every assignment of {none, independent, a->b, b->a} to each pair,
    keeping only acyclic dependent subgraphs."""
    pairs = list(itertools.combinations(units, 2))
    for assignment in itertools.product(range(4), repeat=len(pairs)):
        dependent = []
        independent = []
        for (a, b), code in zip(pairs, assignment):
            if code == 1:
                independent.append((a, b))
            elif code == 2:
                dependent.append((a, b))
            elif code == 3:
                dependent.append((b, a))
        if _has_cycle(units, dependent):
            continue
        yield dependent, independent


def _has_cycle(units, dependent) -> bool:
    adjacency = {u: [] for u in units}
    for pre, dep in dependent:
        adjacency[pre].append(dep)
    state = dict.fromkeys(units, 0)

    def visit(u) -> bool:
        if state[u] == 1:
            return True
        if state[u] == 2:
            return False
        state[u] = 1
        if any(visit(v) for v in adjacency[u]):
            return True
        state[u] = 2
        return False

    return any(visit(u) for u in units)


# ---------------------------------------------------------------------------
# analytics replay

def replay_oracle(events: list[ViewerEvent]) -> dict:
    """Straight re-derivation of per-slide pass means and per-student totals."""
    students = sorted({e.student_token for e in events})
    slide_passes: dict[str, dict[str, list[float]]] = {}
    totals: dict[str, float] = {}
    for student in students:
        evs = sorted([e for e in events if e.student_token == student],
                     key=lambda e: e.timestamp_ms)
        if not evs:
            continue
        last_ts = evs[-1].timestamp_ms
        visits: list[tuple[str, int, int]] = []
        current = None
        marks: list[int] = []
        for e in evs:
            if e.event_type == "slide_enter":
                if current is not None:
                    visits.append((current, marks[0], e.timestamp_ms))
                current = e.slide_id
                marks = [e.timestamp_ms]
            elif e.event_type == "slide_exit" and current == e.slide_id:
                visits.append((current, marks[0], e.timestamp_ms))
                current = None
            elif current is not None:
                marks.append(e.timestamp_ms)
        if current is not None and last_ts > marks[0]:
            visits.append((current, marks[0], last_ts))

        total = 0.0
        for slide, start, end in visits:
            # truncate at the first >30 min silence inside the visit
            stamps = sorted(e2.timestamp_ms for e2 in evs
                            if start <= e2.timestamp_ms <= end)
            cut = end
            prev = start
            for t in stamps:
                if t - prev > SESSION_GAP_MS:
                    cut = prev
                    break
                prev = t
            duration = (cut - start) / 1000.0
            slide_passes.setdefault(slide, {}).setdefault(student, []).append(duration)
            total += duration
        totals[student] = round(total, 6)

    means: dict[str, list[float]] = {}
    for slide, per_student in slide_passes.items():
        depth = max(len(v) for v in per_student.values())
        means[slide] = []
        for k in range(depth):
            vals = [v[k] for v in per_student.values() if len(v) > k]
            means[slide].append(round(sum(vals) / len(vals), 6))
    return {"pass_means": means, "totals": totals}


def random_event_log(rng: random.Random, deck_id: str, max_events: int = 200
                     ) -> list[ViewerEvent]:
    slides = [f"slide{i}" for i in range(rng.randint(1, 6))]
    questions = [f"q{i}" for i in range(rng.randint(0, 3))]
    events: list[ViewerEvent] = []
    for s in range(rng.randint(1, 5)):
        student = f"stu{s}"
        ts = rng.randint(0, 5000)
        current = None
        for _ in range(rng.randint(1, max_events // 5)):
            ts += rng.randint(100, 60_000)
            roll = rng.random()
            if roll < 0.45 or current is None:
                current = rng.choice(slides)
                events.append(ViewerEvent(deck_id, student, "slide_enter", ts,
                                          slide_id=current))
            elif roll < 0.6:
                events.append(ViewerEvent(deck_id, student, "slide_exit", ts,
                                          slide_id=current))
                current = None
            elif roll < 0.8 and questions:
                events.append(ViewerEvent(deck_id, student, "answer", ts,
                                          slide_id=current,
                                          question_id=rng.choice(questions),
                                          selected=tuple(sorted(rng.sample(range(3),
                                                                rng.randint(1, 2))))))
            else:
                events.append(ViewerEvent(deck_id, student, "comment", ts,
                                          slide_id=current, text="note"))
    return events[:max_events]


# ---------------------------------------------------------------------------
# decks

def random_deck(rng: random.Random) -> Deck:
    n_units = rng.randint(1, 4)
    units = []
    for i in range(n_units):
        prims = tuple(f"p{i}-{j}" for j in range(rng.randint(1, 6)))
        units.append(VisualUnit(f"u{i}", f"unit {i}", prims, f"n{i}"))
    order = [u.unit_id for u in units]
    rng.shuffle(order)
    seq = NarrativeSequence(tuple(order), rng.choice(["suggested", "author_adjusted"]))

    slides = []
    counter = 0
    for uid in order:
        unit = next(u for u in units if u.unit_id == uid)
        for _ in range(rng.randint(1, 3)):
            slide_id = f"s{counter}"
            counter += 1
            steps = []
            for si in range(rng.randint(1, 4)):
                steps.append(Step(f"{slide_id}-st{si}", _random_spec(rng, unit, slide_id, si)))
            slides.append(Slide(slide_id, uid, tuple(steps),
                                channel_tags=tuple(rng.sample(list(SALIENCE_RANK),
                                                              rng.randint(0, 2))),
                                notes=rng.choice(["", "watch this", "key idea"])))
    return Deck(deck_id=f"deck-{rng.randint(0, 999)}", title="random deck",
                sequence=seq, slides=tuple(slides), units=tuple(units),
                overview_slide=rng.random() < 0.5, svg_doc_ref="doc")


def _random_spec(rng: random.Random, unit, slide_id, si):
    kind = rng.random()
    if kind < 0.45:
        effect = rng.choice(["fade_in", "fade_out", "grow", "change_size",
                             "add_color", "highlight"])
        targets = "all" if rng.random() < 0.4 else tuple(
            sorted(rng.sample(unit.primitive_ids,
                              rng.randint(1, len(unit.primitive_ids)))))
        params = {}
        if effect == "highlight":
            params["dim_opacity"] = round(rng.uniform(0.05, 0.4), 2)
        if effect == "change_size":
            params["scale"] = round(rng.uniform(0.5, 3.0), 2)
        return TransitionSpec(effect, targets, rng.randint(100, 2000), params)
    if kind < 0.8:
        form = rng.choice(["color_legend", "circle", "arrow_line",
                           "double_arrow_line", "freeform_line", "text"])
        n_points = 2 if form in ("freeform_line", "arrow_line", "double_arrow_line") else 1
        geometry = tuple((round(rng.uniform(0, 500), 1), round(rng.uniform(0, 400), 1))
                         for _ in range(n_points))
        return AnnotationSpec(form, geometry, content=rng.choice(["", "note", "a:#FF0000FF"]),
                              style={"stroke": "#D94A38"} if rng.random() < 0.5 else {})
    n_opts = rng.randint(2, 5)
    mode = rng.choice(["single_choice", "multiple_choice"])
    if mode == "single_choice":
        correct = frozenset({rng.randrange(n_opts)})
    else:
        correct = frozenset(rng.sample(range(n_opts), rng.randint(1, n_opts)))
    return QuestionSpec(f"{slide_id}-q{si}", mode, "what does this show?",
                        tuple(f"option {i}" for i in range(n_opts)), correct)
