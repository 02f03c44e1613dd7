"""Unit relation graph and narrative sequencing.

Dependent edges (prerequisite before dependent) are hard ordering
constraints and must stay acyclic; independent edges only express "these
belong together" and act as adjacency preferences when suggesting an order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import NarvisError

DEPENDENT = "dependent"
INDEPENDENT = "independent"


class UnknownUnit(NarvisError):
    code = "unknown_unit"


class SelfRelation(NarvisError):
    code = "self_relation"


class CycleIntroduced(NarvisError):
    code = "cycle_introduced"

    def __init__(self, message: str, cycle: list[str]):
        super().__init__(message)
        self.cycle = cycle

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["cycle"] = self.cycle
        return out


class NotAPermutation(NarvisError):
    code = "not_a_permutation"


@dataclass(frozen=True)
class Edge:
    from_unit: str   # prerequisite for dependent edges
    to_unit: str     # the unit that depends on from_unit
    kind: str

    def pair(self) -> frozenset[str]:
        return frozenset((self.from_unit, self.to_unit))


@dataclass(frozen=True)
class RelationGraph:
    units: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def dependents_of(self, unit: str) -> list[str]:
        return [e.to_unit for e in self.edges if e.kind == DEPENDENT and e.from_unit == unit]

    def independent_partners(self, unit: str) -> set[str]:
        out = set()
        for e in self.edges:
            if e.kind == INDEPENDENT and unit in (e.from_unit, e.to_unit):
                out.add(e.to_unit if e.from_unit == unit else e.from_unit)
        return out


@dataclass(frozen=True)
class NarrativeSequence:
    order: tuple[str, ...]
    provenance: str  # "suggested" | "author_adjusted"


def new_graph(units: list[str]) -> RelationGraph:
    if len(set(units)) != len(units):
        raise UnknownUnit("unit ids must be unique")
    return RelationGraph(tuple(units))


def set_relation(graph: RelationGraph, a: str, b: str, kind: str) -> RelationGraph:
    """Set the relation on pair {a, b}; for "dependent", b depends on a.

    kind "none" clears the pair. Dependent insertions that would close a
    cycle are rejected immediately so the author learns right away.
    """
    if a == b:
        raise SelfRelation(f"unit {a!r} cannot relate to itself")
    for u in (a, b):
        if u not in graph.units:
            raise UnknownUnit(f"unit {u!r} not in graph")
    pair = frozenset((a, b))
    kept = tuple(e for e in graph.edges if e.pair() != pair)
    if kind == "none":
        return replace(graph, edges=kept)
    if kind == INDEPENDENT:
        # stored unordered; normalize to insertion order for determinism
        first, second = sorted((a, b), key=graph.units.index)
        return replace(graph, edges=kept + (Edge(first, second, INDEPENDENT),))
    if kind == DEPENDENT:
        # checked against all current edges, the same pair's included: flipping
        # a dependency must be an explicit clear-then-set, not a silent swap
        cycle = _path(graph.edges, b, a)
        if cycle is not None:
            raise CycleIntroduced(
                "dependency would create a cycle: " + " -> ".join(cycle), cycle)
        return replace(graph, edges=kept + (Edge(a, b, DEPENDENT),))
    raise NarvisError(f"unknown relation kind {kind!r}")


def _path(edges: tuple[Edge, ...], src: str, dst: str) -> list[str] | None:
    """Dependent-edge path src -> dst, or None; used for cycle reporting."""
    adjacency: dict[str, list[str]] = {}
    for e in edges:
        if e.kind == DEPENDENT:
            adjacency.setdefault(e.from_unit, []).append(e.to_unit)
    stack = [(src, [src])]
    seen = set()
    while stack:
        node, path = stack.pop()
        if node == dst:
            return path
        if node in seen:
            continue
        seen.add(node)
        for nxt in adjacency.get(node, ()):
            stack.append((nxt, path + [nxt]))
    return None


def suggest_sequence(graph: RelationGraph) -> NarrativeSequence:
    """Kahn's algorithm with a tie-break: prefer a ready unit that is
    independent-linked to the one just emitted, then earliest-inserted."""
    position = {u: i for i, u in enumerate(graph.units)}
    indegree = {u: 0 for u in graph.units}
    for e in graph.edges:
        if e.kind == DEPENDENT:
            indegree[e.to_unit] += 1
    ready = [u for u in graph.units if indegree[u] == 0]
    order: list[str] = []
    prev: str | None = None
    while ready:
        pick = None
        if prev is not None:
            partners = graph.independent_partners(prev)
            linked = [u for u in ready if u in partners]
            if linked:
                pick = min(linked, key=position.__getitem__)
        if pick is None:
            pick = min(ready, key=position.__getitem__)
        ready.remove(pick)
        order.append(pick)
        prev = pick
        for dep in graph.dependents_of(pick):
            indegree[dep] -= 1
            if indegree[dep] == 0:
                ready.append(dep)
    assert len(order) == len(graph.units), "dependent edges must form a DAG"
    return NarrativeSequence(tuple(order), "suggested")


def validate_sequence(graph: RelationGraph, order: list[str]) -> list[Edge]:
    """Dependent edges violated by the order; empty list means valid."""
    if sorted(order) != sorted(graph.units):
        raise NotAPermutation(f"order must be a permutation of {list(graph.units)}")
    position = {u: i for i, u in enumerate(order)}
    return [e for e in graph.edges
            if e.kind == DEPENDENT and position[e.from_unit] > position[e.to_unit]]


def nonadjacent_independent_pairs(graph: RelationGraph, order: list[str]) -> list[Edge]:
    """Independent pairs that ended up apart (UI renders a soft notice)."""
    position = {u: i for i, u in enumerate(order)}
    return [e for e in graph.edges
            if e.kind == INDEPENDENT and abs(position[e.from_unit] - position[e.to_unit]) != 1]


# ---------------------------------------------------------------------------
# JSON

def graph_to_json(graph: RelationGraph) -> dict:
    return {
        "units": list(graph.units),
        "edges": [{"from": e.from_unit, "to": e.to_unit, "kind": e.kind}
                  for e in graph.edges],
    }


def graph_from_json(data: dict) -> RelationGraph:
    return RelationGraph(
        units=tuple(data["units"]),
        edges=tuple(Edge(e["from"], e["to"], e["kind"]) for e in data.get("edges", [])),
    )


def sequence_to_json(seq: NarrativeSequence) -> dict:
    return {"order": list(seq.order), "provenance": seq.provenance}


def sequence_from_json(data: dict) -> NarrativeSequence:
    return NarrativeSequence(tuple(data["order"]), data.get("provenance", "author_adjusted"))
