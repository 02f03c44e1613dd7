from __future__ import annotations

import itertools
import random

import pytest

from narvis import narrative as nv
from oracles import brute_force_valid_orders, enumerate_graphs, random_dag


def graph_of(units, triples):
    g = nv.new_graph(units)
    for a, b, kind in triples:
        g = nv.set_relation(g, a, b, kind)
    return g


# -- set_relation -----------------------------------------------------------------

def test_flows_depends_on_bars():
    g = graph_of(["bars", "flows"], [("bars", "flows", "dependent")])
    assert g.edges == (nv.Edge("bars", "flows", "dependent"),)


def test_two_cycle_rejected():
    g = graph_of(["A", "B"], [("A", "B", "dependent")])
    with pytest.raises(nv.CycleIntroduced) as exc:
        nv.set_relation(g, "B", "A", "dependent")
    assert exc.value.cycle == ["A", "B"]


def test_longer_cycle_named():
    g = graph_of(["A", "B", "C"], [("A", "B", "dependent"), ("B", "C", "dependent")])
    with pytest.raises(nv.CycleIntroduced) as exc:
        nv.set_relation(g, "C", "A", "dependent")
    assert exc.value.cycle == ["A", "B", "C"]


def test_replacement_semantics():
    g = graph_of(["A", "B"], [("A", "B", "dependent")])
    g = nv.set_relation(g, "A", "B", "independent")
    assert g.edges[0].kind == "independent"
    g = nv.set_relation(g, "A", "B", "none")
    assert g.edges == ()


def test_self_relation_and_unknown_unit():
    g = nv.new_graph(["A", "B"])
    with pytest.raises(nv.SelfRelation):
        nv.set_relation(g, "A", "A", "independent")
    with pytest.raises(nv.UnknownUnit):
        nv.set_relation(g, "A", "Z", "dependent")


# -- suggest ------------------------------------------------------------------------

def test_suggest_bars_before_flows():
    g = graph_of(["bars", "flows"], [("bars", "flows", "dependent")])
    assert nv.suggest_sequence(g).order == ("bars", "flows")


def test_suggest_insertion_order_tiebreak():
    g = nv.new_graph(["A", "B"])
    assert nv.suggest_sequence(g).order == ("A", "B")


def test_suggest_independent_adjacency():
    # frozen oracle: of the dependency-valid orders {ABC, ACB, BAC}, the
    # tie-break (independent partner of the last emission first, then
    # insertion order) picks A, then B (independent with A), then C
    g = graph_of(["A", "B", "C"],
                 [("A", "C", "dependent"), ("A", "B", "independent")])
    assert nv.suggest_sequence(g).order == ("A", "B", "C")


def test_suggest_provenance_and_determinism():
    g = graph_of(["x", "y", "z"], [("y", "x", "dependent")])
    first = nv.suggest_sequence(g)
    assert first.provenance == "suggested"
    assert first == nv.suggest_sequence(g)


# -- validate -----------------------------------------------------------------------

def test_validate_violation_reported():
    g = graph_of(["bars", "flows"], [("bars", "flows", "dependent")])
    violations = nv.validate_sequence(g, ["flows", "bars"])
    assert violations == [nv.Edge("bars", "flows", "dependent")]


def test_independent_any_order_valid():
    g = graph_of(["A", "B"], [("A", "B", "independent")])
    assert nv.validate_sequence(g, ["B", "A"]) == []
    assert nv.validate_sequence(g, ["A", "B"]) == []


def test_not_a_permutation():
    g = nv.new_graph(["A", "B"])
    with pytest.raises(nv.NotAPermutation):
        nv.validate_sequence(g, ["A"])
    with pytest.raises(nv.NotAPermutation):
        nv.validate_sequence(g, ["A", "A"])


# -- properties ----------------------------------------------------------------------

def test_random_dags_suggestion_always_valid():
    rng = random.Random(11)
    for _ in range(300):
        units, triples = random_dag(rng, rng.randint(1, 10))
        g = graph_of(units, triples)
        seq = nv.suggest_sequence(g)
        assert nv.validate_sequence(g, list(seq.order)) == []


def test_exhaustive_agreement_small_graphs():
    for n in (2, 3):
        units = [f"u{i}" for i in range(n)]
        for dependent, independent in enumerate_graphs(units):
            g = graph_of(units, [(a, b, "dependent") for a, b in dependent]
                         + [(a, b, "independent") for a, b in independent])
            expected = brute_force_valid_orders(units, dependent)
            got = {perm for perm in itertools.permutations(units)
                   if not nv.validate_sequence(g, list(perm))}
            assert got == expected


def test_monotonicity_adding_edge_never_enlarges():
    rng = random.Random(23)
    for _ in range(60):
        units, triples = random_dag(rng, 5)
        g = graph_of(units, triples)
        before = {p for p in itertools.permutations(units)
                  if not nv.validate_sequence(g, list(p))}
        free = [(a, b) for a, b in itertools.combinations(units, 2)
                if all(frozenset((a, b)) != e.pair() for e in g.edges)]
        for a, b in free:
            try:
                g2 = nv.set_relation(g, a, b, "dependent")
            except nv.CycleIntroduced:
                continue
            after = {p for p in itertools.permutations(units)
                     if not nv.validate_sequence(g2, list(p))}
            assert after <= before


def test_graph_json_roundtrip():
    g = graph_of(["a", "b", "c"], [("a", "b", "dependent"), ("a", "c", "independent")])
    data = nv.graph_to_json(g)
    assert data["edges"][0] == {"from": "a", "to": "b", "kind": "dependent"}
    assert nv.graph_from_json(data) == g
    seq = nv.suggest_sequence(g)
    assert nv.sequence_from_json(nv.sequence_to_json(seq)) == seq
