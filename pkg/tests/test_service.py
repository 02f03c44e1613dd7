from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from narvis.service import create_app


@pytest.fixture
def client(tmp_path, opinionseer_markup):
    app = create_app(tmp_path / "data")
    with TestClient(app) as c:
        c.project_id = None
        yield c


def make_project(client, markup) -> str:
    resp = client.post("/projects", json={"svg": markup, "doc_id": "opinionseer"})
    assert resp.status_code == 201, resp.text
    return resp.json()


def full_pipeline(client, markup) -> tuple[str, dict]:
    created = make_project(client, markup)
    pid = created["project_id"]
    tree = created["tree"]["root"]
    selections = [{"node_id": c["node_id"], "name": c["label"]} for c in tree["children"]]
    resp = client.put(f"/projects/{pid}/units",
                      json={"version": created["version"], "selections": selections})
    assert resp.status_code == 200, resp.text
    units = resp.json()["units"]
    unit_ids = [u["unit_id"] for u in units]
    resp = client.put(f"/projects/{pid}/relations", json={
        "version": 1,
        "relations": [{"a": unit_ids[0], "b": unit_ids[1], "kind": "dependent"}],
    })
    assert resp.status_code == 200, resp.text
    resp = client.get(f"/projects/{pid}/sequence")
    suggested = resp.json()["suggested"]["order"]
    resp = client.put(f"/projects/{pid}/sequence",
                      json={"version": 1, "order": suggested})
    assert resp.status_code == 200, resp.text
    resp = client.post(f"/projects/{pid}/deck", json={"title": "Demo"})
    assert resp.status_code == 201, resp.text
    return pid, resp.json()["deck"]


def test_upload_yields_five_unit_candidates(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    assert len(created["tree"]["root"]["children"]) == 5
    assert created["primitive_count"] == 34
    assert created["version"] == 1


def test_schema_header_everywhere(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    resp = client.get(f"/projects/{created['project_id']}/tree")
    assert resp.headers["X-Narvis-Schema"] == "1"
    resp = client.get("/projects/nope/tree")
    assert resp.status_code == 404
    assert resp.headers["X-Narvis-Schema"] == "1"


def test_stale_tree_edit_conflicts(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    pid = created["project_id"]
    node = created["tree"]["root"]["children"][0]["node_id"]
    edit = {"op": "rename", "node_id": node, "label": "renamed"}
    ok = client.post(f"/projects/{pid}/tree/edits", json={"version": 1, "edit": edit})
    assert ok.status_code == 200
    assert ok.json()["version"] == 2
    stale = client.post(f"/projects/{pid}/tree/edits",
                        json={"version": 1, "edit": {"op": "rename", "node_id": node,
                                                     "label": "again"}})
    assert stale.status_code == 409
    assert stale.json()["code"] == "version_conflict"


def test_descendants_hover_contract(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    pid = created["project_id"]
    child = created["tree"]["root"]["children"][2]
    resp = client.get(f"/projects/{pid}/tree/nodes/{child['node_id']}/descendants")
    ids = resp.json()["primitive_ids"]
    # selecting the same node yields exactly these ids
    resp = client.put(f"/projects/{pid}/units", json={
        "version": 1, "selections": [{"node_id": child["node_id"], "name": "x"}]})
    assert resp.json()["units"][0]["primitive_ids"] == ids


def test_nested_selection_rejected(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    pid = created["project_id"]
    root = created["tree"]["root"]
    child = root["children"][0]
    resp = client.put(f"/projects/{pid}/units", json={
        "version": 1,
        "selections": [{"node_id": root["node_id"], "name": "all"},
                       {"node_id": child["node_id"], "name": "sub"}]})
    assert resp.status_code == 422
    assert resp.json()["code"] == "nested_selection"


def test_channels_detect_and_patch(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    pid = created["project_id"]
    child = created["tree"]["root"]["children"][2]  # opinion-points: size+fill vary
    client.put(f"/projects/{pid}/units", json={
        "version": 1, "selections": [{"node_id": child["node_id"], "name": "dots"}]})
    resp = client.get(f"/projects/{pid}/units/u0/channels")
    plan = resp.json()
    enabled = [c["channel"] for c in plan["channels"] if c["enabled"]]
    assert enabled[0] == "position"
    assert "color_fill" in enabled and "size" in enabled
    resp = client.patch(f"/projects/{pid}/units/u0/channels", json={
        "version": plan["version"],
        "action": {"op": "toggle", "channel": "size", "enabled": False}})
    assert resp.status_code == 200
    after = [c for c in resp.json()["channels"] if c["channel"] == "size"][0]
    assert after["enabled"] is False


def test_sequence_violation_is_422(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    pid = created["project_id"]
    children = created["tree"]["root"]["children"][:2]
    client.put(f"/projects/{pid}/units", json={
        "version": 1,
        "selections": [{"node_id": c["node_id"], "name": c["label"]} for c in children]})
    client.put(f"/projects/{pid}/relations", json={
        "version": 1, "relations": [{"a": "u0", "b": "u1", "kind": "dependent"}]})
    resp = client.put(f"/projects/{pid}/sequence",
                      json={"version": 1, "order": ["u1", "u0"]})
    assert resp.status_code == 422
    body = resp.json()
    assert body["violations"] == [{"from": "u0", "to": "u1"}]


def test_cycle_introduced_names_units(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    pid = created["project_id"]
    children = created["tree"]["root"]["children"][:2]
    client.put(f"/projects/{pid}/units", json={
        "version": 1,
        "selections": [{"node_id": c["node_id"], "name": c["label"]} for c in children]})
    resp = client.put(f"/projects/{pid}/relations", json={
        "version": 1,
        "relations": [{"a": "u0", "b": "u1", "kind": "dependent"},
                      {"a": "u1", "b": "u0", "kind": "dependent"}]})
    assert resp.status_code == 422
    assert resp.json()["cycle"] == ["u0", "u1"]


def test_deck_assembly_edit_stats(client, opinionseer_markup):
    pid, deck = full_pipeline(client, opinionseer_markup)
    assert deck["slides"]
    slide = deck["slides"][1]
    resp = client.patch(f"/projects/{pid}/deck/slides/{slide['slide_id']}", json={
        "version": 1,
        "edit": {"op": "add_step",
                 "step": {"step_id": "anno-1", "kind": "annotation", "form": "circle",
                          "geometry": [[10, 20]], "content": "", "style": {}}}})
    assert resp.status_code == 200, resp.text
    resp = client.get(f"/projects/{pid}/deck/stats")
    body = resp.json()
    assert "table" in body
    target = [r for r in body["rows"] if r["slide_id"] == slide["slide_id"]][0]
    assert target["symbol_annotations"] == 1


def test_compile_and_player_and_events(client, opinionseer_markup):
    pid, deck = full_pipeline(client, opinionseer_markup)
    resp = client.post(f"/projects/{pid}/compile",
                       json={"beacon_url": "/decks/%s/events" % deck["deck_id"]})
    assert resp.status_code == 200, resp.text
    body = resp.json()
    assert body["slide_count"] == len(deck["slides"]) + 1
    player = client.get(body["player_url"])
    assert player.status_code == 200
    assert "<!DOCTYPE html>" in player.text

    deck_id = deck["deck_id"]
    for i, ev in enumerate([
        {"event_type": "slide_enter", "slide_id": "s1", "timestamp_ms": 0},
        {"event_type": "slide_enter", "slide_id": "s2", "timestamp_ms": 8000},
        {"event_type": "answer", "slide_id": "s2", "timestamp_ms": 9000,
         "question_id": "q1", "selected": [0]},
        {"event_type": "comment", "slide_id": "s2", "timestamp_ms": 9500,
         "text": "nice"},
        {"event_type": "slide_exit", "slide_id": "s2", "timestamp_ms": 10000},
    ]):
        payload = {"deck_id": deck_id, "student_token": "stu-1", **ev}
        resp = client.post(f"/decks/{deck_id}/events", json=payload)
        assert resp.status_code == 201, resp.text
        assert resp.json()["position"] == i

    stats = client.get(f"/decks/{deck_id}/stats").json()
    slide_means = {r["slide_id"]: r["pass_means_s"] for r in stats["per_slide"]}
    assert slide_means == {"s1": [8.0], "s2": [2.0]}
    comments = client.get(f"/decks/{deck_id}/comments").json()["comments"]
    assert [c["text"] for c in comments] == ["nice"]


def test_event_for_unknown_deck_404(client):
    resp = client.post("/decks/ghost/events", json={
        "deck_id": "ghost", "student_token": "s", "event_type": "comment",
        "timestamp_ms": 1, "text": "x"})
    assert resp.status_code == 404
    assert resp.json()["code"] == "unknown_deck"


def test_bad_event_schema_422(client, opinionseer_markup):
    pid, deck = full_pipeline(client, opinionseer_markup)
    resp = client.post(f"/decks/{deck['deck_id']}/events", json={
        "deck_id": deck["deck_id"], "student_token": "s", "event_type": "answer",
        "timestamp_ms": 1, "selected": [0]})
    assert resp.status_code == 422
    assert resp.json()["pointer"] == "/question_id"


def test_persistence_across_restart(tmp_path, opinionseer_markup):
    data_dir = tmp_path / "data"
    with TestClient(create_app(data_dir)) as client:
        pid, deck = full_pipeline(client, opinionseer_markup)
        before_tree = client.get(f"/projects/{pid}/tree").json()
        before_deck = client.get(f"/projects/{pid}/deck").json()
    with TestClient(create_app(data_dir)) as client2:
        assert client2.get("/projects").json()["projects"] == [pid]
        assert client2.get(f"/projects/{pid}/tree").json() == before_tree
        assert client2.get(f"/projects/{pid}/deck").json() == before_deck


def test_bad_svg_rejected(client):
    resp = client.post("/projects", json={"svg": "<html/>"})
    assert resp.status_code == 400
    assert resp.json()["code"] == "not_svg"


def test_tagged_svg_endpoint(client, opinionseer_markup):
    created = make_project(client, opinionseer_markup)
    pid = created["project_id"]
    resp = client.get(f"/projects/{pid}/svg", params={"tagged": "true"})
    assert 'data-prim="p0-0"' in resp.text
    raw = client.get(f"/projects/{pid}/svg")
    assert raw.text == opinionseer_markup
