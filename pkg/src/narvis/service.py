"""HTTP API wiring every core module into the three-phase workflow.

Each endpoint delegates to exactly one core operation; the service adds
only persistence, versioning, and error mapping.  All errors come back as
``{code, message, pointer?}``; stale mutations answer 409.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import analytics, channels, component_tree as ct, compiler, deck as deck_mod
from . import narrative, svg_ingest
from .errors import NarvisError, SchemaViolation
from .store import ProjectStore

SCHEMA_HEADER = "X-Narvis-Schema"
SCHEMA_VERSION = "1"

_STATUS = {
    "unknown_project": 404,
    "unknown_deck": 404,
    "unknown_node": 404,
    "unknown_unit": 404,
    "unknown_slide": 404,
    "unknown_step": 404,
    "missing_artifact": 404,
    "version_conflict": 409,
    "malformed_xml": 400,
    "not_svg": 400,
    "empty_scene": 400,
}


def create_app(data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="narvis", docs_url=None, redoc_url=None, openapi_url=None)
    store = ProjectStore(data_dir)
    app.state.store = store

    @app.exception_handler(NarvisError)
    async def handle_domain_error(request: Request, exc: NarvisError):
        status = _STATUS.get(exc.code, 422)
        return JSONResponse(status_code=status, content=exc.to_dict(),
                            headers={SCHEMA_HEADER: SCHEMA_VERSION})

    @app.middleware("http")
    async def schema_header(request: Request, call_next):
        response = await call_next(request)
        response.headers.setdefault(SCHEMA_HEADER, SCHEMA_VERSION)
        return response

    def parse_doc(project_id: str) -> svg_ingest.SvgDocument:
        return svg_ingest.parse_svg(store.read_svg(project_id))

    def primitives_of(project_id: str) -> dict[str, svg_ingest.VisualPrimitive]:
        return {p.id: p for p in svg_ingest.extract_primitives(parse_doc(project_id))}

    def load_tree(project_id: str) -> tuple[ct.ComponentTree, int]:
        payload, version = store.load(project_id, "tree")
        return ct.tree_from_json(payload), version

    def load_units(project_id: str) -> tuple[list[ct.VisualUnit], int]:
        payload, version = store.load(project_id, "units")
        return ct.units_from_json(payload["units"]), version

    def load_plans(project_id: str) -> tuple[dict[str, channels.ChannelPlan], int]:
        if not store.has(project_id, "plans"):
            return {}, 0
        payload, version = store.load(project_id, "plans")
        return {uid: channels.plan_from_json(p) for uid, p in payload["plans"].items()}, version

    def save_plans(project_id: str, plans: dict, version: int | None) -> int:
        return store.save(project_id, "plans",
                          {"plans": {uid: channels.plan_to_json(p) for uid, p in plans.items()}},
                          version)

    def load_graph(project_id: str) -> tuple[narrative.RelationGraph, int]:
        if store.has(project_id, "relations"):
            payload, version = store.load(project_id, "relations")
            return narrative.graph_from_json(payload), version
        units, _ = load_units(project_id)
        return narrative.new_graph([u.unit_id for u in units]), 0

    def load_deck(project_id: str) -> tuple[deck_mod.Deck, int]:
        payload, version = store.load(project_id, "deck")
        return deck_mod.deck_from_json(payload), version

    # -- input analysis -------------------------------------------------------

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        body = await request.json()
        markup = _field(body, "svg")
        doc = svg_ingest.parse_svg(markup)
        prims = svg_ingest.extract_primitives(doc)
        tree = ct.build_tree(prims, doc_id=body.get("doc_id", "doc"))
        project_id = store.create_project(markup)
        version = store.save(project_id, "tree", ct.tree_to_json(tree), None)
        return {"project_id": project_id, "version": version,
                "tree": ct.tree_to_json(tree), "primitive_count": len(prims),
                "warnings": list(doc.warnings)}

    @app.get("/projects")
    def list_projects():
        return {"projects": store.project_ids()}

    @app.get("/projects/{project_id}/svg")
    def get_svg(project_id: str, tagged: bool = False):
        if tagged:
            return Response(svg_ingest.serialize_document(parse_doc(project_id), True),
                            media_type="image/svg+xml")
        return Response(store.read_svg(project_id), media_type="image/svg+xml")

    @app.get("/projects/{project_id}/primitives")
    def get_primitives(project_id: str):
        return {"primitives": svg_ingest.primitives_to_json(
            svg_ingest.extract_primitives(parse_doc(project_id)))}

    @app.get("/projects/{project_id}/tree")
    def get_tree(project_id: str):
        tree, version = load_tree(project_id)
        return {"version": version, **ct.tree_to_json(tree)}

    @app.post("/projects/{project_id}/tree/edits")
    async def edit_tree(project_id: str, request: Request):
        body = await request.json()
        tree, _ = load_tree(project_id)
        new_tree = ct.edit_tree(tree, _tree_edit(_field(body, "edit")))
        version = store.save(project_id, "tree", ct.tree_to_json(new_tree),
                             _field(body, "version"))
        return {"version": version, **ct.tree_to_json(new_tree)}

    @app.get("/projects/{project_id}/tree/nodes/{node_id}/descendants")
    def get_descendants(project_id: str, node_id: str):
        tree, _ = load_tree(project_id)
        return {"node_id": node_id, "primitive_ids": ct.descendants_of(tree, node_id)}

    # -- units & channels ------------------------------------------------------

    @app.put("/projects/{project_id}/units")
    async def put_units(project_id: str, request: Request):
        body = await request.json()
        tree, _ = load_tree(project_id)
        selections = [(s["node_id"], s.get("name", "")) for s in _field(body, "selections")]
        units = ct.select_units(tree, selections)
        expected = _field(body, "version") if store.has(project_id, "units") else None
        version = store.save(project_id, "units",
                             {"units": ct.units_to_json(units)}, expected)
        # re-detect plans for the new unit set
        prims = primitives_of(project_id)
        doc = parse_doc(project_id)
        plans = {u.unit_id: channels.detect_channels(u, prims, doc.view_box) for u in units}
        plans_version = save_plans(project_id, plans,
                                   load_plans(project_id)[1] or None)
        return {"version": version, "plans_version": plans_version,
                "units": ct.units_to_json(units)}

    @app.get("/projects/{project_id}/units")
    def get_units(project_id: str):
        units, version = load_units(project_id)
        return {"version": version, "units": ct.units_to_json(units)}

    @app.get("/projects/{project_id}/units/{unit_id}/channels")
    def get_channels(project_id: str, unit_id: str):
        plans, version = load_plans(project_id)
        if unit_id in plans:
            return {"version": version, **channels.plan_to_json(plans[unit_id])}
        units, _ = load_units(project_id)
        unit = _find_unit(units, unit_id)
        doc = parse_doc(project_id)
        plan = channels.detect_channels(unit, primitives_of(project_id), doc.view_box)
        return {"version": version, **channels.plan_to_json(plan)}

    @app.patch("/projects/{project_id}/units/{unit_id}/channels")
    async def patch_channels(project_id: str, unit_id: str, request: Request):
        body = await request.json()
        plans, version = load_plans(project_id)
        if unit_id not in plans:
            units, _ = load_units(project_id)
            unit = _find_unit(units, unit_id)
            doc = parse_doc(project_id)
            plans[unit_id] = channels.detect_channels(unit, primitives_of(project_id),
                                                      doc.view_box)
        action = _field(body, "action")
        op = _field(action, "op")
        plan = plans[unit_id]
        if op == "reorder":
            plan = channels.reorder_channels(plan, _field(action, "order"))
        elif op == "toggle":
            plan = channels.toggle_channel(plan, _field(action, "channel"),
                                           action.get("enabled"))
        elif op == "set_complexity":
            plan = channels.set_complexity(plan, _field(action, "channel"),
                                           _field(action, "score"))
        elif op == "sort_by_complexity":
            plan = channels.sort_by_complexity(plan)
        else:
            raise SchemaViolation(f"unknown channel action {op!r}", pointer="/action/op")
        plans[unit_id] = plan
        new_version = save_plans(project_id, plans, _field(body, "version") or None)
        out = {"version": new_version, **channels.plan_to_json(plan)}
        if store.has(project_id, "deck"):
            deck, _ = load_deck(project_id)
            out["orphaned_slides"] = deck_mod.orphaned_slides(deck, plans)
        return out

    # -- relations & sequence ---------------------------------------------------

    @app.get("/projects/{project_id}/relations")
    def get_relations(project_id: str):
        graph, version = load_graph(project_id)
        return {"version": version, **narrative.graph_to_json(graph)}

    @app.put("/projects/{project_id}/relations")
    async def put_relations(project_id: str, request: Request):
        body = await request.json()
        graph, _ = load_graph(project_id)
        for i, rel in enumerate(_field(body, "relations")):
            graph = narrative.set_relation(graph, _field(rel, "a"), _field(rel, "b"),
                                           _field(rel, "kind"))
        expected = _field(body, "version") if store.has(project_id, "relations") else None
        version = store.save(project_id, "relations", narrative.graph_to_json(graph),
                             expected)
        return {"version": version, **narrative.graph_to_json(graph)}

    @app.get("/projects/{project_id}/sequence")
    def get_sequence(project_id: str):
        graph, _ = load_graph(project_id)
        suggestion = narrative.suggest_sequence(graph)
        stored = None
        stored_version = 0
        if store.has(project_id, "sequence"):
            payload, stored_version = store.load(project_id, "sequence")
            stored = payload
        return {"version": stored_version,
                "suggested": narrative.sequence_to_json(suggestion),
                "stored": stored}

    @app.put("/projects/{project_id}/sequence")
    async def put_sequence(project_id: str, request: Request):
        body = await request.json()
        graph, _ = load_graph(project_id)
        order = _field(body, "order")
        violations = narrative.validate_sequence(graph, order)
        if violations:
            raise _SequenceInvalid(violations)
        seq = narrative.NarrativeSequence(tuple(order), body.get("provenance",
                                                                 "author_adjusted"))
        expected = _field(body, "version") if store.has(project_id, "sequence") else None
        version = store.save(project_id, "sequence", narrative.sequence_to_json(seq),
                             expected)
        notices = narrative.nonadjacent_independent_pairs(graph, order)
        return {"version": version, **narrative.sequence_to_json(seq),
                "nonadjacent_independent": [
                    {"from": e.from_unit, "to": e.to_unit} for e in notices]}

    # -- deck -------------------------------------------------------------------

    @app.post("/projects/{project_id}/deck", status_code=201)
    async def post_deck(project_id: str, request: Request):
        body = await request.json()
        seq_payload, _ = store.load(project_id, "sequence")
        sequence = narrative.sequence_from_json(seq_payload)
        plans, _ = load_plans(project_id)
        units, _ = load_units(project_id)
        deck = deck_mod.assemble_deck(
            sequence, list(plans.values()), units,
            deck_id=body.get("deck_id", f"d-{project_id}"),
            title=body.get("title", "Untitled tutorial"),
            svg_doc_ref=project_id,
            overview_slide=body.get("overview_slide", True))
        expected = _field(body, "version") if store.has(project_id, "deck") else None
        version = store.save(project_id, "deck", deck_mod.deck_to_json(deck), expected)
        store.register_deck(deck.deck_id, project_id)
        return {"version": version, "deck": deck_mod.deck_to_json(deck)}

    @app.get("/projects/{project_id}/deck")
    def get_deck(project_id: str):
        payload, version = store.load(project_id, "deck")
        return {"version": version, "deck": payload}

    @app.patch("/projects/{project_id}/deck/slides/{slide_id}")
    async def patch_slide(project_id: str, slide_id: str, request: Request):
        body = await request.json()
        deck, _ = load_deck(project_id)
        new_deck = deck_mod.edit_slide(deck, slide_id, _slide_edit(_field(body, "edit")))
        version = store.save(project_id, "deck", deck_mod.deck_to_json(new_deck),
                             _field(body, "version"))
        return {"version": version, "deck": deck_mod.deck_to_json(new_deck)}

    @app.get("/projects/{project_id}/deck/stats")
    def get_deck_stats(project_id: str):
        deck, _ = load_deck(project_id)
        rows = deck_mod.deck_stats(deck)
        return {"rows": deck_mod.stats_to_json(rows),
                "table": deck_mod.format_stats_table(rows)}

    @app.post("/projects/{project_id}/compile")
    async def post_compile(project_id: str, request: Request):
        body = await request.json() if int(request.headers.get("content-length") or 0) else {}
        deck, _ = load_deck(project_id)
        doc = parse_doc(project_id)
        opts = compiler.CompileOptions(
            beacon_url=body.get("beacon_url"),
            student_token=body.get("student_token"),
            theme=body.get("theme", {}))
        compiled = compiler.compile(deck, doc, opts)
        store.save_player(project_id, compiled.html, compiled.manifest)
        return {"slide_count": compiled.slide_count, "manifest": compiled.manifest,
                "player_url": f"/decks/{deck.deck_id}/player"}

    # -- viewing ------------------------------------------------------------------

    @app.get("/decks/{deck_id}/player")
    def get_player(deck_id: str):
        project_id = store.project_of_deck(deck_id)
        return HTMLResponse(store.read_player(project_id))

    @app.post("/decks/{deck_id}/events", status_code=201)
    async def post_event(deck_id: str, request: Request):
        body = await request.json()
        store.project_of_deck(deck_id)  # raises UnknownDeck
        if body.get("deck_id") != deck_id:
            raise SchemaViolation("deck_id does not match the URL", pointer="/deck_id")
        event = analytics.event_from_json(body)
        position = analytics.ingest(store.event_log(deck_id), event)
        return {"position": position}

    @app.get("/decks/{deck_id}/stats")
    def get_stats(deck_id: str):
        project_id = store.project_of_deck(deck_id)
        deck, _ = load_deck(project_id)
        stats = analytics.aggregate(deck_id, store.event_log(deck_id), deck)
        return stats.to_dict()

    @app.get("/decks/{deck_id}/comments")
    def get_comments(deck_id: str):
        project_id = store.project_of_deck(deck_id)
        deck, _ = load_deck(project_id)
        stats = analytics.aggregate(deck_id, store.event_log(deck_id), deck)
        return {"comments": stats.comments}

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


class _SequenceInvalid(NarvisError):
    code = "sequence_invalid"

    def __init__(self, violations):
        super().__init__("order conflicts with dependent relationships")
        self.violations = violations

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["violations"] = [{"from": e.from_unit, "to": e.to_unit} for e in self.violations]
        return out


def _field(body: dict, name: str):
    if not isinstance(body, dict) or name not in body:
        raise SchemaViolation(f"missing required field {name!r}", pointer=f"/{name}")
    return body[name]


def _find_unit(units, unit_id):
    for unit in units:
        if unit.unit_id == unit_id:
            return unit
    raise narrative.UnknownUnit(f"unit {unit_id!r} not found")


def _tree_edit(data: dict) -> ct.TreeEdit:
    op = _field(data, "op")
    if op == "split":
        return ct.SplitEdit(_field(data, "node_id"),
                            tuple(tuple(part) for part in _field(data, "partition")))
    if op == "merge":
        return ct.MergeEdit(tuple(_field(data, "node_ids")), _field(data, "new_label"))
    if op == "remove":
        return ct.RemoveEdit(_field(data, "node_id"))
    if op == "rename":
        return ct.RenameEdit(_field(data, "node_id"), _field(data, "label"))
    raise SchemaViolation(f"unknown tree edit op {op!r}", pointer="/edit/op")


def _slide_edit(data: dict) -> deck_mod.SlideEdit:
    op = _field(data, "op")
    if op == "add_step":
        step = deck_mod._step_from_json(_field(data, "step"), "/edit/step")
        return deck_mod.AddStep(step, data.get("index"))
    if op == "remove_step":
        return deck_mod.RemoveStep(_field(data, "step_id"))
    if op == "reorder_steps":
        return deck_mod.ReorderSteps(tuple(_field(data, "step_ids")))
    if op == "set_notes":
        return deck_mod.SetNotes(_field(data, "notes"))
    if op == "retarget_step":
        targets = _field(data, "targets")
        return deck_mod.RetargetStep(_field(data, "step_id"),
                                     targets if targets == "all" else tuple(targets))
    raise SchemaViolation(f"unknown slide edit op {op!r}", pointer="/edit/op")


def main_serve(port: int | None = None, data_dir: str | None = None,
               ui_dir: str | None = None) -> None:
    import uvicorn

    port = port or int(os.environ.get("NARVIS_PORT", "8008"))
    data_dir = data_dir or os.environ.get("NARVIS_DATA_DIR", "./narvis-data")
    ui_dir = ui_dir or os.environ.get("NARVIS_UI_DIR")
    app = create_app(data_dir, ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="info")
