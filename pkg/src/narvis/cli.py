"""Command-line entry points: the whole authoring pipeline, headless.

narvis analyze <svg> [--dump-primitives | --dump-tree]
narvis sequence <graph.json>
narvis compile <deck.json> <svg> -o out.html [--beacon URL]
narvis stats <events.ndjson> <deck.json>
narvis serve [--port N] [--data-dir DIR]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analytics, channels, compiler, component_tree as ct, deck as deck_mod
from . import narrative, svg_ingest
from .errors import NarvisError


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(json.dumps({"code": "file_not_found", "message": str(exc)}), file=sys.stderr)
        return 2
    except NarvisError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="narvis")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("analyze", help="parse an SVG and print primitives or the tree")
    p.add_argument("svg", type=Path)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--dump-primitives", action="store_true")
    group.add_argument("--dump-tree", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sequence", help="suggest and validate a narrative sequence")
    p.add_argument("graph", type=Path, help="relation graph JSON (units, edges, order?)")
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("assemble",
                       help="select units, relate them, and build a skeleton deck")
    p.add_argument("project", type=Path,
                   help="JSON: {svg, selections, relations?, order?, title?, deck_id?}")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("compile", help="compile a deck + SVG into a standalone HTML file")
    p.add_argument("deck", type=Path)
    p.add_argument("svg", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--beacon", default=None, help="event beacon URL")
    p.add_argument("--student-token", default=None)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("stats", help="aggregate a viewer event log")
    p.add_argument("events", type=Path, help="newline-delimited event JSON")
    p.add_argument("deck", type=Path)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--ui-dir", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def cmd_analyze(args) -> int:
    doc = svg_ingest.parse_svg(args.svg.read_text(encoding="utf-8"))
    primitives = svg_ingest.extract_primitives(doc)
    if args.dump_tree:
        tree = ct.build_tree(primitives, doc_id=args.svg.stem)
        print(json.dumps(ct.tree_to_json(tree), indent=2))
    elif args.dump_primitives:
        print(json.dumps(svg_ingest.primitives_to_json(primitives), indent=2))
    else:
        tree = ct.build_tree(primitives, doc_id=args.svg.stem)
        candidates = [c.label for c in tree.root.children]
        print(json.dumps({
            "primitives": len(primitives),
            "element_types": sorted({p.element_type for p in primitives}),
            "unit_candidates": candidates,
            "warnings": list(doc.warnings),
        }, indent=2))
    return 0


def cmd_sequence(args) -> int:
    data = json.loads(args.graph.read_text(encoding="utf-8"))
    graph = narrative.graph_from_json(data)
    suggestion = narrative.suggest_sequence(graph)
    out = {"suggested": narrative.sequence_to_json(suggestion)}
    if "order" in data:
        violations = narrative.validate_sequence(graph, data["order"])
        out["validated"] = {
            "order": data["order"],
            "valid": not violations,
            "violations": [{"from": e.from_unit, "to": e.to_unit} for e in violations],
        }
    print(json.dumps(out, indent=2))
    return 0 if out.get("validated", {}).get("valid", True) else 1


def cmd_assemble(args) -> int:
    spec = json.loads(args.project.read_text(encoding="utf-8"))
    svg_path = Path(spec["svg"])
    if not svg_path.is_absolute():
        svg_path = args.project.parent / svg_path
    doc = svg_ingest.parse_svg(svg_path.read_text(encoding="utf-8"))
    primitives = svg_ingest.extract_primitives(doc)
    tree = ct.build_tree(primitives, doc_id=svg_path.stem)
    units = ct.select_units(tree, [tuple(s) for s in spec["selections"]])
    prim_map = {p.id: p for p in primitives}
    plans = [channels.detect_channels(u, prim_map, doc.view_box) for u in units]
    graph = narrative.new_graph([u.unit_id for u in units])
    for rel in spec.get("relations", []):
        graph = narrative.set_relation(graph, rel["a"], rel["b"], rel["kind"])
    if "order" in spec:
        violations = narrative.validate_sequence(graph, spec["order"])
        if violations:
            raise narrative.NotAPermutation(
                "order conflicts with relations: "
                + ", ".join(f"{e.from_unit}->{e.to_unit}" for e in violations))
        sequence = narrative.NarrativeSequence(tuple(spec["order"]), "author_adjusted")
    else:
        sequence = narrative.suggest_sequence(graph)
    deck = deck_mod.assemble_deck(
        sequence, plans, units,
        deck_id=spec.get("deck_id", "deck"),
        title=spec.get("title", svg_path.stem),
        svg_doc_ref=svg_path.name,
        overview_slide=spec.get("overview_slide", True))
    args.output.write_text(deck_mod.serialize_deck(deck), encoding="utf-8")
    print(json.dumps({"output": str(args.output), "deck_id": deck.deck_id,
                      "slides": len(deck.slides),
                      "sequence": list(sequence.order)}))
    return 0


def cmd_compile(args) -> int:
    deck = deck_mod.parse_deck(args.deck.read_text(encoding="utf-8"))
    doc = svg_ingest.parse_svg(args.svg.read_text(encoding="utf-8"))
    opts = compiler.CompileOptions(beacon_url=args.beacon,
                                   student_token=args.student_token)
    compiled = compiler.compile(deck, doc, opts)
    args.output.write_text(compiled.html, encoding="utf-8")
    print(json.dumps({"output": str(args.output),
                      "slide_count": compiled.slide_count,
                      "steps": len(compiled.manifest["steps"])}))
    return 0


def cmd_stats(args) -> int:
    deck = deck_mod.parse_deck(args.deck.read_text(encoding="utf-8"))
    events = analytics.read_ndjson(args.events)
    stats = analytics.aggregate(deck.deck_id, events, deck)
    rows = deck_mod.deck_stats(deck)
    print(json.dumps(stats.to_dict(), indent=2))
    print()
    print(deck_mod.format_stats_table(rows))
    return 0


def cmd_serve(args) -> int:
    from .service import main_serve

    main_serve(args.port, args.data_dir, args.ui_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
