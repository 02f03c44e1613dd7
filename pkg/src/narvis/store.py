"""Directory-per-project persistence with compare-and-set versioning.

Every mutable artifact (tree, units, plans, relations, sequence, deck) is a
JSON file carrying a monotonically increasing ``version``.  Writers must
present the version they read; a stale write raises VersionConflict.  Event
logs are append-only NDJSON, one per deck.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from pathlib import Path

from .errors import NarvisError
from .analytics import EventLog, UnknownDeck

ARTIFACTS = ("tree", "units", "plans", "relations", "sequence", "deck")


class VersionConflict(NarvisError):
    code = "version_conflict"


class UnknownProject(NarvisError):
    code = "unknown_project"


class MissingArtifact(NarvisError):
    code = "missing_artifact"


class ProjectStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.projects_dir = self.data_dir / "projects"
        self.projects_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._event_logs: dict[str, EventLog] = {}

    # -- projects -----------------------------------------------------------

    def create_project(self, svg_markup: str) -> str:
        project_id = "prj-" + uuid.uuid4().hex[:10]
        pdir = self.projects_dir / project_id
        pdir.mkdir(parents=True)
        (pdir / "source.svg").write_text(svg_markup, encoding="utf-8")
        self._write_json(pdir / "meta.json", {
            "project_id": project_id,
            "created_ms": int(time.time() * 1000),
            "updated_ms": int(time.time() * 1000),
        })
        return project_id

    def project_ids(self) -> list[str]:
        return sorted(p.name for p in self.projects_dir.iterdir() if p.is_dir())

    def project_dir(self, project_id: str) -> Path:
        pdir = self.projects_dir / project_id
        if not pdir.is_dir():
            raise UnknownProject(f"project {project_id!r} not found")
        return pdir

    def read_svg(self, project_id: str) -> str:
        return (self.project_dir(project_id) / "source.svg").read_text(encoding="utf-8")

    # -- versioned artifacts --------------------------------------------------

    def load(self, project_id: str, artifact: str) -> tuple[dict, int]:
        path = self.project_dir(project_id) / f"{artifact}.json"
        if not path.exists():
            raise MissingArtifact(f"{artifact} not yet created for {project_id!r}")
        data = json.loads(path.read_text(encoding="utf-8"))
        return data["payload"], data["version"]

    def has(self, project_id: str, artifact: str) -> bool:
        return (self.project_dir(project_id) / f"{artifact}.json").exists()

    def save(self, project_id: str, artifact: str, payload: dict,
             expected_version: int | None) -> int:
        """CAS write: expected_version None means "must not exist yet"."""
        with self._lock:
            path = self.project_dir(project_id) / f"{artifact}.json"
            current = None
            if path.exists():
                current = json.loads(path.read_text(encoding="utf-8"))["version"]
            if current != expected_version:
                raise VersionConflict(
                    f"{artifact} is at version {current}, expected {expected_version}")
            new_version = 1 if current is None else current + 1
            self._write_json(path, {"version": new_version, "payload": payload})
            self._touch(project_id)
            return new_version

    def _touch(self, project_id: str) -> None:
        meta_path = self.project_dir(project_id) / "meta.json"
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        meta["updated_ms"] = int(time.time() * 1000)
        self._write_json(meta_path, meta)

    @staticmethod
    def _write_json(path: Path, data: dict) -> None:
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(data, indent=2, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)

    # -- decks ----------------------------------------------------------------

    def register_deck(self, deck_id: str, project_id: str) -> None:
        index_path = self.data_dir / "deck_index.json"
        index = {}
        if index_path.exists():
            index = json.loads(index_path.read_text(encoding="utf-8"))
        index[deck_id] = project_id
        self._write_json(index_path, index)

    def project_of_deck(self, deck_id: str) -> str:
        index_path = self.data_dir / "deck_index.json"
        if index_path.exists():
            index = json.loads(index_path.read_text(encoding="utf-8"))
            if deck_id in index:
                return index[deck_id]
        raise UnknownDeck(f"deck {deck_id!r} not found")

    def save_player(self, project_id: str, html: str,
                    manifest: dict | None = None) -> Path:
        path = self.project_dir(project_id) / "player.html"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(html, encoding="utf-8")
        os.replace(tmp, path)
        if manifest is not None:
            self._write_json(self.project_dir(project_id) / "player_manifest.json",
                             manifest)
        return path

    def read_player(self, project_id: str) -> str:
        path = self.project_dir(project_id) / "player.html"
        if not path.exists():
            raise MissingArtifact(f"no compiled slideshow for {project_id!r}")
        return path.read_text(encoding="utf-8")

    def event_log(self, deck_id: str) -> EventLog:
        if deck_id not in self._event_logs:
            project_id = self.project_of_deck(deck_id)
            path = self.project_dir(project_id) / f"events-{deck_id}.ndjson"
            self._event_logs[deck_id] = EventLog(path)
        return self._event_logs[deck_id]
