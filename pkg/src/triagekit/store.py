"""Versioned artifact store plus the append-only feedback log.

One directory per artifact kind, one canonical-JSON file per version, and
a manifest recording content hashes. Layout is meant to be inspectable
with a text editor; integrity failures (edited or truncated files) raise
HashMismatch instead of returning silently corrupted artifacts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from triagekit.classify import ClassifierModel, FeedbackEvent, apply_feedback
from triagekit.errors import DuplicateEventId, HashMismatch, UnknownVersion
from triagekit.model import Corpus, canonical_json, format_timestamp, utc_now

KIND_CORPUS = "corpus"
KIND_INDEX = "index"
KIND_MODEL = "model"
KIND_REPORT = "report"
KIND_FEEDBACK = "feedback-log"
KINDS = (KIND_CORPUS, KIND_INDEX, KIND_MODEL, KIND_REPORT, KIND_FEEDBACK)

_DIRS = {
    KIND_CORPUS: "corpus",
    KIND_INDEX: "index",
    KIND_MODEL: "model",
    KIND_REPORT: "report",
    KIND_FEEDBACK: "feedback",
}


@dataclass(frozen=True)
class StoreVersion:
    kind: str
    version: int
    sha256: str
    created_at: str
    path: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "version": self.version,
            "sha256": self.sha256,
            "created_at": self.created_at,
            "path": self.path,
        }


class Store:
    """Single-writer-per-kind artifact store rooted at a directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / "manifest.json"

    # -- manifest ---------------------------------------------------------

    def _read_manifest(self) -> list[dict]:
        if not self.manifest_path.exists():
            return []
        return json.loads(self.manifest_path.read_text("utf-8"))

    def _write_manifest(self, entries: list[dict]) -> None:
        self.manifest_path.write_text(
            json.dumps(entries, indent=2, sort_keys=True) + "\n", "utf-8"
        )

    def versions(self, kind: str | None = None) -> list[StoreVersion]:
        entries = [StoreVersion(**e) for e in self._read_manifest()]
        if kind is not None:
            entries = [e for e in entries if e.kind == kind]
        return entries

    def latest_version(self, kind: str) -> int | None:
        versions = [e.version for e in self.versions(kind)]
        return max(versions) if versions else None

    # -- persist / load ---------------------------------------------------

    def persist(self, kind: str, payload: dict) -> StoreVersion:
        """Write a new version of `kind`; versions increase strictly per kind."""
        if kind not in KINDS:
            raise ValueError(f"unknown artifact kind {kind!r}")
        version = (self.latest_version(kind) or 0) + 1
        directory = self.root / _DIRS[kind]
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"v{version:06d}.json"
        data = canonical_json(payload).encode("utf-8")
        path.write_bytes(data)

        entry = StoreVersion(
            kind=kind,
            version=version,
            sha256=hashlib.sha256(data).hexdigest(),
            created_at=format_timestamp(utc_now()),
            path=str(path.relative_to(self.root)),
        )
        manifest = self._read_manifest()
        manifest.append(entry.to_dict())
        self._write_manifest(manifest)
        return entry

    def load(self, kind: str, version: int | None = None) -> tuple[dict, StoreVersion]:
        """Payload + version record; latest version when none is given."""
        if kind not in KINDS:
            raise ValueError(f"unknown artifact kind {kind!r}")
        candidates = self.versions(kind)
        if not candidates:
            raise UnknownVersion(f"no {kind} versions stored yet")
        if version is None:
            entry = max(candidates, key=lambda e: e.version)
        else:
            matches = [e for e in candidates if e.version == version]
            if not matches:
                raise UnknownVersion(f"{kind} v{version} not in store")
            entry = matches[0]

        path = self.root / entry.path
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise UnknownVersion(f"{kind} v{entry.version} file missing: {exc}") from exc
        digest = hashlib.sha256(data).hexdigest()
        if digest != entry.sha256:
            raise HashMismatch(
                f"{kind} v{entry.version} content hash {digest[:12]} != manifest {entry.sha256[:12]}"
            )
        return json.loads(data.decode("utf-8")), entry


class FeedbackLog:
    """Append-only JSONL event log; replay rebuilds any model from its base."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._ids: set[str] | None = None

    def _known_ids(self) -> set[str]:
        if self._ids is None:
            self._ids = {event.event_id for event in self.events()}
        return self._ids

    def append(self, event: FeedbackEvent) -> int:
        """Append one event; returns the new log length (a monotone version)."""
        known = self._known_ids()
        if event.event_id in known:
            raise DuplicateEventId(f"event {event.event_id!r} already logged")
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(canonical_json(event.to_dict()) + "\n")
        known.add(event.event_id)
        return len(known)

    def events(self) -> list[FeedbackEvent]:
        if not self.path.exists():
            return []
        out = []
        for line in self.path.read_text("utf-8").splitlines():
            if line.strip():
                out.append(FeedbackEvent.from_dict(json.loads(line)))
        return out

    def replay(
        self, base_model: ClassifierModel, corpus: Corpus
    ) -> ClassifierModel:
        """Apply every logged event for the model's target field, in order."""
        model = base_model
        for event in self.events():
            if event.target_field == model.target_field:
                model = apply_feedback(model, event, corpus)
        return model
