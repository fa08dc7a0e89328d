"""Durable ground-truth storage for human grading.

Desk-scale persistence: a flat JSON file of per-trajectory label documents
plus an append-only JSONL audit log. Every write goes to the audit log
first, then the truth file is rewritten atomically (temp file + rename).
Label semantics are last-write-wins; the audit trail retains every write.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .metrics import GroundTruth, TruthEntry, ground_truth_from_docs, ground_truth_to_docs
from .rubric import Verdict, canonical_json

UNGRADED = "ungraded"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class GradingSession:
    session_id: str
    grader_id: str
    trajectory_id: str
    rubric_version: str
    created_at: str = field(default_factory=_utc_now)
    completed_at: str | None = None


class ConflictError(Exception):
    """A write arrived with a stale base revision for that (trajectory, leaf)."""

    def __init__(self, current_revision: int, current_verdict: str):
        super().__init__(
            f"stale write: entry is at revision {current_revision} "
            f"with verdict {current_verdict!r}"
        )
        self.current_revision = current_revision
        self.current_verdict = current_verdict


class TruthStore:
    """Mutable ground-truth state behind the HTTP service and the CLI.

    Mutation is serialized with a lock; reads return snapshots. Revisions
    increase monotonically per (trajectory, leaf) so clients can detect
    concurrent edits (pass ``base_revision`` to get 409-style conflicts).
    """

    def __init__(self, truth_path, audit_path=None):
        self.truth_path = Path(truth_path)
        self.audit_path = (
            Path(audit_path)
            if audit_path is not None
            else self.truth_path.with_suffix(self.truth_path.suffix + ".audit.jsonl")
        )
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], TruthEntry] = {}
        self._revisions: dict[tuple[str, str], int] = {}
        self._sessions: dict[str, GradingSession] = {}
        self._session_leaves: dict[str, list[str]] = {}
        if self.truth_path.exists():
            loaded = ground_truth_from_docs(
                json.loads(self.truth_path.read_text(encoding="utf-8"))
            )
            self._entries = dict(loaded.entries)
            self._revisions = {key: 1 for key in self._entries}

    # -- reads --------------------------------------------------------------

    def snapshot(self) -> GroundTruth:
        with self._lock:
            return GroundTruth(entries=dict(self._entries))

    def get(self, trajectory_id: str, leaf_id: str) -> tuple[TruthEntry | None, int]:
        with self._lock:
            key = (trajectory_id, leaf_id)
            return self._entries.get(key), self._revisions.get(key, 0)

    def trajectory_doc(self, trajectory_id: str) -> dict:
        """The per-trajectory ground-truth document (empty entries if none)."""
        snap = self.snapshot()
        for doc in ground_truth_to_docs(snap):
            if doc["trajectory_id"] == trajectory_id:
                return doc
        return {"trajectory_id": trajectory_id, "entries": []}

    # -- writes -------------------------------------------------------------

    def put(
        self,
        trajectory_id: str,
        leaf_id: str,
        verdict: Verdict | str,
        grader_id: str,
        notes: str = "",
        base_revision: int | None = None,
    ) -> int:
        """Record a label; returns the new revision.

        Without ``base_revision`` the write is last-write-wins. With it, a
        mismatch against the current revision raises ConflictError so
        concurrent graders surface instead of silently overwriting.
        """
        verdict = Verdict.from_any(verdict)
        timestamp = _utc_now()
        with self._lock:
            key = (trajectory_id, leaf_id)
            current = self._revisions.get(key, 0)
            if base_revision is not None and base_revision != current:
                existing = self._entries.get(key)
                raise ConflictError(
                    current, existing.verdict.value if existing else UNGRADED
                )
            revision = current + 1
            entry = TruthEntry(
                verdict=verdict, grader_id=grader_id, notes=notes, timestamp=timestamp
            )
            self._append_audit(
                {
                    "trajectory_id": trajectory_id,
                    "leaf_id": leaf_id,
                    "verdict": verdict.value,
                    "grader_id": grader_id,
                    "notes": notes,
                    "timestamp": timestamp,
                    "revision": revision,
                }
            )
            self._entries[key] = entry
            self._revisions[key] = revision
            self._flush_locked()
            self._refresh_sessions_locked(trajectory_id)
            return revision

    def _append_audit(self, record: dict) -> None:
        self.audit_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.audit_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _flush_locked(self) -> None:
        docs = ground_truth_to_docs(GroundTruth(entries=dict(self._entries)))
        tmp = self.truth_path.with_suffix(".tmp")
        self.truth_path.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_text(canonical_json(docs), encoding="utf-8")
        os.replace(tmp, self.truth_path)

    def audit_records(self) -> list[dict]:
        if not self.audit_path.exists():
            return []
        records = []
        with open(self.audit_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    # -- grading sessions ----------------------------------------------------

    def create_session(
        self,
        grader_id: str,
        trajectory_id: str,
        rubric_version: str,
        leaf_ids: list[str],
    ) -> GradingSession:
        with self._lock:
            session = GradingSession(
                session_id=f"gs-{len(self._sessions) + 1:04d}",
                grader_id=grader_id,
                trajectory_id=trajectory_id,
                rubric_version=rubric_version,
            )
            self._sessions[session.session_id] = session
            self._session_leaves[session.session_id] = list(leaf_ids)
            return session

    def list_sessions(self) -> list[GradingSession]:
        with self._lock:
            return list(self._sessions.values())

    def session_progress(self, session_id: str) -> dict:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise KeyError(session_id)
            return self._session_progress_locked(session)

    def _session_progress_locked(self, session: GradingSession) -> dict:
        leaf_ids = self._session_leaves.get(session.session_id, [])
        progress = {}
        for leaf_id in leaf_ids:
            entry = self._entries.get((session.trajectory_id, leaf_id))
            progress[leaf_id] = entry.verdict.value if entry else UNGRADED
        return {
            "session_id": session.session_id,
            "grader_id": session.grader_id,
            "trajectory_id": session.trajectory_id,
            "rubric_version": session.rubric_version,
            "created_at": session.created_at,
            "completed_at": session.completed_at,
            "progress": progress,
        }

    def _refresh_sessions_locked(self, trajectory_id: str) -> None:
        for session in self._sessions.values():
            if session.trajectory_id != trajectory_id or session.completed_at:
                continue
            leaf_ids = self._session_leaves.get(session.session_id, [])
            if leaf_ids and all(
                (trajectory_id, leaf) in self._entries for leaf in leaf_ids
            ):
                session.completed_at = _utc_now()
