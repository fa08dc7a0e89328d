"""HTTP API backing the human-grading UI and report browsing.

Read-only over the rubric and trajectory corpus; only ground truth and
grading sessions are mutable. Label writes are durable (audit log first,
then atomic rewrite of the truth file) and conflict-checked per
(trajectory, leaf) when the client supplies its base revision.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import BadRegexError, IndexOutOfRangeError, UnknownLeafError
from .rubric import (
    Rubric,
    Verdict,
    load_rubric,
    partial_scores,
    rubric_to_dict,
)
from .trajectory import (
    SearchField,
    SearchMode,
    Trajectory,
    get_call,
    load_corpus,
    load_trajectory_file,
    search_calls,
    stats,
)
from .truthstore import ConflictError, TruthStore


class VerdictWrite(BaseModel):
    verdict: str
    grader_id: str
    notes: str = ""
    base_revision: int | None = None


class SessionCreate(BaseModel):
    grader_id: str
    trajectory_id: str


class ScoreRequest(BaseModel):
    verdicts: dict[str, str]


def build_app(
    rubric_path,
    corpus,
    truth_path,
    frontend_dir=None,
    runs_dir="runs",
) -> FastAPI:
    rubric: Rubric = load_rubric(rubric_path)
    corpus_path = Path(corpus)
    if corpus_path.is_dir():
        trajectories = load_corpus(corpus_path)
    else:
        trajectories = [load_trajectory_file(corpus_path)]
    by_id: dict[str, Trajectory] = {t.trajectory_id: t for t in trajectories}
    store = TruthStore(truth_path)
    leaf_ids = rubric.leaf_ids

    app = FastAPI(title="trajudge", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def trajectory_or_404(trajectory_id: str) -> Trajectory:
        traj = by_id.get(trajectory_id)
        if traj is None:
            raise HTTPException(404, f"unknown trajectory {trajectory_id!r}")
        return traj

    def leaf_or_404(leaf_id: str) -> None:
        if leaf_id not in leaf_ids:
            raise HTTPException(404, f"unknown rubric leaf {leaf_id!r}")

    # -- rubric ---------------------------------------------------------------

    @app.get("/api/rubric")
    def api_rubric():
        return rubric_to_dict(rubric)

    @app.post("/api/rubric/score")
    def api_rubric_score(body: ScoreRequest):
        try:
            verdicts = {k: Verdict.from_any(v) for k, v in body.verdicts.items()}
            return {"per_node": partial_scores(rubric, verdicts)}
        except (UnknownLeafError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc

    # -- trajectories ----------------------------------------------------------

    @app.get("/api/trajectories")
    def api_trajectories():
        out = []
        for traj in trajectories:
            s = stats(traj)
            out.append(
                {
                    "trajectory_id": traj.trajectory_id,
                    "metadata": traj.metadata,
                    "calls": s.calls,
                    "distinct_tools": s.distinct_tools,
                }
            )
        return out

    @app.get("/api/trajectories/{trajectory_id}/stats")
    def api_stats(trajectory_id: str):
        traj = trajectory_or_404(trajectory_id)
        s = stats(traj)
        return {
            "trajectory_id": traj.trajectory_id,
            "calls": s.calls,
            "distinct_tools": s.distinct_tools,
            "response_bytes": s.response_bytes,
            "subagent_calls": s.subagent_calls,
            "metadata": traj.metadata,
            "system_prompt": traj.system_prompt,
            "user_prompt": traj.user_prompt,
        }

    @app.get("/api/trajectories/{trajectory_id}/calls")
    def api_calls(
        trajectory_id: str,
        offset: int = Query(0, ge=0),
        limit: int = Query(50, ge=1, le=500),
    ):
        traj = trajectory_or_404(trajectory_id)
        window = traj.calls[offset: offset + limit]
        return {
            "total": len(traj.calls),
            "offset": offset,
            "calls": [
                {
                    "index": c.index,
                    "call_id": c.call_id,
                    "tool_name": c.tool_name,
                    "is_subagent": c.is_subagent,
                    "response_chars": len(c.response),
                }
                for c in window
            ],
        }

    @app.get("/api/trajectories/{trajectory_id}/calls/{index}")
    def api_call(
        trajectory_id: str,
        index: int,
        offset: int = Query(0, ge=0),
        max_chars: int = Query(4096, ge=256, le=65536),
    ):
        traj = trajectory_or_404(trajectory_id)
        try:
            page = get_call(traj, index, offset=offset, max_chars=max_chars)
        except IndexOutOfRangeError as exc:
            raise HTTPException(404, str(exc)) from exc
        return {
            "index": page.index,
            "call_id": page.call_id,
            "tool_name": page.tool_name,
            "is_subagent": page.is_subagent,
            "arguments": page.arguments_text,
            "response_chunk": page.response_chunk,
            "offset": page.offset,
            "total_response_chars": page.total_response_chars,
            "has_more": page.has_more,
        }

    @app.get("/api/trajectories/{trajectory_id}/search")
    def api_search(
        trajectory_id: str,
        q: str,
        scope: str = "arguments,response,tool_name",
        mode: str = "substring",
        case_sensitive: bool = False,
    ):
        traj = trajectory_or_404(trajectory_id)
        try:
            fields = {SearchField(tok.strip()) for tok in scope.split(",") if tok.strip()}
            hits = search_calls(
                traj,
                q,
                scope=fields,
                mode=SearchMode(mode),
                case_sensitive=case_sensitive,
            )
        except (BadRegexError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        return {
            "query": q,
            "total": len(hits),
            "hits": [
                {
                    "call_index": h.call_index,
                    "field": h.field.value,
                    "snippet": h.snippet,
                    "match_count_in_record": h.match_count_in_record,
                }
                for h in hits
            ],
        }

    @app.get("/api/trajectories/{trajectory_id}/tool-definitions")
    def api_tool_definitions(trajectory_id: str):
        traj = trajectory_or_404(trajectory_id)
        return [
            {"name": d.name, "description": d.description, "parameters": d.parameters}
            for d in traj.tool_definitions
        ]

    # -- ground truth -----------------------------------------------------------

    @app.get("/api/ground-truth/{trajectory_id}")
    def api_truth_export(trajectory_id: str):
        trajectory_or_404(trajectory_id)
        return store.trajectory_doc(trajectory_id)

    @app.get("/api/ground-truth/{trajectory_id}/{leaf_id}")
    def api_truth_get(trajectory_id: str, leaf_id: str):
        trajectory_or_404(trajectory_id)
        leaf_or_404(leaf_id)
        entry, revision = store.get(trajectory_id, leaf_id)
        return {
            "trajectory_id": trajectory_id,
            "leaf_id": leaf_id,
            "revision": revision,
            "verdict": entry.verdict.value if entry else None,
            "grader_id": entry.grader_id if entry else None,
            "notes": entry.notes if entry else "",
            "timestamp": entry.timestamp if entry else None,
        }

    @app.put("/api/ground-truth/{trajectory_id}/{leaf_id}")
    def api_truth_put(trajectory_id: str, leaf_id: str, body: VerdictWrite):
        trajectory_or_404(trajectory_id)
        leaf_or_404(leaf_id)
        try:
            verdict = Verdict.from_any(body.verdict)
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        if not body.grader_id.strip():
            raise HTTPException(422, "grader_id must be non-empty")
        try:
            revision = store.put(
                trajectory_id,
                leaf_id,
                verdict,
                grader_id=body.grader_id,
                notes=body.notes,
                base_revision=body.base_revision,
            )
        except ConflictError as exc:
            raise HTTPException(
                409,
                {
                    "message": str(exc),
                    "current_revision": exc.current_revision,
                    "current_verdict": exc.current_verdict,
                },
            ) from exc
        return {"trajectory_id": trajectory_id, "leaf_id": leaf_id, "revision": revision}

    # -- grading sessions ---------------------------------------------------------

    @app.get("/api/sessions")
    def api_sessions_list():
        return [store.session_progress(s.session_id) for s in store.list_sessions()]

    @app.post("/api/sessions", status_code=201)
    def api_sessions_create(body: SessionCreate):
        trajectory_or_404(body.trajectory_id)
        if not body.grader_id.strip():
            raise HTTPException(422, "grader_id must be non-empty")
        session = store.create_session(
            grader_id=body.grader_id,
            trajectory_id=body.trajectory_id,
            rubric_version=rubric.version,
            leaf_ids=leaf_ids,
        )
        return store.session_progress(session.session_id)

    # -- reports --------------------------------------------------------------

    @app.get("/api/reports/{run_id}")
    def api_report(run_id: str):
        run_dir = Path(runs_dir) / run_id
        manifest = run_dir / "manifest.json"
        if not manifest.exists():
            raise HTTPException(404, f"no run named {run_id!r}")
        payload = {"manifest": json.loads(manifest.read_text(encoding="utf-8"))}
        for name in ("summary.json", "grade-report.json"):
            path = run_dir / name
            if path.exists():
                payload[name.removesuffix(".json").replace("-", "_")] = json.loads(
                    path.read_text(encoding="utf-8")
                )
        return payload

    if frontend_dir:
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="frontend")

    return app
