import type {
  CallListing,
  CallPage,
  GroundTruthDoc,
  Rubric,
  SearchResult,
  SessionView,
  TrajectorySummary,
  TruthEntryView,
  VerdictValue,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number,
    public readonly detail: unknown = null,
  ) {
    super(message);
  }
}

export class ConflictError extends ApiError {
  constructor(
    public readonly currentRevision: number,
    public readonly currentVerdict: string,
  ) {
    super(`conflict: entry moved to revision ${currentRevision}`, 409);
  }
}

/** What the UI needs from the grading service; ApiClient is the real one. */
export interface GradingApi {
  getRubric(): Promise<Rubric>;
  scorePreview(
    verdicts: Record<string, VerdictValue>,
  ): Promise<{ per_node: Record<string, number> }>;
  listTrajectories(): Promise<TrajectorySummary[]>;
  listCalls(trajectoryId: string, offset?: number, limit?: number): Promise<CallListing>;
  getCall(
    trajectoryId: string,
    index: number,
    offset?: number,
    maxChars?: number,
  ): Promise<CallPage>;
  search(trajectoryId: string, query: string, scope?: string): Promise<SearchResult>;
  getTruthEntry(trajectoryId: string, leafId: string): Promise<TruthEntryView>;
  putVerdict(
    trajectoryId: string,
    leafId: string,
    body: {
      verdict: VerdictValue;
      grader_id: string;
      notes?: string;
      base_revision?: number;
    },
  ): Promise<{ revision: number }>;
  exportTruth(trajectoryId: string): Promise<GroundTruthDoc>;
  createSession(graderId: string, trajectoryId: string): Promise<SessionView>;
  listSessions(): Promise<SessionView[]>;
}

/** Thin typed client over the grading service; the UI's only data source. */
export class ApiClient implements GradingApi {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      let detail: unknown = null;
      try {
        detail = (await response.json()).detail;
      } catch {
        /* non-JSON error body */
      }
      if (response.status === 409 && detail && typeof detail === "object") {
        const d = detail as { current_revision: number; current_verdict: string };
        throw new ConflictError(d.current_revision, d.current_verdict);
      }
      throw new ApiError(`${path}: HTTP ${response.status}`, response.status, detail);
    }
    return (await response.json()) as T;
  }

  getRubric(): Promise<Rubric> {
    return this.request<Rubric>("/api/rubric");
  }

  scorePreview(verdicts: Record<string, VerdictValue>): Promise<{ per_node: Record<string, number> }> {
    return this.request("/api/rubric/score", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ verdicts }),
    });
  }

  listTrajectories(): Promise<TrajectorySummary[]> {
    return this.request<TrajectorySummary[]>("/api/trajectories");
  }

  listCalls(trajectoryId: string, offset = 0, limit = 50): Promise<CallListing> {
    return this.request<CallListing>(
      `/api/trajectories/${encodeURIComponent(trajectoryId)}/calls?offset=${offset}&limit=${limit}`,
    );
  }

  getCall(trajectoryId: string, index: number, offset = 0, maxChars = 4096): Promise<CallPage> {
    return this.request<CallPage>(
      `/api/trajectories/${encodeURIComponent(trajectoryId)}/calls/${index}` +
        `?offset=${offset}&max_chars=${maxChars}`,
    );
  }

  search(trajectoryId: string, query: string, scope?: string): Promise<SearchResult> {
    const params = new URLSearchParams({ q: query });
    if (scope) params.set("scope", scope);
    return this.request<SearchResult>(
      `/api/trajectories/${encodeURIComponent(trajectoryId)}/search?${params}`,
    );
  }

  getTruthEntry(trajectoryId: string, leafId: string): Promise<TruthEntryView> {
    return this.request<TruthEntryView>(
      `/api/ground-truth/${encodeURIComponent(trajectoryId)}/${encodeURIComponent(leafId)}`,
    );
  }

  putVerdict(
    trajectoryId: string,
    leafId: string,
    body: {
      verdict: VerdictValue;
      grader_id: string;
      notes?: string;
      base_revision?: number;
    },
  ): Promise<{ revision: number }> {
    return this.request(
      `/api/ground-truth/${encodeURIComponent(trajectoryId)}/${encodeURIComponent(leafId)}`,
      {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
  }

  exportTruth(trajectoryId: string): Promise<GroundTruthDoc> {
    return this.request<GroundTruthDoc>(
      `/api/ground-truth/${encodeURIComponent(trajectoryId)}`,
    );
  }

  createSession(graderId: string, trajectoryId: string): Promise<SessionView> {
    return this.request<SessionView>("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ grader_id: graderId, trajectory_id: trajectoryId }),
    });
  }

  listSessions(): Promise<SessionView[]> {
    return this.request<SessionView[]>("/api/sessions");
  }
}
