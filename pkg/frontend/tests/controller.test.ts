import { beforeEach, describe, expect, it } from "vitest";

import { ApiError, ConflictError, type GradingApi } from "../src/api.js";
import { GradingController } from "../src/controller.js";
import type {
  GroundTruthDoc,
  Rubric,
  SessionView,
  TruthEntryView,
  VerdictValue,
} from "../src/types.js";

const RUBRIC: Rubric = {
  name: "mini",
  version: "1",
  metadata: {},
  root: {
    id: "root",
    requirement: "all good",
    weight: 1,
    children: [
      { id: "a", requirement: "a holds", weight: 1, category: "operational_objective" },
      { id: "b", requirement: "b holds", weight: 1, category: "operational_security" },
      { id: "c", requirement: "c holds", weight: 2, category: "tradecraft" },
    ],
  },
};

/** In-memory stand-in implementing the documented API semantics. */
class FakeApi implements GradingApi {
  entries = new Map<string, { verdict: VerdictValue; notes: string; revision: number; grader: string }>();
  failNextPut: "error" | "conflict" | null = null;
  putCount = 0;

  async getRubric(): Promise<Rubric> {
    return RUBRIC;
  }

  async scorePreview(verdicts: Record<string, VerdictValue>) {
    const per_node: Record<string, number> = {};
    const values = Object.entries(verdicts);
    for (const [leaf, v] of values) per_node[leaf] = v === "pass" ? 1 : 0;
    const all = ["a", "b", "c"];
    if (all.every((l) => l in verdicts)) {
      per_node.root =
        (per_node.a * 1 + per_node.b * 1 + per_node.c * 2) / 4;
    }
    return { per_node };
  }

  async listTrajectories() {
    return [{ trajectory_id: "t", metadata: {}, calls: 0, distinct_tools: 0 }];
  }

  async listCalls() {
    return { total: 0, offset: 0, calls: [] };
  }

  async getCall(): Promise<never> {
    throw new ApiError("no calls", 404);
  }

  async search() {
    return { query: "", total: 0, hits: [] };
  }

  async getTruthEntry(_t: string, leafId: string): Promise<TruthEntryView> {
    const entry = this.entries.get(leafId);
    return {
      trajectory_id: "t",
      leaf_id: leafId,
      revision: entry?.revision ?? 0,
      verdict: entry?.verdict ?? null,
      grader_id: entry?.grader ?? null,
      notes: entry?.notes ?? "",
      timestamp: entry ? "2025-01-01T00:00:00Z" : null,
    };
  }

  async putVerdict(
    _t: string,
    leafId: string,
    body: { verdict: VerdictValue; grader_id: string; notes?: string; base_revision?: number },
  ): Promise<{ revision: number }> {
    this.putCount += 1;
    if (this.failNextPut === "error") {
      this.failNextPut = null;
      throw new ApiError("boom", 500);
    }
    const current = this.entries.get(leafId);
    const currentRevision = current?.revision ?? 0;
    if (this.failNextPut === "conflict") {
      this.failNextPut = null;
      throw new ConflictError(currentRevision, current?.verdict ?? "ungraded");
    }
    if (body.base_revision !== undefined && body.base_revision !== currentRevision) {
      throw new ConflictError(currentRevision, current?.verdict ?? "ungraded");
    }
    const revision = currentRevision + 1;
    this.entries.set(leafId, {
      verdict: body.verdict,
      notes: body.notes ?? "",
      revision,
      grader: body.grader_id,
    });
    return { revision };
  }

  async exportTruth(): Promise<GroundTruthDoc> {
    return {
      trajectory_id: "t",
      entries: [...this.entries.entries()].map(([leaf_id, e]) => ({
        leaf_id,
        verdict: e.verdict,
        grader_id: e.grader,
        notes: e.notes,
        timestamp: "2025-01-01T00:00:00Z",
      })),
    };
  }

  async createSession(graderId: string, trajectoryId: string): Promise<SessionView> {
    return {
      session_id: "gs-0001",
      grader_id: graderId,
      trajectory_id: trajectoryId,
      rubric_version: "1",
      created_at: "2025-01-01T00:00:00Z",
      completed_at: null,
      progress: {},
    };
  }

  async listSessions(): Promise<SessionView[]> {
    return [];
  }
}

describe("GradingController", () => {
  let api: FakeApi;
  let controller: GradingController;

  beforeEach(async () => {
    api = new FakeApi();
    controller = new GradingController(api, "alice", "t");
    await controller.load();
  });

  it("loads leaves in document order and starts ungraded", () => {
    expect(controller.leaves().map((l) => l.info.id)).toEqual(["a", "b", "c"]);
    expect(controller.progress()).toEqual({ graded: 0, total: 3 });
    expect(controller.selectedLeafId).toBe("a");
  });

  it("records a verdict and marks it saved", async () => {
    await controller.setVerdict("a", "pass");
    const leaf = controller.leaf("a");
    expect(leaf.sync).toBe("saved");
    expect(leaf.savedVerdict).toBe("pass");
    expect(leaf.revision).toBe(1);
    expect(controller.progress().graded).toBe(1);
  });

  it("rolls back the optimistic flip when the save fails", async () => {
    api.failNextPut = "error";
    await expect(controller.setVerdict("a", "pass")).rejects.toThrow("boom");
    const leaf = controller.leaf("a");
    expect(leaf.shownVerdict).toBeNull();
    expect(leaf.sync).toBe("ungraded");
    // a later retry succeeds normally
    await controller.setVerdict("a", "pass");
    expect(controller.leaf("a").sync).toBe("saved");
  });

  it("surfaces a 409 as a conflict with both values visible", async () => {
    await controller.setVerdict("b", "pass");
    api.failNextPut = "conflict";
    await controller.setVerdict("b", "fail");
    const leaf = controller.leaf("b");
    expect(leaf.sync).toBe("conflict");
    expect(leaf.conflict?.serverVerdict).toBe("pass");
    expect(leaf.shownVerdict).toBe("pass"); // rolled back, nothing merged
    expect(controller.hasUnsavedWork()).toBe(true);
  });

  it("resolves a conflict by taking the server value", async () => {
    await controller.setVerdict("b", "pass");
    api.failNextPut = "conflict";
    await controller.setVerdict("b", "fail");
    await controller.resolveConflict("b", "server");
    const leaf = controller.leaf("b");
    expect(leaf.sync).toBe("saved");
    expect(leaf.savedVerdict).toBe("pass");
    expect(controller.hasUnsavedWork()).toBe(false);
  });

  it("resolves a conflict by overwriting with mine", async () => {
    await controller.setVerdict("b", "pass");
    api.failNextPut = "conflict";
    await controller.setVerdict("b", "fail");
    await controller.resolveConflict("b", "mine", "fail");
    const leaf = controller.leaf("b");
    expect(leaf.sync).toBe("saved");
    expect(leaf.savedVerdict).toBe("fail");
    expect(api.entries.get("b")?.revision).toBe(2);
  });

  it("previews weighted averages only for graded subtrees", async () => {
    await controller.setVerdict("a", "pass");
    let preview = controller.previewScores();
    expect(preview.a).toBe(1);
    expect(preview).not.toHaveProperty("root");

    await controller.setVerdict("b", "fail");
    await controller.setVerdict("c", "pass");
    preview = controller.previewScores();
    // (1*1 + 1*0 + 2*1) / 4
    expect(preview.root).toBeCloseTo(0.75, 12);
    expect(controller.isComplete()).toBe(true);
  });

  it("local preview agrees with the API preview", async () => {
    await controller.setVerdict("a", "pass");
    await controller.setVerdict("b", "fail");
    await controller.setVerdict("c", "pass");
    const local = controller.previewScores();
    const server = await controller.serverPreviewScores();
    expect(local.root).toBeCloseTo(server.root, 12);
  });

  it("keyboard navigation wraps in both directions", () => {
    controller.selectNext(1);
    expect(controller.selectedLeafId).toBe("b");
    controller.selectNext(-1);
    controller.selectNext(-1);
    expect(controller.selectedLeafId).toBe("c");
  });

  it("refresh reproduces server state exactly", async () => {
    await controller.setVerdict("a", "pass");
    await controller.setVerdict("c", "fail");
    const reloaded = new GradingController(api, "alice", "t");
    await reloaded.load();
    expect(reloaded.savedVerdicts()).toEqual({ a: "pass", c: "fail" });
    expect(reloaded.leaf("a").revision).toBe(1);
    expect(reloaded.leaf("b").sync).toBe("ungraded");
  });

  it("never invents verdicts: saves equal explicit calls", async () => {
    await controller.setVerdict("a", "pass");
    await controller.setVerdict("a", "fail");
    expect(api.putCount).toBe(2);
    expect(Object.keys(controller.savedVerdicts())).toEqual(["a"]);
  });
});
