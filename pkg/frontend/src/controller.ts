import { ConflictError, type GradingApi } from "./api.js";
import { partialScores } from "./score.js";
import type {
  GroundTruthDoc,
  LeafInfo,
  Rubric,
  VerdictValue,
} from "./types.js";
import { leafNodes } from "./types.js";

export type SyncStatus = "ungraded" | "saving" | "saved" | "dirty" | "conflict";

export interface LeafState {
  info: LeafInfo;
  /** Last verdict confirmed by the server (null = ungraded there). */
  savedVerdict: VerdictValue | null;
  savedNotes: string;
  revision: number;
  /** Local verdict shown in the UI; equals savedVerdict unless mid-save/failed. */
  shownVerdict: VerdictValue | null;
  notesDraft: string;
  sync: SyncStatus;
  conflict: { serverVerdict: string; serverRevision: number } | null;
}

/**
 * Grading workflow behind the UI: loads server state, records verdicts with
 * optimistic updates (rolled back on failure, surfaced on conflict), and
 * exposes progress and weighted-average previews.
 *
 * Every verdict that ends up saved corresponds to exactly one explicit
 * setVerdict call; the controller never fabricates or defaults a verdict.
 */
export class GradingController {
  rubric: Rubric | null = null;
  sessionId: string | null = null;
  private states = new Map<string, LeafState>();
  private order: string[] = [];
  selectedLeafId: string | null = null;
  onChange: () => void = () => {};

  constructor(
    private readonly api: GradingApi,
    readonly graderId: string,
    readonly trajectoryId: string,
  ) {}

  /** Fetch rubric + existing labels; refresh always reproduces server state. */
  async load(): Promise<void> {
    this.rubric = await this.api.getRubric();
    const leaves = leafNodes(this.rubric.root);
    this.order = leaves.map((l) => l.id);
    const existing = await this.api.exportTruth(this.trajectoryId);
    const byLeaf = new Map(existing.entries.map((e) => [e.leaf_id, e]));

    this.states.clear();
    for (const info of leaves) {
      const entry = byLeaf.get(info.id);
      let revision = 0;
      if (entry) {
        const view = await this.api.getTruthEntry(this.trajectoryId, info.id);
        revision = view.revision;
      }
      this.states.set(info.id, {
        info,
        savedVerdict: entry ? entry.verdict : null,
        savedNotes: entry?.notes ?? "",
        revision,
        shownVerdict: entry ? entry.verdict : null,
        notesDraft: entry?.notes ?? "",
        sync: entry ? "saved" : "ungraded",
        conflict: null,
      });
    }
    this.selectedLeafId = this.order[0] ?? null;
    const session = await this.api.createSession(this.graderId, this.trajectoryId);
    this.sessionId = session.session_id;
    this.onChange();
  }

  leaves(): LeafState[] {
    return this.order.map((id) => this.states.get(id)!);
  }

  leaf(leafId: string): LeafState {
    const state = this.states.get(leafId);
    if (!state) throw new Error(`unknown leaf ${leafId}`);
    return state;
  }

  select(leafId: string): void {
    if (!this.states.has(leafId)) return;
    this.selectedLeafId = leafId;
    this.onChange();
  }

  selectNext(step = 1): void {
    if (!this.selectedLeafId || this.order.length === 0) return;
    const index = this.order.indexOf(this.selectedLeafId);
    const next = (index + step + this.order.length) % this.order.length;
    this.selectedLeafId = this.order[next];
    this.onChange();
  }

  setNotesDraft(leafId: string, notes: string): void {
    const state = this.leaf(leafId);
    state.notesDraft = notes;
    if (state.sync === "saved" && notes !== state.savedNotes) state.sync = "dirty";
    this.onChange();
  }

  /**
   * Record a verdict: optimistic flip, PUT with the known base revision,
   * rollback + dirty on failure, conflict state on 409 (server value kept
   * visible alongside ours; nothing merged silently).
   */
  async setVerdict(leafId: string, verdict: VerdictValue): Promise<void> {
    const state = this.leaf(leafId);
    const previousShown = state.shownVerdict;
    state.shownVerdict = verdict;
    state.sync = "saving";
    state.conflict = null;
    this.onChange();
    try {
      const result = await this.api.putVerdict(this.trajectoryId, leafId, {
        verdict,
        grader_id: this.graderId,
        notes: state.notesDraft,
        base_revision: state.revision,
      });
      state.revision = result.revision;
      state.savedVerdict = verdict;
      state.savedNotes = state.notesDraft;
      state.sync = "saved";
    } catch (error) {
      state.shownVerdict = previousShown;
      if (error instanceof ConflictError) {
        state.sync = "conflict";
        state.conflict = {
          serverVerdict: error.currentVerdict,
          serverRevision: error.currentRevision,
        };
      } else {
        state.sync = state.savedVerdict === null ? "ungraded" : "dirty";
        throw error;
      }
    } finally {
      this.onChange();
    }
  }

  /** Resolve a surfaced conflict: adopt the server value or overwrite it. */
  async resolveConflict(leafId: string, resolution: "server" | "mine", myVerdict?: VerdictValue): Promise<void> {
    const state = this.leaf(leafId);
    const conflict = state.conflict;
    if (!conflict) return;
    if (resolution === "server") {
      const view = await this.api.getTruthEntry(this.trajectoryId, leafId);
      state.savedVerdict = view.verdict;
      state.shownVerdict = view.verdict;
      state.savedNotes = view.notes;
      state.notesDraft = view.notes;
      state.revision = view.revision;
      state.sync = "saved";
      state.conflict = null;
      this.onChange();
      return;
    }
    state.revision = conflict.serverRevision;
    state.conflict = null;
    const verdict = myVerdict ?? state.shownVerdict;
    if (verdict) await this.setVerdict(leafId, verdict);
  }

  progress(): { graded: number; total: number } {
    let graded = 0;
    for (const state of this.states.values()) {
      if (state.savedVerdict !== null) graded += 1;
    }
    return { graded, total: this.states.size };
  }

  isComplete(): boolean {
    const { graded, total } = this.progress();
    return total > 0 && graded === total;
  }

  /** Unsaved work exists; used by the navigation guard. */
  hasUnsavedWork(): boolean {
    for (const state of this.states.values()) {
      if (state.sync === "dirty" || state.sync === "saving" || state.sync === "conflict") {
        return true;
      }
    }
    return false;
  }

  savedVerdicts(): Record<string, VerdictValue> {
    const out: Record<string, VerdictValue> = {};
    for (const [id, state] of this.states) {
      if (state.savedVerdict !== null) out[id] = state.savedVerdict;
    }
    return out;
  }

  /** Local weighted-average preview over fully-graded subtrees. */
  previewScores(): Record<string, number> {
    if (!this.rubric) return {};
    return partialScores(this.rubric.root, this.savedVerdicts());
  }

  /** Same preview computed by the scoring engine, via the API. */
  serverPreviewScores(): Promise<Record<string, number>> {
    return this.api
      .scorePreview(this.savedVerdicts())
      .then((body) => body.per_node);
  }

  exportTruth(): Promise<GroundTruthDoc> {
    return this.api.exportTruth(this.trajectoryId);
  }
}
