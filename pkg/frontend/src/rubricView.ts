import type { GradingController, LeafState } from "./controller.js";
import type { RubricNode } from "./types.js";

const CATEGORY_LABELS: Record<string, string> = {
  operational_objective: "objective",
  operational_security: "opsec",
  tradecraft: "tradecraft",
};

/** Checklist tree: gradable leaves, category badges, live score previews. */
export class RubricView {
  constructor(
    private readonly root: HTMLElement,
    private readonly controller: GradingController,
  ) {}

  render(): void {
    const rubric = this.controller.rubric;
    this.root.textContent = "";
    if (!rubric) {
      this.root.append(banner("loading rubric…"));
      return;
    }
    const { graded, total } = this.controller.progress();
    const header = document.createElement("header");
    header.className = "rubric-header";
    const title = document.createElement("h2");
    title.textContent = `${rubric.name} v${rubric.version}`;
    const progress = document.createElement("span");
    progress.className = "progress";
    progress.textContent = `${graded}/${total} graded`;
    header.append(title, progress);

    const exportButton = document.createElement("button");
    exportButton.textContent = "export ground truth";
    exportButton.className = "export";
    exportButton.disabled = !this.controller.isComplete();
    exportButton.addEventListener("click", () => void this.download());
    header.append(exportButton);
    this.root.append(header);

    if (this.controller.isComplete()) {
      this.root.append(banner("all leaves graded — session complete", "done"));
    }

    const previews = this.controller.previewScores();
    this.root.append(this.renderNode(rubric.root, previews));
  }

  private async download(): Promise<void> {
    const doc = await this.controller.exportTruth();
    const blob = new Blob([JSON.stringify(doc, null, 2)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${doc.trajectory_id}.truth.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private renderNode(node: RubricNode, previews: Record<string, number>): HTMLElement {
    const children = node.children ?? [];
    if (children.length === 0) {
      return this.renderLeaf(this.controller.leaf(node.id));
    }
    const container = document.createElement("details");
    container.className = "branch";
    container.open = true;
    const summary = document.createElement("summary");
    const label = document.createElement("span");
    label.textContent = node.requirement;
    summary.append(label);
    const score = document.createElement("span");
    score.className = "score";
    score.textContent =
      node.id in previews ? previews[node.id].toFixed(2) : "—";
    score.title = "weighted average of graded children";
    summary.append(score);
    container.append(summary);
    const list = document.createElement("div");
    list.className = "children";
    for (const child of children) list.append(this.renderNode(child, previews));
    container.append(list);
    return container;
  }

  private renderLeaf(state: LeafState): HTMLElement {
    const row = document.createElement("div");
    row.className = `leaf sync-${state.sync}`;
    row.dataset.leafId = state.info.id;
    if (state.info.id === this.controller.selectedLeafId) {
      row.classList.add("selected");
    }
    row.addEventListener("click", () => this.controller.select(state.info.id));

    const badge = document.createElement("span");
    badge.className = `badge cat-${state.info.category}`;
    badge.textContent = CATEGORY_LABELS[state.info.category] ?? state.info.category;

    const text = document.createElement("span");
    text.className = "requirement";
    text.textContent = state.info.requirement;

    const controls = document.createElement("span");
    controls.className = "verdict-controls";
    for (const verdict of ["pass", "fail"] as const) {
      const button = document.createElement("button");
      button.textContent = verdict;
      button.className = verdict;
      if (state.shownVerdict === verdict) button.classList.add("active");
      button.addEventListener("click", (event) => {
        event.stopPropagation();
        this.controller.select(state.info.id);
        void this.controller.setVerdict(state.info.id, verdict).catch(() => {
          /* failure already reflected in sync state */
        });
      });
      controls.append(button);
    }

    const status = document.createElement("span");
    status.className = "status";
    status.textContent = state.sync === "saving" ? "…" : state.sync;

    row.append(badge, text, controls, status);

    if (state.conflict) {
      const conflict = document.createElement("div");
      conflict.className = "conflict-box";
      conflict.textContent =
        `another grader set "${state.conflict.serverVerdict}" ` +
        `(rev ${state.conflict.serverRevision}); yours: "${state.shownVerdict ?? "—"}"`;
      const keepServer = document.createElement("button");
      keepServer.textContent = "take theirs";
      keepServer.addEventListener("click", (event) => {
        event.stopPropagation();
        void this.controller.resolveConflict(state.info.id, "server");
      });
      const keepMine = document.createElement("button");
      keepMine.textContent = "keep mine";
      keepMine.addEventListener("click", (event) => {
        event.stopPropagation();
        void this.controller.resolveConflict(state.info.id, "mine");
      });
      conflict.append(keepServer, keepMine);
      row.append(conflict);
    }
    return row;
  }
}

function banner(message: string, extraClass = ""): HTMLElement {
  const el = document.createElement("div");
  el.className = `banner ${extraClass}`.trim();
  el.textContent = message;
  return el;
}
