import { ApiClient } from "./api.js";
import { GradingController } from "./controller.js";
import { RubricView } from "./rubricView.js";
import { TrajectoryView } from "./trajectoryView.js";

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const params = new URLSearchParams(window.location.search);
  const graderId = params.get("grader") ?? "anonymous-grader";

  let trajectoryId = params.get("trajectory");
  if (!trajectoryId) {
    const all = await api.listTrajectories();
    if (all.length === 0) {
      document.body.textContent = "no trajectories loaded on the server";
      return;
    }
    trajectoryId = all[0].trajectory_id;
  }

  const controller = new GradingController(api, graderId, trajectoryId);
  const rubricView = new RubricView(
    document.getElementById("rubric-pane")!,
    controller,
  );
  const trajectoryView = new TrajectoryView(
    document.getElementById("trajectory-pane")!,
    api,
    trajectoryId,
  );

  controller.onChange = () => rubricView.render();
  rubricView.render();
  await Promise.all([controller.load(), trajectoryView.init()]);

  const header = document.getElementById("topbar")!;
  header.textContent = `grading ${trajectoryId} as ${graderId} — j/k: move, p: pass, f: fail`;

  // Keyboard-driven grading: graders move through dozens of leaves per run.
  document.addEventListener("keydown", (event) => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) return;
    if (event.key === "j") controller.selectNext(1);
    else if (event.key === "k") controller.selectNext(-1);
    else if (event.key === "p" && controller.selectedLeafId) {
      void controller.setVerdict(controller.selectedLeafId, "pass").catch(() => {});
    } else if (event.key === "f" && controller.selectedLeafId) {
      void controller.setVerdict(controller.selectedLeafId, "fail").catch(() => {});
    }
  });

  // Dirty drafts are never silently discarded.
  window.addEventListener("beforeunload", (event) => {
    if (controller.hasUnsavedWork()) {
      event.preventDefault();
      event.returnValue = "";
    }
  });
}

void boot().catch((error) => {
  const banner = document.createElement("div");
  banner.className = "banner error";
  banner.textContent = `failed to load: ${error}`;
  const retry = document.createElement("button");
  retry.textContent = "retry";
  retry.addEventListener("click", () => window.location.reload());
  banner.append(retry);
  document.body.prepend(banner);
});
