import type { RubricNode, VerdictValue } from "./types.js";

/**
 * Weighted-average preview over the subtrees whose leaves are all graded.
 *
 * Mirrors the engine's partial scoring: leaves score 0/1, an internal node
 * scores the weight-averaged children, and a node only gets a score once
 * every leaf under it has a verdict. The workflow test cross-checks this
 * against the service's /api/rubric/score endpoint, so the preview shown
 * while grading can never drift from the real scoring engine.
 */
export function partialScores(
  root: RubricNode,
  verdicts: Record<string, VerdictValue>,
): Record<string, number> {
  const out: Record<string, number> = {};

  const walk = (node: RubricNode): { covered: boolean; score: number } => {
    if (!node.children || node.children.length === 0) {
      const verdict = verdicts[node.id];
      if (verdict === undefined) return { covered: false, score: 0 };
      const score = verdict === "pass" ? 1 : 0;
      out[node.id] = score;
      return { covered: true, score };
    }
    let covered = true;
    let numerator = 0;
    let denominator = 0;
    for (const child of node.children) {
      const result = walk(child);
      covered = covered && result.covered;
      numerator += child.weight * result.score;
      denominator += child.weight;
    }
    if (!covered) return { covered: false, score: 0 };
    const score = numerator / denominator;
    out[node.id] = score;
    return { covered: true, score };
  };

  walk(root);
  return out;
}
