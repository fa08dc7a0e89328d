export type Category = "operational_objective" | "operational_security" | "tradecraft";
export type VerdictValue = "pass" | "fail";

export interface RubricNode {
  id: string;
  requirement: string;
  weight: number;
  category?: Category | null;
  children?: RubricNode[];
}

export interface Rubric {
  name: string;
  version: string;
  metadata: Record<string, string>;
  root: RubricNode;
}

export interface TrajectorySummary {
  trajectory_id: string;
  metadata: Record<string, string>;
  calls: number;
  distinct_tools: number;
}

export interface CallSummary {
  index: number;
  call_id: string;
  tool_name: string;
  is_subagent: boolean;
  response_chars: number;
}

export interface CallListing {
  total: number;
  offset: number;
  calls: CallSummary[];
}

export interface CallPage {
  index: number;
  call_id: string;
  tool_name: string;
  is_subagent: boolean;
  arguments: string;
  response_chunk: string;
  offset: number;
  total_response_chars: number;
  has_more: boolean;
}

export interface SearchHit {
  call_index: number;
  field: "arguments" | "response" | "tool_name";
  snippet: string;
  match_count_in_record: number;
}

export interface SearchResult {
  query: string;
  total: number;
  hits: SearchHit[];
}

export interface TruthEntryView {
  trajectory_id: string;
  leaf_id: string;
  revision: number;
  verdict: VerdictValue | null;
  grader_id: string | null;
  notes: string;
  timestamp: string | null;
}

export interface GroundTruthEntry {
  leaf_id: string;
  verdict: VerdictValue;
  grader_id: string;
  notes?: string;
  timestamp: string;
}

export interface GroundTruthDoc {
  trajectory_id: string;
  entries: GroundTruthEntry[];
}

export interface SessionView {
  session_id: string;
  grader_id: string;
  trajectory_id: string;
  rubric_version: string;
  created_at: string;
  completed_at: string | null;
  progress: Record<string, VerdictValue | "ungraded">;
}

export interface LeafInfo {
  id: string;
  requirement: string;
  category: Category;
}

/** Depth-first document order, matching the engine's leaf iteration. */
export function leafNodes(root: RubricNode): LeafInfo[] {
  const out: LeafInfo[] = [];
  const walk = (node: RubricNode): void => {
    if (!node.children || node.children.length === 0) {
      out.push({
        id: node.id,
        requirement: node.requirement,
        category: (node.category ?? "operational_objective") as Category,
      });
      return;
    }
    for (const child of node.children) walk(child);
  };
  walk(root);
  return out;
}
