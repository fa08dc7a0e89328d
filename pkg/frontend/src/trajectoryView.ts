import type { GradingApi } from "./api.js";
import type { CallPage, SearchHit } from "./types.js";

const PAGE_SIZE = 25;
const RESPONSE_PAGE_CHARS = 4096;

/**
 * Trajectory explorer: paged call list, search with hit->call navigation,
 * and a call viewer that pages long responses with a "load more" control.
 * The grader gets the same affordances the judge tools expose.
 */
export class TrajectoryView {
  private listOffset = 0;
  private totalCalls = 0;
  private openCall: CallPage | null = null;
  private responseText = "";
  private hits: SearchHit[] = [];
  private lastQuery = "";
  private error = "";

  constructor(
    private readonly root: HTMLElement,
    private readonly api: GradingApi,
    private readonly trajectoryId: string,
  ) {}

  async init(): Promise<void> {
    await this.renderList();
  }

  private async renderList(): Promise<void> {
    try {
      const listing = await this.api.listCalls(this.trajectoryId, this.listOffset, PAGE_SIZE);
      this.totalCalls = listing.total;
      this.error = "";
      this.render(listing.calls);
    } catch (err) {
      this.error = String(err);
      this.render([]);
    }
  }

  async openCallAt(index: number): Promise<void> {
    try {
      this.openCall = await this.api.getCall(this.trajectoryId, index, 0, RESPONSE_PAGE_CHARS);
      this.responseText = this.openCall.response_chunk;
      this.error = "";
    } catch (err) {
      this.error = String(err);
    }
    await this.renderList();
  }

  private async loadMoreResponse(): Promise<void> {
    if (!this.openCall) return;
    const next = await this.api.getCall(
      this.trajectoryId,
      this.openCall.index,
      this.responseText.length,
      RESPONSE_PAGE_CHARS,
    );
    this.responseText += next.response_chunk;
    this.openCall = { ...next, response_chunk: this.responseText };
    await this.renderList();
  }

  private async runSearch(query: string): Promise<void> {
    this.lastQuery = query;
    if (!query) {
      this.hits = [];
      await this.renderList();
      return;
    }
    try {
      const result = await this.api.search(this.trajectoryId, query);
      this.hits = result.hits;
      this.error = "";
    } catch (err) {
      this.hits = [];
      this.error = String(err);
    }
    await this.renderList();
  }

  private render(calls: { index: number; tool_name: string; is_subagent: boolean; response_chars: number }[]): void {
    this.root.textContent = "";

    const searchBox = document.createElement("form");
    searchBox.className = "search-box";
    const input = document.createElement("input");
    input.type = "search";
    input.placeholder = "search arguments, responses, tool names…";
    input.value = this.lastQuery;
    const go = document.createElement("button");
    go.textContent = "search";
    searchBox.append(input, go);
    searchBox.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.runSearch(input.value.trim());
    });
    this.root.append(searchBox);

    if (this.error) {
      const err = document.createElement("div");
      err.className = "banner error";
      err.textContent = this.error;
      this.root.append(err);
    }

    if (this.lastQuery) {
      const results = document.createElement("div");
      results.className = "search-results";
      if (this.hits.length === 0) {
        const none = document.createElement("div");
        none.className = "banner";
        none.textContent = `no matches for "${this.lastQuery}"`;
        results.append(none);
      }
      for (const hit of this.hits) {
        const row = document.createElement("button");
        row.className = "hit";
        row.textContent = `#${hit.call_index} [${hit.field}] ${hit.snippet}`;
        row.addEventListener("click", () => void this.openCallAt(hit.call_index));
        results.append(row);
      }
      this.root.append(results);
    }

    const pane = document.createElement("div");
    pane.className = "explorer-pane";

    const list = document.createElement("div");
    list.className = "call-list";
    const pager = document.createElement("div");
    pager.className = "pager";
    const prev = document.createElement("button");
    prev.textContent = "◀";
    prev.disabled = this.listOffset === 0;
    prev.addEventListener("click", () => {
      this.listOffset = Math.max(0, this.listOffset - PAGE_SIZE);
      void this.renderList();
    });
    const next = document.createElement("button");
    next.textContent = "▶";
    next.disabled = this.listOffset + PAGE_SIZE >= this.totalCalls;
    next.addEventListener("click", () => {
      this.listOffset += PAGE_SIZE;
      void this.renderList();
    });
    const where = document.createElement("span");
    where.textContent = `calls ${this.listOffset}–${Math.min(
      this.listOffset + PAGE_SIZE,
      this.totalCalls,
    )} of ${this.totalCalls}`;
    pager.append(prev, where, next);
    list.append(pager);

    for (const call of calls) {
      const row = document.createElement("button");
      row.className = "call-row";
      if (this.openCall?.index === call.index) row.classList.add("open");
      const tag = call.is_subagent ? " ⇄" : "";
      row.textContent = `#${call.index} ${call.tool_name}${tag} (${call.response_chars} chars)`;
      row.addEventListener("click", () => void this.openCallAt(call.index));
      list.append(row);
    }
    pane.append(list);

    const detail = document.createElement("div");
    detail.className = "call-detail";
    if (this.openCall) {
      const title = document.createElement("h3");
      title.textContent = `#${this.openCall.index} ${this.openCall.tool_name}`;
      const args = document.createElement("pre");
      args.className = "arguments";
      args.textContent = this.openCall.arguments;
      const response = document.createElement("pre");
      response.className = "response";
      response.textContent = this.responseText;
      detail.append(title, args, response);
      if (this.responseText.length < this.openCall.total_response_chars) {
        const more = document.createElement("button");
        more.className = "load-more";
        more.textContent = `load more (${this.responseText.length}/${this.openCall.total_response_chars} chars)`;
        more.addEventListener("click", () => void this.loadMoreResponse());
        detail.append(more);
      }
    } else {
      const hint = document.createElement("div");
      hint.className = "banner";
      hint.textContent = "select a call to inspect it";
      detail.append(hint);
    }
    pane.append(detail);
    this.root.append(pane);
  }
}
