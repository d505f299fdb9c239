/** Thin fetch wrapper over the topoflow API. View reads are strictly GET. */

import type { Finding, TraceEvent, ViewDocument, ViewKind } from "./types.js";

export type Fetcher = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export interface ViewQuery {
  filters?: string[];
  showStars?: boolean;
  highlight?: number[];
}

async function decode<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetcher: Fetcher = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    return decode<T>(await this.fetcher(this.base + path));
  }

  private async send<T>(method: string, path: string, body?: unknown): Promise<T> {
    return decode<T>(
      await this.fetcher(this.base + path, {
        method,
        headers: { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      }),
    );
  }

  view(kind: ViewKind, query: ViewQuery = {}): Promise<ViewDocument> {
    const params = new URLSearchParams({ kind });
    for (const glob of query.filters ?? []) params.append("filter", glob);
    if (query.showStars) params.set("show_stars", "true");
    for (const id of query.highlight ?? []) params.append("highlight", String(id));
    return this.get(`/view?${params.toString()}`);
  }

  lint(): Promise<{ findings: Finding[] }> {
    return this.get("/lint");
  }

  simStatus(): Promise<{ initialized: boolean; pending?: number }> {
    return this.get("/sim");
  }

  simInit(seed = 0): Promise<{ pending: number; clock: number }> {
    return this.send("POST", "/sim/init", { seed });
  }

  simStep(): Promise<{ events: TraceEvent[]; done: boolean }> {
    return this.send("POST", "/sim/step");
  }

  simRun(until?: number): Promise<{ events: TraceEvent[]; done: boolean }> {
    return this.send("POST", "/sim/run", until === undefined ? {} : { until });
  }

  inject(event: Record<string, unknown>, atTime?: number): Promise<{ pending: number }> {
    const body: Record<string, unknown> = { event };
    if (atTime !== undefined) body.at_time = atTime;
    return this.send("POST", "/sim/inject", body);
  }

  addElement(payload: Record<string, unknown>): Promise<{ id: number; findings: Finding[] }> {
    return this.send("POST", "/model/elements", payload);
  }

  deleteElement(id: number): Promise<{ findings: Finding[] }> {
    return this.send("DELETE", `/model/elements/${id}`);
  }

  /** Live trace subscription; returns a disposer. Browser-only (EventSource). */
  openEvents(onEvent: (event: TraceEvent) => void, after = -1): () => void {
    const source = new EventSource(`${this.base}/events?after=${after}`);
    source.onmessage = (message) => onEvent(JSON.parse(message.data) as TraceEvent);
    return () => source.close();
  }
}
