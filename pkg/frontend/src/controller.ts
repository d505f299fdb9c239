/** Orchestrates API calls against the studio state.
 *
 * View switching is read-only (GET) and never reloads the page; simulation
 * controls stay disabled while lint reports errors; every overlay change is
 * backed by a server payload or trace event.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  applyEvent,
  applyView,
  initialState,
  lintBlocksSimulation,
  type StudioState,
} from "./state.js";
import type { TraceEvent, ViewKind } from "./types.js";

export class StudioController {
  readonly state: StudioState;

  constructor(
    private client: ApiClient,
    private notify: (state: StudioState) => void = () => {},
  ) {
    this.state = initialState();
  }

  private changed(): void {
    this.notify(this.state);
  }

  async loadView(): Promise<void> {
    const filters = this.state.filterText
      .split(",")
      .map((glob) => glob.trim())
      .filter((glob) => glob.length > 0);
    try {
      const doc = await this.client.view(this.state.viewKind, {
        filters,
        showStars: this.state.showStars,
        highlight: this.state.highlight !== null ? [this.state.highlight] : [],
      });
      applyView(this.state, doc);
    } catch (error) {
      this.state.banner =
        error instanceof ApiError && error.status === 409
          ? `view is stale: ${error.message}`
          : `fetch failed: ${String(error instanceof Error ? error.message : error)}`;
    }
    this.changed();
  }

  async refreshLint(): Promise<void> {
    try {
      this.state.findings = (await this.client.lint()).findings;
    } catch (error) {
      this.state.banner = `fetch failed: ${String(error instanceof Error ? error.message : error)}`;
    }
    this.changed();
  }

  async setViewKind(kind: ViewKind): Promise<void> {
    this.state.viewKind = kind;
    await this.loadView();
  }

  async setFilter(text: string): Promise<void> {
    this.state.filterText = text;
    await this.loadView();
  }

  async setShowStars(show: boolean): Promise<void> {
    this.state.showStars = show;
    await this.loadView();
  }

  simEnabled(): boolean {
    return !lintBlocksSimulation(this.state.findings);
  }

  async simInit(seed = 0): Promise<boolean> {
    if (!this.simEnabled()) {
      this.state.banner = "simulation disabled: the model lints with errors";
      this.changed();
      return false;
    }
    try {
      await this.client.simInit(seed);
    } catch (error) {
      this.state.banner = `init failed: ${String(error instanceof Error ? error.message : error)}`;
      this.changed();
      return false;
    }
    this.state.simPhase = "ready";
    this.state.stepCount = 0;
    this.state.lastSeq = -1;
    this.state.eventLog = [];
    this.state.highlight = null;
    await this.loadView(); // reseed the overlay from the fresh run's model
    return true;
  }

  /** One click, one dequeued event batch, one newly highlighted stage. */
  async step(): Promise<TraceEvent[] | null> {
    if (this.state.simPhase !== "ready") return null;
    let batch: { events: TraceEvent[]; done: boolean };
    try {
      batch = await this.client.simStep();
    } catch (error) {
      this.state.banner = `step failed: ${String(error instanceof Error ? error.message : error)}`;
      this.changed();
      return null;
    }
    for (const event of batch.events) applyEvent(this.state, event);
    this.state.stepCount += 1;
    if (batch.done) this.state.simPhase = "done";
    this.changed();
    return batch.events;
  }

  async runAll(until?: number): Promise<void> {
    if (this.state.simPhase !== "ready") return;
    const batch = await this.client.simRun(until);
    for (const event of batch.events) applyEvent(this.state, event);
    if (batch.done) this.state.simPhase = "done";
    this.changed();
  }

  async injectMovement(node: number, identity: number): Promise<void> {
    try {
      await this.client.inject({ kind: "token_entered", node, identity });
    } catch (error) {
      this.state.banner = `inject failed: ${String(error instanceof Error ? error.message : error)}`;
    }
    this.changed();
  }

  /** Live events from the stream; duplicates of step responses are dropped. */
  onLiveEvent(event: TraceEvent): void {
    if (applyEvent(this.state, event)) this.changed();
  }

  select(id: number | null): void {
    this.state.selected = id;
    this.changed();
  }
}
