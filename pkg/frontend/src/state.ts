/** Studio state and reducers.
 *
 * The cardinal rule: nothing is rendered that the server did not send.
 * Stars and links shown as simulation overlay come either from the last
 * fetched view payload or from trace events, never from guesses; events are
 * applied at most once (deduplicated by sequence number).
 */

import type { Finding, TraceEvent, ViewDocument, ViewKind } from "./types.js";

export interface OverlayStar {
  id: number;
  identity: number;
  circle: number;
  name: string;
}

export interface OverlayLink {
  id: number;
  parent?: number;
  a: number;
  b: number;
}

export type SimPhase = "idle" | "ready" | "done";

export interface StudioState {
  viewKind: ViewKind;
  filterText: string;
  showStars: boolean;
  view: ViewDocument | null;
  findings: Finding[];
  simPhase: SimPhase;
  stepCount: number;
  lastSeq: number;
  highlight: number | null;
  stars: Map<number, OverlayStar>;
  links: Map<number, OverlayLink>;
  eventLog: TraceEvent[];
  selected: number | null;
  banner: string | null;
}

export const EVENT_LOG_LIMIT = 200;

export function initialState(): StudioState {
  return {
    viewKind: "merged",
    filterText: "",
    showStars: false,
    view: null,
    findings: [],
    simPhase: "idle",
    stepCount: 0,
    lastSeq: -1,
    highlight: null,
    stars: new Map(),
    links: new Map(),
    eventLog: [],
    selected: null,
    banner: null,
  };
}

/** Replace the rendered view with a fresh payload; overlay reseeds from it. */
export function applyView(state: StudioState, doc: ViewDocument): void {
  state.view = doc;
  state.banner = null;
  state.stars = new Map(
    (doc.sim?.stars ?? []).map((star) => [
      star.id,
      { id: star.id, identity: star.identity, circle: star.circle, name: star.name },
    ]),
  );
  state.links = new Map(
    doc.edges
      .filter((edge) => edge.kind === "instance_link")
      .map((edge) => [edge.id, { id: edge.id, parent: edge.parent, a: edge.from, b: edge.to }]),
  );
  const present = new Set<number>();
  for (const element of doc.elements) present.add(element.id);
  for (const edge of doc.edges) present.add(edge.id);
  for (const star of state.stars.keys()) present.add(star);
  if (state.selected !== null && !present.has(state.selected)) state.selected = null;
  if (state.highlight !== null && !present.has(state.highlight)) state.highlight = null;
}

/** Fold one trace event into the overlay. Returns false for duplicates. */
export function applyEvent(state: StudioState, event: TraceEvent): boolean {
  if (event.seq <= state.lastSeq) return false;
  state.lastSeq = event.seq;
  state.eventLog.push(event);
  if (state.eventLog.length > EVENT_LOG_LIMIT) {
    state.eventLog.splice(0, state.eventLog.length - EVENT_LOG_LIMIT);
  }
  switch (event.kind) {
    case "star_created":
      state.stars.set(event.star!, {
        id: event.star!,
        identity: event.identity!,
        circle: event.circle!,
        name: `#${event.identity}`,
      });
      break;
    case "star_destroyed": {
      state.stars.delete(event.star!);
      for (const [id, link] of [...state.links]) {
        if (link.a === event.star || link.b === event.star) state.links.delete(id);
      }
      break;
    }
    case "link_created":
      state.links.set(event.relation!, {
        id: event.relation!,
        parent: event.parent,
        a: event.a!,
        b: event.b!,
      });
      break;
    case "token_entered":
    case "token_finished":
      state.highlight = event.node ?? null;
      break;
    default:
      break; // logged above; no overlay effect
  }
  return true;
}

export function lintBlocksSimulation(findings: Finding[]): boolean {
  return findings.some((finding) => finding.severity === "error");
}

/** Placements of an identity, read purely from confirmed overlay state. */
export function placementsOf(state: StudioState, identity: number): number[] {
  return [...state.stars.values()]
    .filter((star) => star.identity === identity)
    .map((star) => star.circle)
    .sort((a, b) => a - b);
}

/** Links touching any star of an identity, for the inspector panel. */
export function linksOf(state: StudioState, identity: number): OverlayLink[] {
  const stars = new Set(
    [...state.stars.values()]
      .filter((star) => star.identity === identity)
      .map((star) => star.id),
  );
  return [...state.links.values()].filter((link) => stars.has(link.a) || stars.has(link.b));
}
