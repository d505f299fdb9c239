/** Deterministic SVG rendering of a studio state.
 *
 * Pure string-in, string-out: the same state always renders the same markup,
 * every visible element appears exactly once, and each carries a data-id
 * attribute for hit testing.
 */

import type { StudioState } from "./state.js";
import type { ViewDocument, ViewEdge, ViewElement } from "./types.js";

const NODE_W = 150;
const NODE_H = 44;
const GAP_X = 190;
const ROW_H = 120;
const CIRCLE_RX = 55;
const CIRCLE_RY = 24;
const STAR = 12;

interface Point {
  x: number;
  y: number;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function label(text: string, limit = 20): string {
  return escapeXml(text.length > limit ? text.slice(0, limit - 1) + "…" : text);
}

const PROCESS_KINDS = new Set(["start", "final", "activity", "dot"]);

/** Grid layout: one row per process, then loose nodes, then loose circles. */
function layout(doc: ViewDocument): Map<number, Point> {
  const spots = new Map<number, Point>();
  const byProcess = new Map<number, ViewElement[]>();
  const loose: ViewElement[] = [];
  const circles: ViewElement[] = [];
  for (const element of doc.elements) {
    if (element.kind === "circle") circles.push(element);
    else if (PROCESS_KINDS.has(element.kind) && element.process !== undefined) {
      const row = byProcess.get(element.process) ?? [];
      row.push(element);
      byProcess.set(element.process, row);
    } else loose.push(element);
  }

  let y = 60;
  for (const process of [...byProcess.keys()].sort((a, b) => a - b)) {
    const row = byProcess.get(process)!;
    row.sort((a, b) => a.id - b.id);
    row.forEach((element, i) => spots.set(element.id, { x: 60 + i * GAP_X, y }));
    y += ROW_H;
  }
  loose.sort((a, b) => a.id - b.id);
  loose.forEach((element, i) =>
    spots.set(element.id, { x: 60 + (i % 6) * GAP_X, y: y + Math.floor(i / 6) * ROW_H }),
  );
  y += ROW_H * Math.max(1, Math.ceil(loose.length / 6));

  // circles sit under their owner when it is visible, else on their own rows
  const perOwner = new Map<number, number>();
  let strayIndex = 0;
  circles.sort((a, b) => a.id - b.id);
  for (const circle of circles) {
    const home = circle.owner !== undefined ? spots.get(circle.owner) : undefined;
    if (home) {
      const column = perOwner.get(circle.owner!) ?? 0;
      perOwner.set(circle.owner!, column + 1);
      spots.set(circle.id, { x: home.x + column * (CIRCLE_RX * 2 + 14), y: home.y + 74 });
    } else {
      spots.set(circle.id, {
        x: 60 + (strayIndex % 6) * GAP_X,
        y: y + Math.floor(strayIndex / 6) * 90,
      });
      strayIndex += 1;
    }
  }
  return spots;
}

function nodeMarkup(element: ViewElement, at: Point, highlighted: boolean): string {
  const cls = `node kind-${element.kind}` + (highlighted ? " highlighted" : "");
  if (element.kind === "dot") {
    const glyph =
      element.dot_kind === "gate"
        ? `<rect x="${at.x - 7}" y="${at.y - 7}" width="14" height="14" class="gate"/>`
        : element.dot_kind === "label"
          ? `<rect x="${at.x - 7}" y="${at.y - 7}" width="14" height="14" class="label-dot"/>`
          : `<circle cx="${at.x}" cy="${at.y}" r="8" class="dup-dot"/>`;
    return `<g data-id="${element.id}" class="${cls}">${glyph}<title>${escapeXml(element.name)}</title></g>`;
  }
  const rounded = PROCESS_KINDS.has(element.kind);
  const rx = rounded ? 12 : 2;
  return (
    `<g data-id="${element.id}" class="${cls}">` +
    `<rect x="${at.x - NODE_W / 2}" y="${at.y - NODE_H / 2}" width="${NODE_W}" height="${NODE_H}" rx="${rx}"/>` +
    `<text x="${at.x}" y="${at.y + 4}" text-anchor="middle">${label(element.name)}</text>` +
    `</g>`
  );
}

function circleMarkup(element: ViewElement, at: Point): string {
  return (
    `<g data-id="${element.id}" class="circle">` +
    `<ellipse cx="${at.x}" cy="${at.y}" rx="${CIRCLE_RX}" ry="${CIRCLE_RY}"/>` +
    `<text x="${at.x}" y="${at.y - CIRCLE_RY - 4}" text-anchor="middle">${label(element.name, 16)}</text>` +
    `</g>`
  );
}

function edgeMarkup(edge: ViewEdge, spots: Map<number, Point>, starSpots: Map<number, Point>): string {
  if (edge.kind === "instance_link") {
    const a = starSpots.get(edge.from);
    const b = starSpots.get(edge.to);
    if (!a || !b) return "";
    return `<line data-id="${edge.id}" class="edge instance-link" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>`;
  }
  const from = spots.get(edge.from);
  const to = spots.get(edge.to);
  if (!from || !to) return "";
  if (edge.kind === "arc") {
    const stops = [from, ...(edge.dots ?? []).map((d) => spots.get(d)).filter((p): p is Point => !!p), to];
    const points = stops.map((p) => `${p.x},${p.y}`).join(" ");
    return `<polyline data-id="${edge.id}" class="edge arc" points="${points}" marker-end="url(#arrow)"/>`;
  }
  const cls =
    edge.kind === "pilot" ? "edge pilot" : edge.kind === "flow_binding" ? "edge flow" : "edge association";
  const marker = edge.kind === "flow_binding" ? ' marker-end="url(#arrow)"' : "";
  const caption = edge.multiplicity
    ? `<text x="${(from.x + to.x) / 2}" y="${(from.y + to.y) / 2 - 4}" class="edge-label">${escapeXml(edge.multiplicity)}</text>`
    : "";
  return (
    `<g data-id="${edge.id}" class="${cls}"><line x1="${from.x}" y1="${from.y}" x2="${to.x}" y2="${to.y}"${marker}/>${caption}</g>`
  );
}

export function render(state: StudioState): string {
  const doc = state.view;
  if (!doc) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="640" height="160" class="studio-canvas">` +
      `<text x="20" y="40" class="hint">No view loaded. Pick a view kind to fetch one.</text></svg>`;
  }
  if (doc.elements.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="640" height="160" class="studio-canvas">` +
      `<text x="20" y="40" class="hint">The model is empty. Add elements through the API.</text></svg>`;
  }

  const spots = layout(doc);
  let maxX = 0;
  let maxY = 0;
  for (const point of spots.values()) {
    maxX = Math.max(maxX, point.x);
    maxY = Math.max(maxY, point.y);
  }

  // stars nest inside their circle; stars of circles outside the view (e.g.
  // place circles created mid-run) line up in a transit tray at the bottom
  const starSpots = new Map<number, Point>();
  const transit: number[] = [];
  const perCircle = new Map<number, number>();
  const trayY = maxY + 70;
  for (const star of [...state.stars.values()].sort((a, b) => a.id - b.id)) {
    const home = spots.get(star.circle);
    if (home) {
      const column = perCircle.get(star.circle) ?? 0;
      perCircle.set(star.circle, column + 1);
      starSpots.set(star.id, { x: home.x - CIRCLE_RX + 18 + column * (STAR + 6), y: home.y });
    } else {
      starSpots.set(star.id, { x: 100 + transit.length * (STAR + 10), y: trayY });
      transit.push(star.id);
    }
  }

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${maxX + 160}" height="${maxY + 110}" class="studio-canvas">`,
  );
  parts.push(
    `<defs><marker id="arrow" markerWidth="9" markerHeight="9" refX="8" refY="3" orient="auto">` +
      `<path d="M0,0 L9,3 L0,6 z"/></marker></defs>`,
  );
  for (const edge of doc.edges) parts.push(edgeMarkup(edge, spots, starSpots));
  for (const element of doc.elements) {
    const at = spots.get(element.id);
    if (!at) continue;
    if (element.kind === "circle") parts.push(circleMarkup(element, at));
    else parts.push(nodeMarkup(element, at, state.highlight === element.id));
  }
  if (transit.length > 0) {
    parts.push(`<text x="20" y="${trayY + 4}" class="hint">in transit:</text>`);
  }
  for (const star of [...state.stars.values()].sort((a, b) => a.id - b.id)) {
    const at = starSpots.get(star.id)!;
    const selected = state.selected === star.id ? " selected" : "";
    parts.push(
      `<g data-id="${star.id}" class="star${selected}">` +
        `<rect x="${at.x - STAR / 2}" y="${at.y - STAR / 2}" width="${STAR}" height="${STAR}"/>` +
        `<title>${escapeXml(star.name)} (circle ${star.circle})</title></g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
