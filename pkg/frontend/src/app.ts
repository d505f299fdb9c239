/** Browser bootstrap: toolbar, canvas, event log and inspector wiring. */

import { ApiClient } from "./api.js";
import { StudioController } from "./controller.js";
import { render } from "./render.js";
import { linksOf, placementsOf, type StudioState } from "./state.js";
import type { ViewKind } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

export function mount(base = ""): StudioController {
  const client = new ApiClient(base);
  const canvas = el<HTMLDivElement>("canvas");
  const banner = el<HTMLDivElement>("banner");
  const log = el<HTMLPreElement>("event-log");
  const inspector = el<HTMLDivElement>("inspector");
  const findings = el<HTMLDivElement>("findings");
  const status = el<HTMLSpanElement>("sim-status");
  const stepButton = el<HTMLButtonElement>("sim-step");
  const runButton = el<HTMLButtonElement>("sim-run");
  const initButton = el<HTMLButtonElement>("sim-init");

  let closeStream: (() => void) | null = null;

  const controller = new StudioController(client, (state) => draw(state));

  function describeSelection(state: StudioState): string {
    if (state.selected === null) return "<em>nothing selected</em>";
    const id = state.selected;
    const element =
      state.view?.elements.find((candidate) => candidate.id === id) ??
      state.view?.edges.find((candidate) => candidate.id === id);
    const star = state.stars.get(id);
    const lines: string[] = [];
    if (element && "name" in element) {
      lines.push(`<b>${element.name}</b> · ${element.kind} · #${id}`);
      const spots = placementsOf(state, id);
      if (spots.length) lines.push(`placements: circles ${spots.join(", ")}`);
      const links = linksOf(state, id);
      if (links.length) lines.push(`links: ${links.map((link) => `#${link.id}`).join(", ")}`);
    } else if (star) {
      lines.push(`<b>${star.name}</b> · star #${id} in circle ${star.circle}`);
      lines.push(`identity placements: circles ${placementsOf(state, star.identity).join(", ")}`);
      const links = linksOf(state, star.identity);
      if (links.length) lines.push(`links: ${links.map((link) => `#${link.id}`).join(", ")}`);
    } else {
      lines.push(`element #${id}`);
    }
    return lines.join("<br>");
  }

  function draw(state: StudioState): void {
    canvas.innerHTML = render(state);
    banner.textContent = state.banner ?? "";
    banner.style.display = state.banner ? "block" : "none";
    const enabled = controller.simEnabled();
    initButton.disabled = !enabled;
    stepButton.disabled = !enabled || state.simPhase !== "ready";
    runButton.disabled = !enabled || state.simPhase !== "ready";
    status.textContent =
      state.simPhase === "idle"
        ? "idle"
        : state.simPhase === "done"
          ? `run complete (${state.stepCount} steps)`
          : `step ${state.stepCount}`;
    findings.innerHTML = state.findings.length
      ? state.findings
          .map(
            (finding) =>
              `<div class="finding ${finding.severity}">${finding.rule} ` +
              `#${finding.subject}: ${finding.message}</div>`,
          )
          .join("")
      : "<em>model lints clean</em>";
    log.textContent = state.eventLog
      .slice(-30)
      .map((event) => `${event.time.toFixed(1)} ${event.kind} ${JSON.stringify(event)}`)
      .join("\n");
    inspector.innerHTML = describeSelection(state);
  }

  canvas.addEventListener("click", (pointer) => {
    const target = (pointer.target as Element).closest("[data-id]");
    controller.select(target ? Number(target.getAttribute("data-id")) : null);
  });

  for (const kind of ["object", "process", "merged"] as ViewKind[]) {
    el<HTMLButtonElement>(`view-${kind}`).addEventListener("click", () => {
      void controller.setViewKind(kind); // GET only; no page reload
    });
  }
  el<HTMLInputElement>("filter").addEventListener("change", (input) => {
    void controller.setFilter((input.target as HTMLInputElement).value);
  });
  el<HTMLInputElement>("show-stars").addEventListener("change", (input) => {
    void controller.setShowStars((input.target as HTMLInputElement).checked);
  });
  initButton.addEventListener("click", () => {
    void (async () => {
      const seed = Number(el<HTMLInputElement>("seed").value || "0");
      if (await controller.simInit(seed)) {
        closeStream?.();
        closeStream = client.openEvents((event) => controller.onLiveEvent(event));
      }
    })();
  });
  stepButton.addEventListener("click", () => void controller.step());
  runButton.addEventListener("click", () => void controller.runAll());

  void (async () => {
    await controller.refreshLint();
    await controller.loadView();
  })();
  return controller;
}

declare global {
  interface Window {
    topoflowStudio?: StudioController;
  }
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  // point at a remote API with ?api=http://host:port (defaults to same origin)
  const base = new URLSearchParams(window.location.search).get("api") ?? "";
  window.topoflowStudio = mount(base);
}
