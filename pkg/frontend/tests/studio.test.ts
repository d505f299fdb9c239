/** End-to-end studio flows against recorded API payloads. */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { StudioController } from "../src/controller.js";
import { render } from "../src/render.js";
import type { TraceEvent } from "../src/types.js";
import { FakeServer, fixture } from "./fakeServer.js";

let server: FakeServer;
let studio: StudioController;

beforeEach(() => {
  server = new FakeServer();
  studio = new StudioController(new ApiClient("", server.fetcher));
});

describe("loading", () => {
  it("loads the education model through the API", async () => {
    await studio.refreshLint();
    await studio.loadView();
    const names = studio.state.view!.elements.map((element) => element.name);
    expect(names).toContain("Form processing");
    expect(names).toContain("Evaluation");
    expect(studio.state.findings).toEqual([]);
  });

  it("shows a banner when the fetch fails and a stale warning on 409", async () => {
    server.staleViewsRemaining = 1;
    await studio.loadView();
    expect(studio.state.banner).toMatch(/stale/);
    await studio.loadView(); // recovers
    expect(studio.state.banner).toBeNull();
  });
});

describe("view toggling", () => {
  it("re-renders object/process/merged via GET only, no reload", async () => {
    await studio.loadView();
    const drawings = new Map<string, string>();
    for (const kind of ["object", "process", "merged"] as const) {
      await studio.setViewKind(kind);
      expect(studio.state.view!.view).toBe(kind);
      drawings.set(kind, render(studio.state));
    }
    expect(drawings.get("object")).not.toBe(drawings.get("process"));
    expect(drawings.get("merged")).not.toBe(drawings.get("object"));
    const viewCalls = server.calls.filter((call) => call.url.includes("/view"));
    expect(viewCalls.length).toBeGreaterThanOrEqual(4);
    expect(viewCalls.every((call) => call.method === "GET")).toBe(true);
    expect(server.calls.every((call) => call.method === "GET")).toBe(true);
  });

  it("process view hides the association web, merged shows it", async () => {
    await studio.setViewKind("process");
    const processEdges = studio.state.view!.edges.map((edge) => edge.kind);
    expect(processEdges).not.toContain("association");
    await studio.setViewKind("merged");
    expect(studio.state.view!.edges.map((edge) => edge.kind)).toContain("association");
  });
});

describe("simulation controls", () => {
  it("stays disabled while lint reports errors", async () => {
    server.brokenLint = true;
    await studio.refreshLint();
    expect(studio.simEnabled()).toBe(false);
    expect(studio.state.findings.length).toBeGreaterThan(0);
    expect(await studio.simInit(0)).toBe(false);
    expect(studio.state.banner).toMatch(/disabled/);
    expect(studio.state.simPhase).toBe("idle");
  });

  it("step advances exactly one highlighted stage per click, matching the trace", async () => {
    await studio.refreshLint();
    studio.state.showStars = true;
    expect(await studio.simInit(0)).toBe(true);

    const batches = fixture<TraceEvent[][]>("education_step_batches.json");
    const expectedStages = batches.map(
      (batch) => batch.filter((event) => event.kind === "token_entered").at(-1)!.node,
    );

    const visited: Array<number | null> = [];
    for (let click = 0; click < batches.length; click += 1) {
      const before = studio.state.highlight;
      const events = await studio.step();
      expect(events).not.toBeNull();
      expect(studio.state.highlight).not.toBe(before);
      visited.push(studio.state.highlight);
      expect(studio.state.stepCount).toBe(click + 1);
    }
    expect(visited).toEqual(expectedStages);
    expect(studio.state.simPhase).toBe("done");
    expect(await studio.step()).toBeNull(); // run complete: the button is inert
  });

  it("overlays a star only after its star_created event arrived", async () => {
    await studio.refreshLint();
    studio.state.showStars = true;
    await studio.simInit(0);

    const batches = fixture<TraceEvent[][]>("education_step_batches.json");
    const firstCreation = batches[0].find((event) => event.kind === "star_created")!;
    expect(studio.state.stars.has(firstCreation.star!)).toBe(false);
    expect(render(studio.state)).not.toContain(`data-id="${firstCreation.star}"`);

    await studio.step();
    expect(studio.state.stars.has(firstCreation.star!)).toBe(true);
    expect(render(studio.state)).toContain(`data-id="${firstCreation.star}"`);
  });

  it("live stream duplicates of step responses are ignored", async () => {
    await studio.refreshLint();
    await studio.simInit(0);
    const events = (await studio.step())!;
    const logged = studio.state.eventLog.length;
    for (const event of events) studio.onLiveEvent(event); // SSE echoes the same batch
    expect(studio.state.eventLog.length).toBe(logged);
  });

  it("runAll drains the queue and completes", async () => {
    await studio.refreshLint();
    await studio.simInit(0);
    await studio.runAll();
    expect(studio.state.simPhase).toBe("done");
    expect(studio.state.eventLog.length).toBe(
      fixture<TraceEvent[][]>("education_step_batches.json").flat().length,
    );
  });
});
