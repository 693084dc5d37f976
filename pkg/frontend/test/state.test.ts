import { describe, expect, it } from "vitest";

import {
  applyResponse,
  canCommit,
  initialState,
  nodeVisual,
  treeEdges,
  type ViewState,
} from "../src/state";
import type { ResponsePayload } from "../src/types";
import { featureModelResponse, transcript } from "./helpers";

function loaded(): ViewState {
  return applyResponse(initialState(), featureModelResponse());
}

describe("feature model projection", () => {
  it("indexes nodes, edges, active set and globals", () => {
    const state = loaded();
    expect(state.loaded).toBe(true);
    expect(Object.keys(state.nodes)).toHaveLength(21);
    expect(state.dependencies).toHaveLength(27);
    expect([...state.active]).toEqual(["root"]);
    expect(state.globals.Task).toBe("Task");
    expect(treeEdges(state)).toContainEqual(["visit", "visit:postorder"]);
  });

  it("maps node kinds and activation onto visual states", () => {
    const state = loaded();
    expect(nodeVisual(state, "root")).toBe("root");
    expect(nodeVisual(state, "visit")).toBe("inactive"); // abstract, not active
    expect(nodeVisual(state, "visit:postorder")).toBe("greyed-unselected");
    const active = applyResponse(state, {
      method: "activate",
      ok: true,
      active: ["root", "visit", "visit:postorder"],
    });
    expect(nodeVisual(active, "visit:postorder")).toBe("active");
    expect(nodeVisual(active, "visit")).toBe("abstract");
  });
});

describe("validation projection", () => {
  it("flags only features named by the server verdict", () => {
    const exchanges = transcript("configure");
    let state = initialState();
    for (const [request, response] of exchanges.slice(0, 5)) {
      state = applyResponse(state, response, request);
    }
    expect(state.verdict).toBe("invalid");
    expect(state.fresh).toBe(true);
    expect(nodeVisual(state, "rot.Backup.eval")).toBe("flagged-invalid");
    expect(nodeVisual(state, "rot.Backup")).toBe("active");
    expect(state.suggestions[0]?.feature).toBe("rot.FileOpEndemic.impl");
    expect(canCommit(state)).toBe(false);
  });

  it("clears the flag once the verdict turns valid", () => {
    const exchanges = transcript("configure");
    let state = initialState();
    for (const [request, response] of exchanges) {
      state = applyResponse(state, response, request);
    }
    expect(state.verdict).toBe("valid");
    expect(nodeVisual(state, "rot.Backup.eval")).toBe("active");
    expect(canCommit(state)).toBe(true);
  });

  it("marks the verdict stale on every mutation", () => {
    let state = loaded();
    state = applyResponse(state, {
      method: "validate",
      ok: true,
      valid: true,
      problems: {},
      suggestions: [],
    });
    expect(canCommit(state)).toBe(true);
    state = applyResponse(state, { method: "activate", ok: true, active: ["root", "rot.Main"] });
    expect(state.fresh).toBe(false);
    expect(canCommit(state)).toBe(false);
  });
});

describe("attribute edits", () => {
  it("applies the edge delta and the request's new value", () => {
    let state = loaded();
    const before = state.dependencies.length;
    const moved = state.dependencies[0];
    const request = { method: "updateAttribute", feature: null, attribute: "Task", value: "Job" };
    const response: ResponsePayload = {
      method: "updateAttribute",
      ok: true,
      added: [],
      removed: [moved],
    };
    state = applyResponse(state, response, request);
    expect(state.dependencies).toHaveLength(before - 1);
    expect(state.globals.Task).toBe("Job");

    const local = {
      method: "updateAttribute",
      feature: "rot.Backup.eval",
      attribute: "priority",
      value: "10",
    };
    state = applyResponse(
      state,
      { method: "updateAttribute", ok: true, added: [moved], removed: [] },
      local,
    );
    expect(state.dependencies).toHaveLength(before);
    expect(state.nodes["rot.Backup.eval"].attributes.priority).toBe("10");
  });
});

describe("errors", () => {
  it("shows a banner and leaves everything else untouched", () => {
    const state = loaded();
    const bad = applyResponse(state, {
      method: "commit",
      ok: false,
      error: "NotValidated",
      message: "no fresh verdict",
    });
    expect(bad.banner).toContain("NotValidated");
    expect(bad.nodes).toEqual(state.nodes);
    expect(bad.verdict).toBe(state.verdict);
  });
});

describe("replayability", () => {
  it("an exchange transcript always projects to the same view state", () => {
    for (const name of ["load", "configure", "commit"]) {
      const run = () => {
        let state = initialState();
        for (const [request, response] of transcript(name)) {
          state = applyResponse(state, response, request);
        }
        return state;
      };
      const first = run();
      const second = run();
      expect(second).toEqual(first);
    }
  });
});
