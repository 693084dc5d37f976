import { describe, expect, it } from "vitest";

import { layoutTree } from "../src/layout";
import { renderAttributeEditor, renderPanel, renderSvg } from "../src/render";
import { applyResponse, initialState } from "../src/state";
import { featureModelResponse, transcript } from "./helpers";

function invalidState() {
  let state = initialState();
  for (const [request, response] of transcript("configure").slice(0, 5)) {
    state = applyResponse(state, response, request);
  }
  return state;
}

describe("layout", () => {
  it("centers a parent over its children and is deterministic", () => {
    const nodes = featureModelResponse();
    if (nodes.ok !== true || nodes.method !== "featureModel") throw new Error("bad fixture");
    const layout = layoutTree(nodes.nodes);
    const again = layoutTree([...nodes.nodes].reverse());
    expect(again.positions).toEqual(layout.positions);

    const visit = layout.positions.get("visit")!;
    const kids = ["visit:interleaved", "visit:postorder", "visit:preorder"].map(
      (k) => layout.positions.get(k)!,
    );
    const xs = kids.map((p) => p.x);
    expect(visit.x).toBeCloseTo((Math.min(...xs) + Math.max(...xs)) / 2);
    for (const kid of kids) expect(kid.y).toBeGreaterThan(visit.y);
  });
});

describe("svg rendering", () => {
  it("draws every node and both edge families", () => {
    const state = applyResponse(initialState(), featureModelResponse());
    const svg = renderSvg(state);
    expect(svg.match(/class="node /g)).toHaveLength(21);
    expect(svg.match(/class="tree-edge"/g)).toHaveLength(20);
    expect(svg.match(/class="dep dep-/g)).toHaveLength(27);
    expect(svg).toContain('data-node="rot.Backup"');
    expect(svg).toContain("dep-one");
    expect(svg).toContain("<title>"); // atom tooltips
  });

  it("styles greyed, active and flagged nodes differently", () => {
    const state = invalidState();
    const svg = renderSvg(state);
    expect(svg).toContain('class="node flagged-invalid" data-node="rot.Backup.eval"');
    expect(svg).toContain('class="node active" data-node="rot.Backup"');
    expect(svg).toContain('class="node greyed-unselected" data-node="visit:preorder"');
  });

  it("escapes markup in names", () => {
    const state = applyResponse(initialState(), {
      method: "featureModel",
      ok: true,
      nodes: [
        { name: "root", kind: "root", parent: null, tags: [], attributes: {}, unsatisfiable: [] },
        {
          name: "<evil>",
          kind: "concrete",
          parent: "root",
          tags: [],
          attributes: {},
          unsatisfiable: [],
        },
      ],
      dependencies: [],
      globals: {},
      active: ["root"],
    });
    const svg = renderSvg(state);
    expect(svg).not.toContain("<evil>");
    expect(svg).toContain("&lt;evil&gt;");
  });
});

describe("panel rendering", () => {
  it("is red with clickable suggestion chips while invalid", () => {
    const html = renderPanel(invalidState());
    expect(html).toContain('class="verdict red"');
    expect(html).toContain('data-suggestion="0"');
    expect(html).toContain("rot.FileOpEndemic.impl");
    expect(html).toContain("disabled>commit");
  });

  it("turns green and enables commit after a valid verdict", () => {
    let state = initialState();
    for (const [request, response] of transcript("configure")) {
      state = applyResponse(state, response, request);
    }
    const html = renderPanel(state);
    expect(html).toContain('class="verdict green"');
    expect(html).not.toContain("data-suggestion");
    expect(html).not.toContain("disabled>commit");
  });

  it("is neutral with commit disabled when the verdict is stale", () => {
    let state = initialState();
    for (const [request, response] of transcript("configure")) {
      state = applyResponse(state, response, request);
    }
    state = applyResponse(state, { method: "activate", ok: true, active: ["root"] });
    const html = renderPanel(state);
    expect(html).toContain('class="verdict neutral"');
    expect(html).toContain("disabled>commit");
  });
});

describe("attribute editor", () => {
  it("lists feature variables and the global table", () => {
    const state = applyResponse(initialState(), featureModelResponse());
    const html = renderAttributeEditor(state);
    expect(html).toContain('data-feature="rot.Backup.eval" data-attribute="priority"');
    expect(html).toContain('data-global="Task"');
  });
});
