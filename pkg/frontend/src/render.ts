/** DOM-free rendering: view state in, SVG/HTML strings out. The browser
 * entry point injects these strings and wires events by delegation.
 */

import { layoutTree, type Layout } from "./layout.js";
import {
  canCommit,
  concreteFeaturesWithAttributes,
  nodeVisual,
  treeEdges,
  type ViewState,
} from "./state.js";

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&apos;");
}

function nodeTooltip(state: ViewState, name: string): string {
  const node = state.nodes[name];
  const lines = [name];
  if (node.tags.length) lines.push(`tags: ${node.tags.join(", ")}`);
  for (const [attr, value] of Object.entries(node.attributes)) {
    lines.push(`${attr} = ${value}`);
  }
  for (const marker of node.unsatisfiable) {
    lines.push(`unsatisfiable ${marker.kind}: ${marker.atom}`);
  }
  return lines.join("\n");
}

export function renderSvg(state: ViewState, layout: Layout = layoutTree(Object.values(state.nodes))): string {
  const parts: string[] = [];
  const { positions, width, height } = layout;
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">`,
  );

  for (const [parent, child] of treeEdges(state)) {
    const from = positions.get(parent);
    const to = positions.get(child);
    if (!from || !to) continue;
    parts.push(
      `<line class="tree-edge" x1="${from.x}" y1="${from.y}" x2="${to.x}" y2="${to.y}"/>`,
    );
  }

  for (const edge of state.dependencies) {
    const from = positions.get(edge.from);
    const to = positions.get(edge.to);
    if (!from || !to) continue;
    const midX = (from.x + to.x) / 2;
    const midY = Math.min(from.y, to.y) - 36;
    const label = edge.group ? `${edge.kind} [${edge.group}] ${edge.atom}` : `${edge.kind} ${edge.atom}`;
    parts.push(
      `<path class="dep dep-${edge.kind}" data-from="${escapeXml(edge.from)}" data-to="${escapeXml(edge.to)}" ` +
        `d="M ${from.x} ${from.y} Q ${midX} ${midY} ${to.x} ${to.y}">` +
        `<title>${escapeXml(label)}</title></path>`,
    );
  }

  for (const name of Object.keys(state.nodes).sort()) {
    const point = positions.get(name);
    if (!point) continue;
    const visual = nodeVisual(state, name);
    const flagged = state.nodes[name].unsatisfiable.length > 0 ? " dead-end" : "";
    parts.push(
      `<g class="node ${visual}${flagged}" data-node="${escapeXml(name)}" transform="translate(${point.x},${point.y})">` +
        `<circle r="22"/>` +
        `<text y="38" text-anchor="middle">${escapeXml(shortLabel(name))}</text>` +
        `<title>${escapeXml(nodeTooltip(state, name))}</title></g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

function shortLabel(name: string): string {
  return name.length > 22 ? `…${name.slice(-21)}` : name;
}

export function renderPanel(state: ViewState): string {
  const parts: string[] = [];
  if (state.banner) {
    parts.push(`<div class="banner">${escapeXml(state.banner)}</div>`);
  }
  const tone = !state.fresh || state.verdict === "none" ? "neutral" : state.verdict === "valid" ? "green" : "red";
  const text =
    tone === "neutral"
      ? "not validated yet"
      : state.verdict === "valid"
        ? "configuration is valid"
        : "configuration is invalid";
  parts.push(`<div class="verdict ${tone}">${text}</div>`);

  if (state.fresh && state.verdict === "invalid") {
    const entries = Object.entries(state.problems);
    parts.push('<ul class="problems">');
    for (const [feature, kinds] of entries) {
      for (const [kind, byKey] of Object.entries(kinds)) {
        for (const key of Object.keys(byKey ?? {})) {
          parts.push(`<li>${escapeXml(feature)}: ${kind} ${escapeXml(key)}</li>`);
        }
      }
    }
    parts.push("</ul>");
    if (state.suggestions.length === 0) {
      parts.push('<div class="no-suggestions">no available suggestions</div>');
    }
  }
  state.suggestions.forEach((s, i) => {
    if (state.fresh && state.verdict === "invalid") {
      parts.push(
        `<button class="chip" data-suggestion="${i}">${s.action} ${escapeXml(s.feature)}</button>`,
      );
    }
  });

  parts.push(
    `<button class="do-validate" data-action="validate">validate</button>`,
    `<button class="do-commit" data-action="commit"${canCommit(state) ? "" : " disabled"}>commit</button>`,
  );
  if (state.committed) {
    parts.push(
      `<div class="committed">committed ${state.committed.active.length} active features</div>`,
    );
  }
  return parts.join("");
}

export function renderAttributeEditor(state: ViewState): string {
  const parts: string[] = ['<div class="attributes">'];
  for (const node of concreteFeaturesWithAttributes(state)) {
    parts.push(`<fieldset><legend>${escapeXml(node.name)}</legend>`);
    for (const [attr, value] of Object.entries(node.attributes).sort()) {
      parts.push(
        `<label>${escapeXml(attr)} <input data-feature="${escapeXml(node.name)}" ` +
          `data-attribute="${escapeXml(attr)}" value="${escapeXml(value)}"/></label>`,
      );
    }
    parts.push("</fieldset>");
  }
  parts.push('<fieldset><legend>globals</legend>');
  for (const [name, value] of Object.entries(state.globals).sort()) {
    parts.push(
      `<label>${escapeXml(name)} <input data-global="${escapeXml(name)}" value="${escapeXml(value)}"/></label>`,
    );
  }
  parts.push("</fieldset></div>");
  return parts.join("");
}
