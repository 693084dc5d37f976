/** Tidy-ish tree layout: leaves get successive horizontal slots, every
 * inner node sits centered above its children. Deterministic (children
 * visited in name order).
 */

import type { NodePayload } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export interface Layout {
  positions: Map<string, Point>;
  width: number;
  height: number;
}

const X_STEP = 130;
const Y_STEP = 90;
const MARGIN = 60;

export function layoutTree(nodes: NodePayload[]): Layout {
  const children = new Map<string, string[]>();
  let root: string | null = null;
  for (const node of nodes) {
    if (node.parent === null) {
      root = node.name;
    } else {
      const siblings = children.get(node.parent) ?? [];
      siblings.push(node.name);
      children.set(node.parent, siblings);
    }
  }
  const positions = new Map<string, Point>();
  let slot = 0;
  let depthMax = 0;

  const place = (name: string, depth: number): number => {
    depthMax = Math.max(depthMax, depth);
    const kids = (children.get(name) ?? []).sort();
    let x: number;
    if (kids.length === 0) {
      x = MARGIN + slot * X_STEP;
      slot += 1;
    } else {
      const xs = kids.map((kid) => place(kid, depth + 1));
      x = (Math.min(...xs) + Math.max(...xs)) / 2;
    }
    positions.set(name, { x, y: MARGIN + depth * Y_STEP });
    return x;
  };

  if (root !== null) {
    place(root, 0);
  }
  return {
    positions,
    width: MARGIN * 2 + Math.max(slot - 1, 0) * X_STEP,
    height: MARGIN * 2 + depthMax * Y_STEP,
  };
}
