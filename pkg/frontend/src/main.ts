/** Browser entry point: binds the controller to the page. Everything here
 * is thin DOM glue; the logic lives in app/state/render and is covered by
 * the test suite.
 */

import { App } from "./app.js";
import { RpcClient } from "./client.js";
import { renderAttributeEditor, renderPanel, renderSvg } from "./render.js";
import type { ViewState } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing #${id}`);
  return element as T;
}

const graph = byId<HTMLDivElement>("graph");
const panel = byId<HTMLDivElement>("panel");
const editor = byId<HTMLDivElement>("editor");
const serverInput = byId<HTMLInputElement>("server-url");
const fileInput = byId<HTMLInputElement>("features-file");
const connectButton = byId<HTMLButtonElement>("connect");

let app = makeApp();

function makeApp(): App {
  const client = new RpcClient(serverInput.value.replace(/\/$/, ""));
  return new App(client, render);
}

function render(state: ViewState): void {
  graph.innerHTML = state.loaded ? renderSvg(state) : '<p class="hint">load a features file or connect</p>';
  panel.innerHTML = renderPanel(state);
  editor.innerHTML = state.loaded ? renderAttributeEditor(state) : "";
}

connectButton.addEventListener("click", () => {
  app = makeApp();
  void app.refreshModel();
});

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  app = makeApp();
  await app.loadFromText(await file.text());
});

graph.addEventListener("click", (event) => {
  const target = (event.target as Element).closest("[data-node]");
  if (!target) return;
  const name = target.getAttribute("data-node");
  const state = app.state;
  if (name && state.nodes[name] && state.nodes[name].kind !== "root") {
    void app.toggle(name);
  }
});

panel.addEventListener("click", (event) => {
  const element = event.target as Element;
  const chip = element.closest("[data-suggestion]");
  if (chip) {
    void app.applySuggestion(Number(chip.getAttribute("data-suggestion")));
    return;
  }
  const action = element.closest("[data-action]")?.getAttribute("data-action");
  if (action === "validate") void app.validate();
  if (action === "commit") void app.commit();
});

editor.addEventListener("change", (event) => {
  const input = event.target as HTMLInputElement;
  const attribute = input.getAttribute("data-attribute");
  const feature = input.getAttribute("data-feature");
  const global = input.getAttribute("data-global");
  if (attribute && feature) {
    void app.editAttribute(feature, attribute, input.value);
  } else if (global) {
    void app.editAttribute(null, global, input.value);
  }
});

render(app.state);
