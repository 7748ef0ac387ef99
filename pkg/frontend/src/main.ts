/**
 * Application wiring: corpus upload, gesture toolbar, query loop,
 * recommendation panel, result views and the projection overview.
 * One in-flight request per panel; stale responses are discarded.
 */

import { ApiClient, ApiError, LatestGate } from "./api.js";
import { RecommendationDoc } from "./ast.js";
import { EditorError, EditorGraph, lint } from "./editor.js";
import { CorpusNode, treeMetrics } from "./layout.js";
import {
  renderEditor, renderProjection, renderRecommendations, renderResultTree,
  renderThumbnails, toast,
} from "./render.js";
import { ViewState } from "./state.js";

const api = new ApiClient("", (url, init) => fetch(url, init));
const editor = new EditorGraph();
const state = new ViewState();
const queryGate = new LatestGate();
const recommendGate = new LatestGate();
const projectionGate = new LatestGate();

let corpusRoots: CorpusNode[] = [];
let corpusTreeIds: string[] = [];
let attributes: Record<string, { kind: "numeric" | "categorical" }> = {};
let selectedVisual: string | null = null;
let recommendations: RecommendationDoc[] = [];

const el = (id: string) => document.getElementById(id) as HTMLElement;

function refreshEditor(): void {
  renderEditor(editor, el("editor-canvas"), selectedVisual, (id) => {
    selectedVisual = id;
    refreshEditor();
  });
  const doc = editor.toAstOrNull();
  (el("run-query") as HTMLButtonElement).disabled = doc === null || !state.snapshotId;
  const badgeBox = el("badges");
  badgeBox.textContent = "";
  if (doc) {
    for (const badge of lint(doc, attributes)) {
      const span = document.createElement("span");
      span.className = "badge";
      span.textContent = `${badge.elem}: ${badge.message}`;
      badgeBox.appendChild(span);
    }
  }
}

function refreshResults(): void {
  const rootsByTree = new Map<string, CorpusNode>();
  corpusTreeIds.forEach((treeId, i) => rootsByTree.set(treeId, corpusRoots[i]));
  renderThumbnails(state, rootsByTree, el("thumbnails"), (treeId) => {
    state.select(treeId);
    refreshResults();
  });
  const detail = el("tree-view");
  const selection = state.selection;
  if (selection) {
    const root = rootsByTree.get(selection.treeId);
    if (root) renderResultTree(root, state, detail, () => undefined);
  } else {
    detail.textContent = "";
  }
  el("match-count").textContent = state.lastReport
    ? `${state.lastReport.matched.length} matched trees`
    : "";
  el("canonical-expr").textContent = state.lastReport?.expr ?? "";
  refreshProjection();
}

function refreshProjection(): void {
  renderProjection(state, el("projection"), (keys) => {
    state.brush(keys);
    refreshResults();
  });
}

async function runQuery(): Promise<void> {
  const doc = editor.toAst();
  if (doc === null || !state.snapshotId) return;
  try {
    const report = await queryGate.run(() => api.query(state.snapshotId!, doc));
    if (report === null) return;
    state.setReport(doc, report);
    if (report.matched.length > 0) state.select(report.matched[0]);
    refreshResults();
    void runRecommend();
  } catch (err) {
    if (err instanceof ApiError) toast(String((err.payload as any)?.message ?? err));
    else throw err;
  }
}

async function runRecommend(): Promise<void> {
  const doc = editor.toAst();
  if (doc === null || !state.snapshotId) return;
  const recs = await recommendGate.run(() => api.recommend(state.snapshotId!, doc, 10));
  if (recs === null) return;
  recommendations = recs;
  renderRecommendations(recommendations, el("recommendations"), (rec) => {
    const applied = state.applyRecommendation(rec, editor);
    selectedVisual = null;
    refreshEditor();
    void (async () => {
      if (!state.snapshotId) return;
      const report = await queryGate.run(() => api.query(state.snapshotId!, applied));
      if (report === null) return;
      state.setReport(applied, report);
      if (report.matched.length > 0) state.select(report.matched[0]);
      refreshResults();
    })();
  });
}

async function uploadCorpus(file: File): Promise<void> {
  const text = await file.text();
  try {
    const parsed = JSON.parse(text) as { trees: { tree_id: string; root: CorpusNode }[] };
    const { snapshot_id, stats } = await api.uploadCorpus(text);
    state.snapshotId = snapshot_id;
    corpusRoots = parsed.trees.map((t) => t.root);
    corpusTreeIds = parsed.trees.map((t) => t.tree_id);
    state.treeMetrics = new Map(
      parsed.trees.map((t) => [t.tree_id, treeMetrics(t.root)]));
    attributes = Object.fromEntries(
      Object.entries(stats.attributes).map(([name, a]) => [name, { kind: a.kind }]));
    el("corpus-info").textContent =
      `${stats.trees} trees, ${stats.nodes} nodes (snapshot ${snapshot_id})`;
    const points = await projectionGate.run(
      () => api.projection(snapshot_id, "tsne", 0));
    if (points !== null) state.projection = points;
    state.clearReport();
    refreshEditor();
    refreshResults();
  } catch (err) {
    if (err instanceof ApiError) toast(String((err.payload as any)?.message ?? err));
    else toast(String(err));
  }
}

function toolbar(): void {
  el("add-node").addEventListener("click", () => {
    selectedVisual = editor.addNode("custom");
    refreshEditor();
  });
  el("add-wildcard").addEventListener("click", () => {
    selectedVisual = editor.addNode("wildcard");
    refreshEditor();
  });
  el("add-predicate").addEventListener("click", () => {
    if (!selectedVisual) return;
    const attr = (el("pred-attr") as HTMLInputElement).value.trim();
    const op = (el("pred-op") as HTMLSelectElement).value as
      "gt" | "ge" | "lt" | "le" | "eq" | "in";
    const raw = (el("pred-value") as HTMLInputElement).value.trim();
    try {
      if (op === "in") {
        editor.addPredicate(selectedVisual, attr, op,
                            { kind: "list", values: raw.split(",").map((s) => s.trim()) });
      } else if (raw !== "" && !Number.isNaN(Number(raw))) {
        editor.addPredicate(selectedVisual, attr, op, { kind: "number", value: Number(raw) });
      } else {
        editor.addPredicate(selectedVisual, attr, op, { kind: "text", value: raw });
      }
      refreshEditor();
    } catch (err) {
      if (err instanceof EditorError) toast(err.message);
    }
  });
  el("connect-child").addEventListener("click", () => {
    if (!selectedVisual) return;
    try {
      const child = editor.addNode("custom");
      editor.connect(selectedVisual, child);
      selectedVisual = child;
      refreshEditor();
    } catch (err) {
      if (err instanceof EditorError) toast(err.message);
    }
  });
  el("add-arm").addEventListener("click", () => {
    if (!selectedVisual) return;
    try {
      const head = editor.addNode("custom");
      editor.addArm(selectedVisual, head, { min: 1, max: null });
      selectedVisual = head;
      refreshEditor();
    } catch (err) {
      if (err instanceof EditorError) toast(err.message);
    }
  });
  el("set-rep").addEventListener("click", () => {
    if (!selectedVisual) return;
    const min = Number((el("rep-min") as HTMLInputElement).value || "1");
    const rawMax = (el("rep-max") as HTMLInputElement).value.trim();
    try {
      editor.setRepetition(selectedVisual, min, rawMax === "" ? null : Number(rawMax));
      refreshEditor();
    } catch (err) {
      if (err instanceof EditorError) toast(err.message);
    }
  });
  el("add-ec").addEventListener("click", () => {
    const quant = (el("ec-quant") as HTMLSelectElement).value as "exists" | "forall";
    try {
      const head = editor.addNode("custom");
      editor.addEcClause(quant, head, { min: 1, max: null });
      selectedVisual = head;
      refreshEditor();
    } catch (err) {
      if (err instanceof EditorError) toast(err.message);
    }
  });
  el("clear-editor").addEventListener("click", () => {
    editor.clear();
    selectedVisual = null;
    refreshEditor();
  });
  el("run-query").addEventListener("click", () => void runQuery());
  el("clear-brush").addEventListener("click", () => {
    state.clearBrush();
    refreshResults();
  });
  for (const metric of ["size", "height", "width"] as const) {
    const apply = () => {
      const lo = Number((el(`${metric}-lo`) as HTMLInputElement).value);
      const hi = Number((el(`${metric}-hi`) as HTMLInputElement).value);
      state.setOverviewFilter(
        metric,
        Number.isFinite(lo) && Number.isFinite(hi) && (lo > 0 || hi < 9999)
          ? { lo, hi } : null);
      refreshProjection();
    };
    el(`${metric}-lo`).addEventListener("change", apply);
    el(`${metric}-hi`).addEventListener("change", apply);
  }
  (el("corpus-file") as HTMLInputElement).addEventListener("change", (ev) => {
    const input = ev.target as HTMLInputElement;
    if (input.files && input.files[0]) void uploadCorpus(input.files[0]);
  });
}

if (typeof document !== "undefined" && document.getElementById("editor-canvas")) {
  toolbar();
  refreshEditor();
}
