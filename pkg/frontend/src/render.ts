/**
 * SVG/DOM rendering for the four panels.  Pure views over ViewState and the
 * uploaded corpus document; every interaction is delegated back to main.ts
 * through callbacks, and no query semantics live here.
 */

import { RecommendationDoc } from "./ast.js";
import { EditorGraph, VisualNode } from "./editor.js";
import { CorpusNode, layoutTree } from "./layout.js";
import { ViewState, colorAssignment } from "./state.js";

const SVG = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
    tag: K, attrs: Record<string, string | number>): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, String(value));
  return el;
}

function repText(rep: { min: number; max: number | null }): string {
  if (rep.min === 1 && rep.max === 1) return "";
  if (rep.max === null) return `{${rep.min},}`;
  if (rep.max === rep.min) return `{${rep.min}}`;
  return `{${rep.min},${rep.max}}`;
}

function nodeLabel(node: VisualNode): string {
  const marks = { wildcard: "•", root: "^", leaf: "$" } as Record<string, string>;
  const base = node.kind === "custom"
    ? node.predicates.map((p) => `${p.attr} ${p.op} ${JSON.stringify(
        p.rhs.kind === "list" ? p.rhs.values :
        p.rhs.kind === "relative" ? `&${p.rhs.offset}` :
        p.rhs.kind === "absolute" ? `#${p.rhs.level}` : p.rhs.value)}`).join(", ")
    : marks[node.kind];
  return (node.negated ? "! " : "") + (base || "(empty)");
}

/** The visual editor canvas: one rectangle per pattern, edges for steps/arms. */
export function renderEditor(editor: EditorGraph, container: HTMLElement,
                             selected: string | null,
                             onSelect: (id: string) => void): void {
  container.textContent = "";
  const doc = editor.toAstOrNull();
  const colors = doc ? colorAssignment(doc) : new Map<string, string>();
  const list = document.createElement("div");
  list.className = "editor-nodes";
  for (const node of editor.allNodes()) {
    const box = document.createElement("div");
    box.className = "visual-node" + (node.id === selected ? " selected" : "");
    box.style.borderColor = colors.get(node.id) ?? "#888";
    box.dataset.elem = node.id;
    const title = document.createElement("div");
    title.className = "visual-node-title";
    title.textContent = `${node.id} ${nodeLabel(node)} ${repText(node.rep)}`;
    box.appendChild(title);
    const links: string[] = [];
    if (node.next) links.push(`child → ${node.next}`);
    node.arms.forEach((arm, i) =>
      links.push(`arm ${i} → ${arm.head} ${repText(arm.rep)}`));
    if (node.alt) links.push(`| ${node.alt}`);
    if (links.length) {
      const meta = document.createElement("div");
      meta.className = "visual-node-links";
      meta.textContent = links.join("   ");
      box.appendChild(meta);
    }
    box.addEventListener("click", () => onSelect(node.id));
    list.appendChild(box);
  }
  for (const chip of editor.allChips()) {
    const el = document.createElement("div");
    el.className = "ec-chip";
    el.textContent = `${chip.quantifier} <${chip.head}> ${repText(chip.occurrences)}`;
    list.appendChild(el);
  }
  container.appendChild(list);
}

/** Node-link view of one matched tree with element-to-node color binding. */
export function renderResultTree(root: CorpusNode, state: ViewState,
                                 container: HTMLElement,
                                 onNodeClick: (nodeId: string) => void): void {
  container.textContent = "";
  const placed = layoutTree(root);
  const byId = new Map(placed.map((p) => [p.id, p]));
  const colors = state.highlightColors();
  const width = Math.max(...placed.map((p) => p.x)) + 60;
  const height = Math.max(...placed.map((p) => p.y)) + 60;
  const svg = svgEl("svg", { width, height, viewBox: `-30 -20 ${width} ${height}` });
  for (const p of placed) {
    if (p.parent !== null) {
      const parent = byId.get(p.parent)!;
      svg.appendChild(svgEl("line", {
        x1: parent.x, y1: parent.y, x2: p.x, y2: p.y,
        stroke: "#bbb", "stroke-width": 1,
      }));
    }
  }
  for (const p of placed) {
    const color = colors.get(p.id);
    const circle = svgEl("circle", {
      cx: p.x, cy: p.y, r: color ? 9 : 6,
      fill: color ?? "#ddd", stroke: "#555", "stroke-width": 1,
    });
    circle.addEventListener("click", () => onNodeClick(p.id));
    const tip = svgEl("title", {});
    tip.textContent = `${p.id}\n` + Object.entries(p.node.attributes)
      .map(([k, v]) => `${k}: ${JSON.stringify(v)}`).join("\n");
    circle.appendChild(tip);
    svg.appendChild(circle);
  }
  container.appendChild(svg);
}

/** Thumbnail strip over the matched (and brush-filtered) trees. */
export function renderThumbnails(state: ViewState,
                                 rootsByTree: Map<string, CorpusNode>,
                                 container: HTMLElement,
                                 onPick: (treeId: string) => void): void {
  container.textContent = "";
  for (const treeId of state.thumbnailTreeIds()) {
    const root = rootsByTree.get(treeId);
    if (!root) continue;
    const cell = document.createElement("div");
    cell.className = "thumbnail" +
      (state.selection?.treeId === treeId ? " selected" : "");
    const placed = layoutTree(root, 8, 10);
    const width = Math.max(...placed.map((p) => p.x)) + 16;
    const height = Math.max(...placed.map((p) => p.y)) + 16;
    const svg = svgEl("svg", { width: 72, height: 56, viewBox: `-8 -8 ${width} ${height}` });
    const byId = new Map(placed.map((p) => [p.id, p]));
    for (const p of placed) {
      if (p.parent !== null) {
        const parent = byId.get(p.parent)!;
        svg.appendChild(svgEl("line", {
          x1: parent.x, y1: parent.y, x2: p.x, y2: p.y, stroke: "#999",
        }));
      }
      svg.appendChild(svgEl("circle", { cx: p.x, cy: p.y, r: 2, fill: "#444" }));
    }
    cell.appendChild(svg);
    const label = document.createElement("div");
    label.textContent = treeId;
    cell.appendChild(label);
    cell.addEventListener("click", () => onPick(treeId));
    container.appendChild(cell);
  }
}

/** Recommendation panel rows: canonical text plus matched-tree count. */
export function renderRecommendations(recs: RecommendationDoc[],
                                      container: HTMLElement,
                                      onPick: (rec: RecommendationDoc) => void): void {
  container.textContent = "";
  for (const rec of recs) {
    const row = document.createElement("div");
    row.className = "recommendation";
    const count = document.createElement("span");
    count.className = "rec-count";
    count.textContent = String(rec.count);
    const text = document.createElement("code");
    text.textContent = rec.expr;
    row.append(count, text);
    row.addEventListener("click", () => onPick(rec));
    container.appendChild(row);
  }
}

/** Projection scatter over the filtered groups: size = group cardinality,
 * highlight = matched groups. */
export function renderProjection(state: ViewState,
                                 container: HTMLElement,
                                 onBrush: (keys: string[]) => void): void {
  container.textContent = "";
  const points = state.filteredProjection();
  if (points.length === 0) return;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const pad = 20;
  const w = 320;
  const h = 260;
  const sx = (x: number) => pad + (w - 2 * pad) *
    (xs.length > 1 ? (x - Math.min(...xs)) / ((Math.max(...xs) - Math.min(...xs)) || 1) : 0.5);
  const sy = (y: number) => pad + (h - 2 * pad) *
    (ys.length > 1 ? (y - Math.min(...ys)) / ((Math.max(...ys) - Math.min(...ys)) || 1) : 0.5);
  const svg = svgEl("svg", { width: w, height: h, class: "scatter" });
  const highlighted = state.highlightedGroupKeys();
  const maxN = Math.max(...points.map((p) => p.n));
  for (const point of points) {
    const circle = svgEl("circle", {
      cx: sx(point.x), cy: sy(point.y),
      r: 3 + 7 * Math.sqrt(point.n / maxN),
      fill: highlighted.has(point.key) ? "#f2c230" : "#74a3c7",
      opacity: state.brushedGroups.size === 0 || state.brushedGroups.has(point.key)
        ? 0.95 : 0.25,
      stroke: "#335",
    });
    const tip = svgEl("title", {});
    tip.textContent = `${point.n} trees\n${point.members.slice(0, 6).join(", ")}`;
    circle.appendChild(tip);
    svg.appendChild(circle);
  }
  let anchor: { x: number; y: number } | null = null;
  let band: SVGRectElement | null = null;
  svg.addEventListener("mousedown", (ev) => {
    const rect = svg.getBoundingClientRect();
    anchor = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    band = svgEl("rect", { x: anchor.x, y: anchor.y, width: 0, height: 0,
                           class: "brush-band" });
    svg.appendChild(band);
  });
  svg.addEventListener("mousemove", (ev) => {
    if (!anchor || !band) return;
    const rect = svg.getBoundingClientRect();
    const x = ev.clientX - rect.left;
    const y = ev.clientY - rect.top;
    band.setAttribute("x", String(Math.min(x, anchor.x)));
    band.setAttribute("y", String(Math.min(y, anchor.y)));
    band.setAttribute("width", String(Math.abs(x - anchor.x)));
    band.setAttribute("height", String(Math.abs(y - anchor.y)));
  });
  svg.addEventListener("mouseup", (ev) => {
    if (!anchor) return;
    const rect = svg.getBoundingClientRect();
    const x2 = ev.clientX - rect.left;
    const y2 = ev.clientY - rect.top;
    const [lo_x, hi_x] = [Math.min(anchor.x, x2), Math.max(anchor.x, x2)];
    const [lo_y, hi_y] = [Math.min(anchor.y, y2), Math.max(anchor.y, y2)];
    const keys = points
      .filter((p) => sx(p.x) >= lo_x && sx(p.x) <= hi_x &&
                     sy(p.y) >= lo_y && sy(p.y) <= hi_y)
      .map((p) => p.key);
    anchor = null;
    band?.remove();
    band = null;
    onBrush(keys);
  });
  container.appendChild(svg);
}

/** Transient error toast for 4xx/5xx responses. */
export function toast(message: string): void {
  const el = document.createElement("div");
  el.className = "toast";
  el.textContent = message;
  document.body.appendChild(el);
  setTimeout(() => el.remove(), 5000);
}
