/**
 * View state shared by the panels: the last match report, the selected
 * result (driving element-to-node color binding), the selected
 * recommendation and the projection brush.  Pure data + derivations;
 * rendering reads from here.
 */

import {
  MatchResultDoc, ProjectionPointDoc, QueryResponse, RecommendationDoc, TargetDoc,
  elementIds,
} from "./ast.js";
import { EditorGraph } from "./editor.js";

/** Fixed qualitative palette; element ids get colors in document order. */
export const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

export function colorAssignment(doc: TargetDoc): Map<string, string> {
  const colors = new Map<string, string>();
  elementIds(doc).forEach((id, index) => {
    colors.set(id, PALETTE[index % PALETTE.length]);
  });
  return colors;
}

export interface Selection { treeId: string; index: number }

/** Per-tree structural metrics driving the overview range filters. */
export interface TreeMetrics { size: number; height: number; width: number }

export type MetricName = keyof TreeMetrics;

export interface Range { lo: number; hi: number }

export class ViewState {
  snapshotId: string | null = null;
  lastQuery: TargetDoc | null = null;
  lastReport: QueryResponse | null = null;
  selection: Selection | null = null;
  selectedRecommendation: RecommendationDoc | null = null;
  brushedGroups: Set<string> = new Set();
  projection: ProjectionPointDoc[] = [];
  treeMetrics: Map<string, TreeMetrics> = new Map();
  // distribution-panel range filters; they narrow the overview only,
  // never the query itself
  overviewFilters: Partial<Record<MetricName, Range>> = {};

  setReport(query: TargetDoc, report: QueryResponse): void {
    this.lastQuery = query;
    this.lastReport = report;
    this.selection = null;
  }

  clearReport(): void {
    this.lastQuery = null;
    this.lastReport = null;
    this.selection = null;
  }

  select(treeId: string, index = 0): void {
    const results = this.lastReport?.results[treeId];
    if (!results || index >= results.length) {
      throw new Error(`no result ${index} for tree ${treeId}`);
    }
    this.selection = { treeId, index };
  }

  selectedResult(): MatchResultDoc | null {
    if (!this.selection || !this.lastReport) return null;
    return this.lastReport.results[this.selection.treeId][this.selection.index];
  }

  /** Exactly the node ids in the selected result's binding. */
  highlightedNodeIds(): Set<string> {
    const result = this.selectedResult();
    if (!result) return new Set();
    const ids = new Set<string>();
    for (const nodeIds of Object.values(result.binding)) {
      nodeIds.forEach((id) => ids.add(id));
    }
    return ids;
  }

  /** node id -> color of the expression element that bound it. */
  highlightColors(): Map<string, string> {
    const out = new Map<string, string>();
    const result = this.selectedResult();
    if (!result || !this.lastQuery) return out;
    const colors = colorAssignment(this.lastQuery);
    for (const [elem, nodeIds] of Object.entries(result.binding)) {
      const color = colors.get(elem);
      if (!color) continue;
      nodeIds.forEach((id) => out.set(id, color));
    }
    return out;
  }

  /** Matched trees, filtered by the projection brush when one is active. */
  thumbnailTreeIds(): string[] {
    const matched = this.lastReport?.matched ?? [];
    if (this.brushedGroups.size === 0) return [...matched];
    const allowed = new Set<string>();
    for (const point of this.projection) {
      if (this.brushedGroups.has(point.key)) {
        point.members.forEach((id) => allowed.add(id));
      }
    }
    return matched.filter((id) => allowed.has(id));
  }

  /** All member trees of the brushed groups (the strip when browsing). */
  brushedTreeIds(): string[] {
    const out: string[] = [];
    for (const point of this.projection) {
      if (this.brushedGroups.has(point.key)) out.push(...point.members);
    }
    return out;
  }

  brush(groupKeys: Iterable<string>): void {
    this.brushedGroups = new Set(groupKeys);
  }

  clearBrush(): void {
    this.brushedGroups.clear();
  }

  /** Projection groups containing at least one matched tree. */
  highlightedGroupKeys(): Set<string> {
    const matched = new Set(this.lastReport?.matched ?? []);
    const keys = new Set<string>();
    for (const point of this.projection) {
      if (point.members.some((id) => matched.has(id))) keys.add(point.key);
    }
    return keys;
  }

  setOverviewFilter(metric: MetricName, range: Range | null): void {
    if (range === null) delete this.overviewFilters[metric];
    else this.overviewFilters[metric] = range;
  }

  private treePassesFilters(treeId: string): boolean {
    const metrics = this.treeMetrics.get(treeId);
    if (!metrics) return true;
    for (const [name, range] of Object.entries(this.overviewFilters)) {
      const value = metrics[name as MetricName];
      if (value < range.lo || value > range.hi) return false;
    }
    return true;
  }

  /** Overview points narrowed by the distribution-panel ranges. */
  filteredProjection(): ProjectionPointDoc[] {
    if (Object.keys(this.overviewFilters).length === 0) return this.projection;
    return this.projection.filter(
      (point) => point.members.some((id) => this.treePassesFilters(id)));
  }

  /**
   * Replace the editor content with the recommendation's exact AST.
   * The caller re-queries afterwards (the feedback loop).
   */
  applyRecommendation(rec: RecommendationDoc, editor: EditorGraph): TargetDoc {
    this.selectedRecommendation = rec;
    editor.loadAst(rec.ast);
    const doc = editor.toAst();
    if (doc === null) throw new Error("recommendation produced an empty editor");
    return doc;
  }
}
