/**
 * View-state derivations against recorded service payloads: result
 * highlighting equals the binding, recommendation apply replaces the editor
 * content exactly, brushing filters the thumbnail strip.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  ProjectionPointDoc, QueryResponse, RecommendationDoc, TargetDoc,
} from "../src/ast.js";
import { EditorGraph } from "../src/editor.js";
import { ViewState, colorAssignment } from "../src/state.js";

const load = <T>(name: string): T => JSON.parse(
  readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8"));

const report = load<QueryResponse>("sample_report.json");
const emptyReport = load<QueryResponse>("empty_report.json");
const recommendations = load<RecommendationDoc[]>("recommendations.json");
const projection = load<ProjectionPointDoc[]>("projection.json");
const expressions = load<Record<string, { expr: string; ast: TargetDoc }>>(
  "paper_expressions.json");

function freshState(): ViewState {
  const state = new ViewState();
  state.snapshotId = "snap";
  state.projection = projection;
  return state;
}

describe("result highlighting", () => {
  it("highlights exactly the node ids of the selected binding", () => {
    const state = freshState();
    state.setReport(expressions.author_star.ast, report);
    const treeId = report.matched[0];
    state.select(treeId, 0);
    const expected = new Set(
      Object.values(report.results[treeId][0].binding).flat());
    expect(state.highlightedNodeIds()).toEqual(expected);
  });

  it("maps each bound node to its element's color", () => {
    const state = freshState();
    state.setReport(expressions.author_star.ast, report);
    const treeId = report.matched[0];
    state.select(treeId, 0);
    const colors = colorAssignment(expressions.author_star.ast);
    const byNode = state.highlightColors();
    for (const [elem, nodeIds] of Object.entries(report.results[treeId][0].binding)) {
      for (const nodeId of nodeIds) {
        expect(byNode.get(nodeId)).toBe(colors.get(elem));
      }
    }
  });

  it("clears highlighting and thumbnails on an empty report", () => {
    const state = freshState();
    state.setReport(expressions.author_star.ast, emptyReport);
    expect(state.highlightedNodeIds().size).toBe(0);
    expect(state.thumbnailTreeIds()).toEqual([]);
    expect(state.highlightedGroupKeys().size).toBe(0);
  });
});

describe("recommendation apply", () => {
  it("replaces editor content with the recommendation's exact AST", () => {
    const editor = new EditorGraph();
    editor.addNode("wildcard");  // stale content to be replaced
    const state = freshState();
    const rec = recommendations[0];
    const applied = state.applyRecommendation(rec, editor);
    expect(editor.toAst()).toEqual(rec.ast);
    expect(applied).toEqual(rec.ast);
    expect(state.selectedRecommendation).toBe(rec);
  });

  it("recommendation fixtures carry counts and canonical text", () => {
    expect(recommendations.length).toBeGreaterThan(0);
    for (const rec of recommendations) {
      expect(typeof rec.expr).toBe("string");
      expect(rec.count).toBeGreaterThan(0);
    }
  });
});

describe("projection brushing", () => {
  it("brushed groups expose exactly their member tree ids", () => {
    const state = freshState();
    const group = projection[0];
    state.brush([group.key]);
    expect(state.brushedTreeIds()).toEqual(group.members);
  });

  it("brushing filters the thumbnail strip to brushed members", () => {
    const state = freshState();
    state.setReport(expressions.graph_topic.ast, report);
    const matched = new Set(report.matched);
    const group = projection.find((p) => p.members.some((m) => matched.has(m)))!;
    state.brush([group.key]);
    expect(state.thumbnailTreeIds()).toEqual(
      report.matched.filter((id) => group.members.includes(id)));
    state.clearBrush();
    expect(state.thumbnailTreeIds()).toEqual(report.matched);
  });

  it("highlights projection groups containing matched trees", () => {
    const state = freshState();
    state.setReport(expressions.author_star.ast, report);
    const matched = new Set(report.matched);
    const expected = new Set(
      projection.filter((p) => p.members.some((m) => matched.has(m)))
                .map((p) => p.key));
    expect(state.highlightedGroupKeys()).toEqual(expected);
  });
});

describe("overview range filters", () => {
  it("narrows the projection to groups with trees in range", () => {
    const state = freshState();
    const allIds = projection.flatMap((p) => p.members);
    // synthetic metrics: tree index becomes its size
    state.treeMetrics = new Map(allIds.map((id, i) => [
      id, { size: i + 1, height: 1, width: 1 }]));
    expect(state.filteredProjection()).toEqual(projection);
    state.setOverviewFilter("size", { lo: 1, hi: 1 });
    const filtered = state.filteredProjection();
    expect(filtered).toEqual(
      projection.filter((p) => p.members.includes(allIds[0])));
    state.setOverviewFilter("size", null);
    expect(state.filteredProjection()).toEqual(projection);
  });

  it("filters only the overview, never the match report", () => {
    const state = freshState();
    state.setReport(expressions.author_star.ast, report);
    const allIds = projection.flatMap((p) => p.members);
    state.treeMetrics = new Map(allIds.map((id) => [
      id, { size: 1, height: 1, width: 1 }]));
    state.setOverviewFilter("size", { lo: 100, hi: 200 });
    expect(state.filteredProjection()).toEqual([]);
    expect(state.lastReport).toBe(report);  // untouched
    expect(state.thumbnailTreeIds()).toEqual(report.matched);
  });
});
