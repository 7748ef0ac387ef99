/**
 * Editor <-> parser parity: the grammar's example expressions rebuilt via
 * scripted editor gestures must produce AST documents structurally equal
 * (ignoring element ids) to the server parser's output, recorded in
 * fixtures/paper_expressions.json.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { TargetDoc, astEqual, elementIds } from "../src/ast.js";
import { EditorError, EditorGraph, lint } from "../src/editor.js";

const fixtures: Record<string, { expr: string; ast: TargetDoc }> = JSON.parse(
  readFileSync(new URL("./fixtures/paper_expressions.json", import.meta.url), "utf-8"));

function buildAuthorChain(): EditorGraph {
  const g = new EditorGraph();
  const node = g.addNode("custom");
  g.addPredicate(node, "authors", "eq", { kind: "text", value: "Ben Shneiderman" });
  g.setRepetition(node, 3, null);
  return g;
}

function buildAuthorStar(): EditorGraph {
  const g = new EditorGraph();
  const root = g.addNode("custom");
  g.addPredicate(root, "authors", "eq", { kind: "text", value: "Ben Shneiderman" });
  const armHead = g.addNode("custom");
  g.addPredicate(armHead, "citation", "ge", { kind: "number", value: 200 });
  g.addArm(root, armHead, { min: 3, max: null });
  return g;
}

function buildInfluential2019(): EditorGraph {
  const g = new EditorGraph();
  const root = g.addNode("custom");
  g.addPredicate(root, "year", "eq", { kind: "number", value: 2019 });
  const armHead = g.addNode("wildcard");
  g.setRepetition(armHead, 0, null);
  g.addArm(root, armHead, { min: 0, max: null });
  const clauseHead = g.addNode("custom");
  g.addPredicate(clauseHead, "citation", "ge", { kind: "number", value: 200 });
  g.addEcClause("exists", clauseHead, { min: 10, max: null });
  return g;
}

describe("editor parity with the server parser", () => {
  const cases: [string, () => EditorGraph][] = [
    ["author_chain", buildAuthorChain],
    ["author_star", buildAuthorStar],
    ["influential_2019", buildInfluential2019],
  ];

  for (const [name, build] of cases) {
    it(`rebuilds ${name} (${fixtures[name].expr})`, () => {
      const doc = build().toAst();
      expect(doc).not.toBeNull();
      expect(astEqual(doc!, fixtures[name].ast)).toBe(true);
    });
  }

  it("assigns every visual element exactly one element id", () => {
    const doc = buildInfluential2019().toAst()!;
    const ids = elementIds(doc);
    expect(new Set(ids).size).toBe(ids.length);
  });
});

describe("editor behavior", () => {
  it("disables export on an empty canvas", () => {
    const g = new EditorGraph();
    expect(g.canExport).toBe(false);
    expect(g.toAst()).toBeNull();
  });

  it("single default node exports as a node target", () => {
    const g = new EditorGraph();
    const n = g.addNode("wildcard");
    expect(g.toAst()).toEqual({
      core: { kind: "node",
              pattern: { id: n, node: "wildcard", negated: false, alt: null } },
      ec: [],
    });
  });

  it("connected nodes export as path steps", () => {
    const g = new EditorGraph();
    const a = g.addNode("custom");
    g.addPredicate(a, "v", "gt", { kind: "number", value: 1 });
    const b = g.addNode("wildcard");
    g.connect(a, b);
    const doc = g.toAst()!;
    expect(doc.core.kind).toBe("path");
    if (doc.core.kind === "path") {
      expect(doc.core.path.steps).toHaveLength(2);
    }
  });

  it("rejects predicates on special nodes", () => {
    const g = new EditorGraph();
    const n = g.addNode("wildcard");
    expect(() => g.addPredicate(n, "v", "gt", { kind: "number", value: 1 }))
      .toThrow(EditorError);
  });

  it("rejects a repetition on a subtree root", () => {
    const g = buildAuthorStar();
    const rootId = g.allNodes()[0].id;
    g.setRepetition(rootId, 2, 4);
    expect(() => g.toAst()).toThrow(EditorError);
  });

  it("rejects attaching one node twice", () => {
    const g = new EditorGraph();
    const a = g.addNode("wildcard");
    const b = g.addNode("wildcard");
    g.connect(a, b);
    const c = g.addNode("wildcard");
    expect(() => g.connect(c, b)).toThrow(EditorError);
  });

  it("normalizes list predicate values like the server", () => {
    const g = new EditorGraph();
    const n = g.addNode("custom");
    g.addPredicate(n, "topics", "in",
                   { kind: "list", values: ["graph", "ml", "graph"] });
    const doc = g.toAst()!;
    if (doc.core.kind === "node") {
      expect(doc.core.pattern.predicates![0].rhs).toEqual(
        { kind: "list", values: ["graph", "ml"] });
    }
  });

  it("round-trips a loaded document", () => {
    const original = fixtures.influential_2019.ast;
    const g = new EditorGraph();
    g.loadAst(original);
    expect(g.toAst()).toEqual(original);  // exact, ids included
  });

  it("lint flags kind mismatches like server validation", () => {
    const g = new EditorGraph();
    const n = g.addNode("custom");
    g.addPredicate(n, "topics", "in", { kind: "list", values: ["graph"] });
    const badges = lint(g.toAst()!, { topics: { kind: "numeric" } });
    expect(badges).toHaveLength(1);
    expect(badges[0].elem).toBe(n);
    const clean = lint(g.toAst()!, { topics: { kind: "categorical" } });
    expect(clean).toHaveLength(0);
  });
});
