/**
 * AST interchange document types (the JSON contract with the server) and an
 * id-blind structural equality.  The client never interprets expressions
 * beyond this shape; all matching semantics live server-side.
 */

export type NodeKind = "custom" | "wildcard" | "root" | "leaf";
export type PredicateOp = "gt" | "ge" | "lt" | "le" | "eq" | "in";
export type Quantifier = "exists" | "forall";

export interface RhsNumber { kind: "number"; value: number }
export interface RhsText { kind: "text"; value: string }
export interface RhsList { kind: "list"; values: string[] }
export interface RhsRelative { kind: "relative"; offset: number }
export interface RhsAbsolute { kind: "absolute"; level: number }
export type Rhs = RhsNumber | RhsText | RhsList | RhsRelative | RhsAbsolute;

export interface PredicateDoc { attr: string; op: PredicateOp; rhs: Rhs }

export interface NodeDoc {
  id: string;
  node: NodeKind;
  negated: boolean;
  predicates?: PredicateDoc[];
  alt: NodeDoc | null;
}

export interface RepDoc { min: number; max: number | null }

export interface StepDoc { node: NodeDoc; rep: RepDoc }
export interface PathDoc { steps: StepDoc[] }
export interface ArmDoc { path: PathDoc; rep: RepDoc; child: BranchDoc | null }
export interface BranchDoc { arms: ArmDoc[] }

export interface NodeCoreDoc { kind: "node"; pattern: NodeDoc }
export interface PathCoreDoc { kind: "path"; path: PathDoc }
export interface SubtreeCoreDoc { kind: "subtree"; root: NodeDoc; branch: BranchDoc }
export type CoreDoc = NodeCoreDoc | PathCoreDoc | SubtreeCoreDoc;

export interface EcClauseDoc { quantifier: Quantifier; path: PathDoc; occurrences: RepDoc }

export interface TargetDoc { core: CoreDoc; ec: EcClauseDoc[] }

/** Service payloads. */
export interface MatchResultDoc { root: string; binding: Record<string, string[]> }
export interface QueryResponse {
  expr: string;
  matched: string[];
  results: Record<string, MatchResultDoc[]>;
}
export interface RecommendationDoc {
  expr: string;
  ast: TargetDoc;
  count: number;
  edits: { kind: string; elem: string; min?: number; max?: number | null }[];
}
export interface ProjectionPointDoc {
  key: string;
  x: number;
  y: number;
  n: number;
  members: string[];
}
export interface StatsResponse {
  trees: number;
  nodes: number;
  attributes: Record<string, { kind: "numeric" | "categorical";
                               min?: number; max?: number; values?: string[] }>;
  [extra: string]: unknown;
}

export const DEFAULT_REP: RepDoc = { min: 1, max: 1 };

export function isDefaultRep(rep: RepDoc): boolean {
  return rep.min === 1 && rep.max === 1;
}

/** Strip element ids so two documents compare structurally. */
function stripIds(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(stripIds);
  if (value !== null && typeof value === "object") {
    const out: Record<string, unknown> = {};
    for (const [key, inner] of Object.entries(value as Record<string, unknown>)) {
      if (key === "id") continue;
      out[key] = stripIds(inner);
    }
    return out;
  }
  return value;
}

function deepEqual(a: unknown, b: unknown): boolean {
  if (a === b) return true;
  if (Array.isArray(a) && Array.isArray(b)) {
    return a.length === b.length && a.every((v, i) => deepEqual(v, b[i]));
  }
  if (a !== null && b !== null && typeof a === "object" && typeof b === "object") {
    const ka = Object.keys(a as object).sort();
    const kb = Object.keys(b as object).sort();
    if (!deepEqual(ka, kb)) return false;
    return ka.every((k) =>
      deepEqual((a as Record<string, unknown>)[k], (b as Record<string, unknown>)[k]));
  }
  return false;
}

/** Structural equality ignoring element ids (the server's ast_equal). */
export function astEqual(a: TargetDoc, b: TargetDoc): boolean {
  return deepEqual(stripIds(a), stripIds(b));
}

/** Every element id in document order, alternation chains included. */
export function elementIds(doc: TargetDoc): string[] {
  const ids: string[] = [];
  const fromNode = (node: NodeDoc | null) => {
    while (node) {
      ids.push(node.id);
      node = node.alt;
    }
  };
  const fromPath = (path: PathDoc) => path.steps.forEach((s) => fromNode(s.node));
  const fromBranch = (branch: BranchDoc) => {
    for (const arm of branch.arms) {
      fromPath(arm.path);
      if (arm.child) fromBranch(arm.child);
    }
  };
  if (doc.core.kind === "node") fromNode(doc.core.pattern);
  else if (doc.core.kind === "path") fromPath(doc.core.path);
  else {
    fromNode(doc.core.root);
    fromBranch(doc.core.branch);
  }
  doc.ec.forEach((c) => fromPath(c.path));
  return ids;
}
