/**
 * The visual expression editor's model: a graph of visual nodes (one per
 * node pattern, with predicate rows and a repetition), parent-child edges
 * (path steps), bracket groups (branch arms) and composition chips.
 *
 * Gestures mutate the graph; `toAst()` serializes it to an AST interchange
 * document that the server decodes without diagnostics.  The editor never
 * parses text: applying a recommendation loads its AST document verbatim.
 */

import {
  ArmDoc, BranchDoc, CoreDoc, DEFAULT_REP, EcClauseDoc, NodeDoc, NodeKind,
  PathDoc, PredicateOp, Quantifier, RepDoc, Rhs, TargetDoc, isDefaultRep,
} from "./ast.js";

export interface PredicateRow { attr: string; op: PredicateOp; rhs: Rhs }

export interface VisualNode {
  id: string;
  kind: NodeKind;
  negated: boolean;
  predicates: PredicateRow[];
  rep: RepDoc;
  alt: string | null;     // alternация chain link
  next: string | null;    // parent-child edge: the following path step
  arms: VisualArm[];      // bracket grouping attached to this node
}

export interface VisualArm { head: string; rep: RepDoc }

export interface EcChip { quantifier: Quantifier; head: string; occurrences: RepDoc }

export class EditorError extends Error {}

export class EditorGraph {
  private nodes = new Map<string, VisualNode>();
  private rootId: string | null = null;
  private chips: EcChip[] = [];
  private counter = 0;
  private prefix = "e";

  // --- gestures -----------------------------------------------------------

  /** Drop a new visual node on the canvas. */
  addNode(kind: NodeKind = "custom"): string {
    this.counter += 1;
    const id = `${this.prefix}${this.counter}`;
    this.nodes.set(id, {
      id, kind, negated: false, predicates: [], rep: { ...DEFAULT_REP },
      alt: null, next: null, arms: [],
    });
    if (this.rootId === null) this.rootId = id;
    return id;
  }

  setKind(id: string, kind: NodeKind): void {
    const node = this.get(id);
    node.kind = kind;
    if (kind !== "custom") node.predicates = [];
  }

  setNegated(id: string, negated: boolean): void {
    this.get(id).negated = negated;
  }

  /** Add a predicate row to a custom node. */
  addPredicate(id: string, attr: string, op: PredicateOp, rhs: Rhs): void {
    const node = this.get(id);
    if (node.kind !== "custom") {
      throw new EditorError(`${node.kind} nodes carry no predicates`);
    }
    if (rhs.kind === "list") rhs = { kind: "list", values: [...new Set(rhs.values)].sort() };
    node.predicates.push({ attr, op, rhs });
  }

  removePredicate(id: string, index: number): void {
    this.get(id).predicates.splice(index, 1);
  }

  /** The node's own repetition (how often the step repeats along a path). */
  setRepetition(id: string, min: number, max: number | null): void {
    if (min < 0 || (max !== null && max < min)) {
      throw new EditorError(`bad repetition {${min},${max}}`);
    }
    this.get(id).rep = { min, max };
  }

  /** Chain an alternative pattern onto a node (the | operator). */
  addAlternative(id: string, altId: string): void {
    const node = this.get(id);
    const alt = this.get(altId);
    if (node.alt !== null) throw new EditorError("node already has an alternative");
    this.assertDetached(altId, "alternative");
    node.alt = alt.id;
  }

  /** Connect two nodes with a parent-child edge: child is the next path step. */
  connect(parentId: string, childId: string): void {
    const parent = this.get(parentId);
    this.get(childId);
    if (parent.next !== null) throw new EditorError("node already has a next step");
    if (parent.arms.length > 0) {
      throw new EditorError("a node with a bracket group cannot also have a next step");
    }
    this.assertDetached(childId, "child");
    parent.next = childId;
  }

  /** Bracket grouping: attach a path (by its head) as a branch arm of a node. */
  addArm(nodeId: string, headId: string, rep: RepDoc = { min: 1, max: null }): void {
    const node = this.get(nodeId);
    this.get(headId);
    if (node.next !== null) {
      throw new EditorError("a node with a next step cannot carry a bracket group");
    }
    this.assertDetached(headId, "arm head");
    node.arms.push({ head: headId, rep: { ...rep } });
  }

  setArmRepetition(nodeId: string, armIndex: number, rep: RepDoc): void {
    const node = this.get(nodeId);
    const arm = node.arms[armIndex];
    if (!arm) throw new EditorError(`no arm ${armIndex}`);
    arm.rep = { ...rep };
  }

  /** Add a composition chip constraining the matched subtree. */
  addEcClause(quantifier: Quantifier, headId: string,
              occurrences: RepDoc = { min: 1, max: null }): void {
    this.get(headId);
    this.assertDetached(headId, "clause path");
    this.chips.push({ quantifier, head: headId, occurrences: { ...occurrences } });
  }

  clear(): void {
    this.nodes.clear();
    this.chips = [];
    this.rootId = null;
    this.counter = 0;
  }

  get empty(): boolean {
    return this.rootId === null;
  }

  /** Export is disabled while the canvas is empty. */
  get canExport(): boolean {
    return this.rootId !== null;
  }

  /** Visual nodes in creation order (for rendering). */
  allNodes(): VisualNode[] {
    return [...this.nodes.values()];
  }

  allChips(): EcChip[] {
    return [...this.chips];
  }

  /** toAst that swallows incompleteness, for live canvas previews. */
  toAstOrNull(): TargetDoc | null {
    try {
      return this.toAst();
    } catch (err) {
      if (err instanceof EditorError) return null;
      throw err;
    }
  }

  // --- serialization ------------------------------------------------------

  toAst(): TargetDoc | null {
    if (this.rootId === null) return null;
    const core = this.coreDoc(this.rootId);
    const ec: EcClauseDoc[] = this.chips.map((chip) => ({
      quantifier: chip.quantifier,
      path: this.pathDoc(chip.head, false),
      occurrences: { ...chip.occurrences },
    }));
    return { core, ec };
  }

  /** Replace the whole editor content with an AST document (recommendation apply). */
  loadAst(doc: TargetDoc): void {
    this.clear();
    const addPattern = (pattern: NodeDoc): string => {
      const id = this.intern(pattern.id);
      const node = this.get(id);
      node.kind = pattern.node;
      node.negated = pattern.negated;
      node.predicates = (pattern.predicates ?? []).map((p) => ({
        attr: p.attr, op: p.op, rhs: p.rhs,
      }));
      if (pattern.alt) node.alt = addPattern(pattern.alt);
      return id;
    };
    const addPath = (path: PathDoc): string => {
      let headId: string | null = null;
      let prevId: string | null = null;
      for (const step of path.steps) {
        const id = addPattern(step.node);
        this.get(id).rep = { ...step.rep };
        if (prevId !== null) this.get(prevId).next = id;
        if (headId === null) headId = id;
        prevId = id;
      }
      if (headId === null) throw new EditorError("empty path in document");
      return headId;
    };
    const addBranch = (nodeId: string, branch: BranchDoc): void => {
      for (const arm of branch.arms) {
        const headId = addPath(arm.path);
        this.get(nodeId).arms.push({ head: headId, rep: { ...arm.rep } });
        if (arm.child) {
          addBranch(this.lastStepOf(headId), arm.child);
        }
      }
    };
    const core = doc.core;
    if (core.kind === "node") {
      this.rootId = addPattern(core.pattern);
    } else if (core.kind === "path") {
      this.rootId = addPath(core.path);
    } else {
      this.rootId = addPattern(core.root);
      addBranch(this.rootId, core.branch);
    }
    for (const clause of doc.ec) {
      this.chips.push({
        quantifier: clause.quantifier,
        head: addPath(clause.path),
        occurrences: { ...clause.occurrences },
      });
    }
  }

  // --- internals ----------------------------------------------------------

  private get(id: string): VisualNode {
    const node = this.nodes.get(id);
    if (!node) throw new EditorError(`no visual node ${id}`);
    return node;
  }

  private intern(preferred: string): string {
    let id = preferred;
    if (!id || this.nodes.has(id)) {
      this.counter += 1;
      id = `${this.prefix}${this.counter}`;
    }
    this.nodes.set(id, {
      id, kind: "custom", negated: false, predicates: [],
      rep: { ...DEFAULT_REP }, alt: null, next: null, arms: [],
    });
    return id;
  }

  private lastStepOf(headId: string): string {
    let cur = this.get(headId);
    while (cur.next !== null) cur = this.get(cur.next);
    return cur.id;
  }

  /** A node being attached must not already be the editor root or attached elsewhere. */
  private assertDetached(id: string, role: string): void {
    if (id === this.rootId) {
      throw new EditorError(`the expression root cannot become a ${role}`);
    }
    for (const node of this.nodes.values()) {
      if (node.next === id || node.alt === id ||
          node.arms.some((arm) => arm.head === id)) {
        throw new EditorError(`node ${id} is already attached`);
      }
    }
    for (const chip of this.chips) {
      if (chip.head === id) throw new EditorError(`node ${id} is already a clause path`);
    }
  }

  private nodeDoc(id: string): NodeDoc {
    const node = this.get(id);
    if (node.kind === "custom" && node.predicates.length === 0) {
      throw new EditorError(`node ${id} needs at least one predicate row`);
    }
    const doc: NodeDoc = {
      id: node.id,
      node: node.kind,
      negated: node.negated,
      alt: node.alt !== null ? this.nodeDoc(node.alt) : null,
    };
    if (node.kind === "custom") {
      doc.predicates = node.predicates.map((p) => ({ attr: p.attr, op: p.op, rhs: p.rhs }));
    }
    return doc;
  }

  private pathDoc(headId: string, allowArms: boolean): PathDoc {
    const steps = [];
    let cur: VisualNode | null = this.get(headId);
    while (cur !== null) {
      if (cur.arms.length > 0) {
        if (!allowArms || cur.next !== null) {
          throw new EditorError(
            "bracket groups may only hang off a path's final node");
        }
      }
      steps.push({ node: this.nodeDoc(cur.id), rep: { ...cur.rep } });
      cur = cur.next !== null ? this.get(cur.next) : null;
    }
    return { steps };
  }

  private branchDoc(node: VisualNode): BranchDoc {
    const arms: ArmDoc[] = node.arms.map((arm) => {
      const lastId = this.lastStepOf(arm.head);
      const last = this.get(lastId);
      const child = last.arms.length > 0 ? this.branchDoc(last) : null;
      return { path: this.pathDoc(arm.head, true), rep: { ...arm.rep }, child };
    });
    return { arms };
  }

  private coreDoc(rootId: string): CoreDoc {
    const root = this.get(rootId);
    if (root.arms.length > 0) {
      if (!isDefaultRep(root.rep)) {
        throw new EditorError("a subtree root cannot carry a repetition");
      }
      return { kind: "subtree", root: this.nodeDoc(rootId), branch: this.branchDoc(root) };
    }
    const path = this.pathDoc(rootId, false);
    if (path.steps.length === 1 && isDefaultRep(path.steps[0].rep)) {
      return { kind: "node", pattern: path.steps[0].node };
    }
    return { kind: "path", path };
  }
}

/** Inline validation badges mirroring the server's kind checks. */
export interface Badge { elem: string; message: string }

export function lint(doc: TargetDoc,
                     attributes: Record<string, { kind: string }>): Badge[] {
  const badges: Badge[] = [];
  const inherent = new Set(["depth", "size", "height", "width", "degree"]);
  const checkNode = (node: NodeDoc | null) => {
    while (node) {
      for (const pred of node.predicates ?? []) {
        const kind = inherent.has(pred.attr) ? "numeric" : attributes[pred.attr]?.kind;
        if (!kind) {
          badges.push({ elem: node.id, message: `unknown attribute ${pred.attr}` });
        } else if (pred.op === "in" && kind !== "categorical") {
          badges.push({ elem: node.id, message: `'in' needs a categorical attribute` });
        } else if (pred.rhs.kind === "number" && kind !== "numeric") {
          badges.push({ elem: node.id, message: `${pred.attr} is not numeric` });
        } else if (pred.rhs.kind === "text" && kind !== "categorical") {
          badges.push({ elem: node.id, message: `${pred.attr} is not categorical` });
        }
      }
      node = node.alt;
    }
  };
  const checkPath = (path: PathDoc) => path.steps.forEach((s) => checkNode(s.node));
  const checkBranch = (branch: BranchDoc) => {
    for (const arm of branch.arms) {
      checkPath(arm.path);
      if (arm.child) checkBranch(arm.child);
    }
  };
  if (doc.core.kind === "node") checkNode(doc.core.pattern);
  else if (doc.core.kind === "path") checkPath(doc.core.path);
  else {
    checkNode(doc.core.root);
    checkBranch(doc.core.branch);
  }
  doc.ec.forEach((c) => checkPath(c.path));
  return badges;
}
