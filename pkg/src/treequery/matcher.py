"""Matching engine: evaluate query targets against trees.

Deterministic search order (the contract the brute-force oracle replicates):

* A path match over a downward chain is a sequence of actions from the state
  (step index, copies consumed for that step).  ADVANCE moves to the next
  step (allowed once the current step reached its min); CONSUME(j) consumes
  the j-th child of the previously consumed node (the start node for the
  first consume) if it satisfies the step's pattern and the step is below
  its max.  At a state whose step has an unbounded max the options rank
  CONSUME(0) < CONSUME(1) < ... < ADVANCE (greedy); at a bounded step they
  rank ADVANCE < CONSUME(0) < ... (lazy).  The match is the first complete
  action sequence in lexicographic order that consumes at least one node.

* A branch match assigns children (in stored order) to arms: for each child
  the options rank arm 1 < arm 2 < ... < unassigned; an arm is an option
  while its count is below its min and the child is feasible for it.  The
  first complete assignment (depth-first, option order above) in which
  every arm count equals its min wins.  Assignments are lazy: because
  unassigned children are always permitted, any assignment with more than
  min matches per arm can drop the extras, so min is the binding quota and
  a zero-min arm binds nothing.  A child is feasible for an arm when the
  arm's path has a match starting at the child whose final bound node also
  satisfies the arm's nested branch; the first such path match (path order
  above) provides the binding.

* An EXISTS clause counts distinct consumed node sequences (chains) inside
  the match root's subtree that the clause path can consume exactly; the
  count must lie within the clause bounds.  A FORALL clause requires every
  root-to-leaf chain of the subtree to contain at least `min` non-overlapping
  exactly-consumed sub-chains (a packing with more instances than `max` can
  always drop extras, so only the min binds).

Predicates on attributes absent from a node evaluate to false, as do level
references that leave the ancestor chain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .ast import (
    CUSTOM, EQ, EXISTS, GE, GT, IN, LE, LEAF, LT, ROOT, WILDCARD,
    NodeCore, PathCore, SubtreeCore,
)
from .model import INHERENT_NAMES

DEFAULT_BRANCH_BUDGET = 500_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class MatchResult:
    tree_id: str
    match_root: str
    binding: dict  # elem_id -> ordered list of node ids
    ec_satisfied: bool = True


@dataclass
class MatchReport:
    results: dict  # tree_id -> list of MatchResult, corpus order, matched trees only
    matched_tree_ids: list  # corpus order
    diagnostics: list = field(default_factory=list)


@dataclass
class _Ctx:
    tree: object
    diagnostics: list
    budget: int = DEFAULT_BRANCH_BUDGET
    spent: int = 0

    def tick(self):
        self.spent += 1
        if self.spent > self.budget:
            raise BudgetExceeded(
                f"branch assignment budget of {self.budget} nodes exceeded")


# ---------------------------------------------------------------------------
# node evaluation

def _attr_of(node, name):
    if name in INHERENT_NAMES:
        return node.inherent.get(name)
    return node.attributes.get(name)


def _compare(lhs, op, rhs):
    if op == IN:
        if not isinstance(rhs, tuple):
            return False
        if isinstance(lhs, str):
            return lhs in rhs
        if isinstance(lhs, tuple):
            return any(v in lhs for v in rhs)
        return False
    if op == EQ:
        if isinstance(lhs, float) and isinstance(rhs, float):
            return lhs == rhs
        if isinstance(lhs, str) and isinstance(rhs, str):
            return lhs == rhs
        if isinstance(lhs, tuple) and isinstance(rhs, str):
            return rhs in lhs
        return False
    if not isinstance(lhs, float) or not isinstance(rhs, float):
        return False
    if op == GT:
        return lhs > rhs
    if op == GE:
        return lhs >= rhs
    if op == LT:
        return lhs < rhs
    if op == LE:
        return lhs <= rhs
    return False


def _eval_predicate(pred, node, chain, ctx):
    lhs = _attr_of(node, pred.attribute)
    if lhs is None:
        return False
    rhs = pred.rhs
    if hasattr(rhs, "offset"):  # RelativeRef
        idx = len(chain) - 1 + rhs.offset
        if idx < 0:
            if ctx is not None:
                ctx.diagnostics.append(
                    f"node {node.id}: relative reference &{rhs.offset} leaves the chain")
            return False
        rhs = _attr_of(chain[idx], pred.attribute)
    elif hasattr(rhs, "level"):  # AbsoluteRef
        if rhs.level > len(chain):
            if ctx is not None:
                ctx.diagnostics.append(
                    f"node {node.id}: absolute reference #{rhs.level} is below this node")
            return False
        rhs = _attr_of(chain[rhs.level - 1], pred.attribute)
    if rhs is None:
        return False
    return _compare(lhs, pred.op, rhs)


def eval_node(pattern, node, chain, ctx=None) -> bool:
    """Alternation is OR over atoms; negation inverts a single atom."""
    for atom in pattern.chain():
        if atom.kind == WILDCARD:
            base = True
        elif atom.kind == ROOT:
            base = len(chain) == 1
        elif atom.kind == LEAF:
            base = not node.children
        else:
            base = all(_eval_predicate(p, node, chain, ctx) for p in atom.predicates)
        if base != atom.negated:
            return True
    return False


# ---------------------------------------------------------------------------
# path matching

def _iter_path_matches(path, start, tree, ctx):
    """Yield consumed [(step_idx, node), ...] lists in canonical order."""
    steps = path.steps
    n = len(steps)
    consumed = []

    def rec(si, ci, frontier):
        if si == n:
            if consumed:
                yield list(consumed)
            return
        rep = steps[si].rep
        can_advance = ci >= rep.min
        can_consume = rep.max is None or ci < rep.max

        def consumes():
            if not can_consume:
                return
            for child in frontier:
                if eval_node(steps[si].node, child, tree.chain_to(child), ctx):
                    consumed.append((si, child))
                    yield from rec(si, ci + 1, child.children)
                    consumed.pop()

        def advances():
            if can_advance:
                yield from rec(si + 1, 0, frontier)

        if rep.max is None:
            yield from consumes()
            yield from advances()
        else:
            yield from advances()
            yield from consumes()

    yield from rec(0, 0, [start])


def _binding_of(path, consumed):
    binding = {}
    for si, node in consumed:
        binding.setdefault(path.steps[si].node.elem_id, []).append(node.id)
    return binding


def match_path(path, start, tree, ctx=None):
    """First binding under the canonical order, or None."""
    if ctx is None:
        ctx = _Ctx(tree, [])
    for consumed in _iter_path_matches(path, start, tree, ctx):
        return _binding_of(path, consumed)
    return None


# ---------------------------------------------------------------------------
# branch matching

def _merge_binding(into, frm):
    for elem, ids in frm.items():
        into.setdefault(elem, []).extend(ids)


def match_branch(branch, node, tree, ctx=None):
    """Binding for the first complete child-to-arm assignment, or None."""
    if ctx is None:
        ctx = _Ctx(tree, [])
    arms = branch.arms
    children = node.children
    feasible_cache = {}

    def feasible(child_idx, arm_idx):
        key = (child_idx, arm_idx)
        if key not in feasible_cache:
            arm = arms[arm_idx]
            found = None
            for consumed in _iter_path_matches(arm.path, children[child_idx], tree, ctx):
                end = consumed[-1][1]
                if arm.child is not None:
                    sub = match_branch(arm.child, end, tree, ctx)
                    if sub is None:
                        continue
                else:
                    sub = {}
                found = (consumed, sub)
                break
            feasible_cache[key] = found
        return feasible_cache[key]

    counts = [0] * len(arms)
    assignment = []

    def deficit():
        return sum(arms[i].rep.min - counts[i] for i in range(len(arms)))

    def rec(j):
        ctx.tick()
        if j == len(children):
            return deficit() == 0
        if deficit() > len(children) - j:
            return False
        for ai in range(len(arms)):
            if counts[ai] >= arms[ai].rep.min:
                continue
            if feasible(j, ai) is None:
                continue
            counts[ai] += 1
            assignment.append(ai)
            if rec(j + 1):
                return True
            counts[ai] -= 1
            assignment.pop()
        assignment.append(None)
        if rec(j + 1):
            return True
        assignment.pop()
        return False

    if not rec(0):
        return None
    binding = {}
    for j, ai in enumerate(assignment):
        if ai is None:
            continue
        consumed, sub = feasible(j, ai)
        _merge_binding(binding, _binding_of(arms[ai].path, consumed))
        _merge_binding(binding, sub)
    return binding


# ---------------------------------------------------------------------------
# element composition

def _subtree_nodes(root):
    out = []
    stack = [root]
    while stack:
        node = stack.pop()
        out.append(node)
        for child in reversed(node.children):
            stack.append(child)
    return out


def _consumes_exactly(path, seq, tree, ctx):
    """Can the path consume exactly this node sequence (some step split)?"""
    steps = path.steps
    n = len(steps)

    def closure(states):
        out = set(states)
        frontier = list(states)
        while frontier:
            si, ci = frontier.pop()
            if si < n and ci >= steps[si].rep.min and (si + 1, 0) not in out:
                out.add((si + 1, 0))
                frontier.append((si + 1, 0))
        return out

    states = closure({(0, 0)})
    for node in seq:
        chain = tree.chain_to(node)
        new = set()
        for si, ci in states:
            if si >= n:
                continue
            rep = steps[si].rep
            if (rep.max is None or ci < rep.max) and eval_node(steps[si].node, node, chain, ctx):
                new.add((si, ci + 1))
        states = closure(new)
        if not states:
            return False
    return any(si == n for si, _ in states)


def count_path_instances(path, root, tree, ctx=None):
    """Distinct downward chains inside subtree(root) the path consumes exactly."""
    if ctx is None:
        ctx = _Ctx(tree, [])
    count = 0

    def extend(chain_nodes):
        nonlocal count
        if _consumes_exactly(path, chain_nodes, tree, ctx):
            count += 1
        for child in chain_nodes[-1].children:
            extend(chain_nodes + [child])

    for node in _subtree_nodes(root):
        extend([node])
    return count


def _max_packing(path, seq, tree, ctx):
    """Greatest number of non-overlapping exactly-consumed sub-chains of seq."""
    intervals = []
    for i in range(len(seq)):
        for j in range(i, len(seq)):
            if _consumes_exactly(path, seq[i:j + 1], tree, ctx):
                intervals.append((i, j))
    intervals.sort(key=lambda ij: ij[1])
    count = 0
    last_end = -1
    for i, j in intervals:
        if i > last_end:
            count += 1
            last_end = j
    return count


def eval_ec(clauses, match_root, tree, ctx=None) -> bool:
    if ctx is None:
        ctx = _Ctx(tree, [])
    for clause in clauses:
        rep = clause.occurrences
        if clause.quantifier == EXISTS:
            count = count_path_instances(clause.path, match_root, tree, ctx)
            if count < rep.min or (rep.max is not None and count > rep.max):
                return False
        else:
            for leaf_seq in _root_to_leaf_chains(match_root):
                if _max_packing(clause.path, leaf_seq, tree, ctx) < rep.min:
                    return False
    return True


def _root_to_leaf_chains(root):
    chains = []

    def walk(node, acc):
        acc.append(node)
        if not node.children:
            chains.append(list(acc))
        for child in node.children:
            walk(child, acc)
        acc.pop()

    walk(root, [])
    return chains


# ---------------------------------------------------------------------------
# whole-target matching

def _core_head(core):
    if isinstance(core, NodeCore):
        return core.pattern
    if isinstance(core, PathCore):
        return core.path.steps[0].node
    return core.root


def _is_root_anchored(core):
    head = _core_head(core)
    if not (head.kind == ROOT and not head.negated and head.alt is None):
        return False
    # a zero-min first step is skippable, so the pattern is not truly anchored
    if isinstance(core, PathCore) and core.path.steps[0].rep.min == 0:
        return False
    return True


def _match_core(core, start, tree, ctx):
    chain = tree.chain_to(start)
    if isinstance(core, NodeCore):
        if eval_node(core.pattern, start, chain, ctx):
            return {core.pattern.elem_id: [start.id]}
        return None
    if isinstance(core, PathCore):
        return match_path(core.path, start, tree, ctx)
    if not eval_node(core.root, start, chain, ctx):
        return None
    sub = match_branch(core.branch, start, tree, ctx)
    if sub is None:
        return None
    binding = {core.root.elem_id: [start.id]}
    _merge_binding(binding, sub)
    return binding


def match_tree(target, tree, diagnostics=None, budget=DEFAULT_BRANCH_BUDGET):
    """All match results for one tree, one lazy-first binding per match root."""
    ctx = _Ctx(tree, diagnostics if diagnostics is not None else [], budget=budget)
    starts = [tree.root] if _is_root_anchored(target.core) else tree.preorder
    results = []
    try:
        for start in starts:
            binding = _match_core(target.core, start, tree, ctx)
            if binding is None:
                continue
            if target.ec and not eval_ec(target.ec, start, tree, ctx):
                continue
            results.append(MatchResult(tree_id=tree.tree_id, match_root=start.id,
                                       binding=binding))
    except BudgetExceeded as exc:
        ctx.diagnostics.append(f"tree {tree.tree_id}: {exc}")
    return results


def match_corpus(target, corpus, budget=DEFAULT_BRANCH_BUDGET) -> MatchReport:
    results = {}
    matched = []
    diagnostics = []
    for tree in corpus.trees:
        tree_results = match_tree(target, tree, diagnostics=diagnostics, budget=budget)
        if tree_results:
            results[tree.tree_id] = tree_results
            matched.append(tree.tree_id)
    return MatchReport(results=results, matched_tree_ids=matched, diagnostics=diagnostics)


# ---------------------------------------------------------------------------
# serialization (the contract consumed by the CLI, the service and the UI)

def report_to_doc(report: MatchReport) -> dict:
    return {
        "matched": list(report.matched_tree_ids),
        "results": {
            tree_id: [
                {"root": r.match_root,
                 "binding": {elem: list(ids) for elem, ids in sorted(r.binding.items())}}
                for r in tree_results
            ]
            for tree_id, tree_results in report.results.items()
        },
    }


def report_to_json(report: MatchReport) -> bytes:
    return json.dumps(report_to_doc(report), separators=(",", ":"), ensure_ascii=False).encode("utf-8")
