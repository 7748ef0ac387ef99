"""Exhaustive reference matcher for differential testing.

Re-implements the semantics in matcher.py by enumeration: every downward
chain and step split for paths, every child-to-arm assignment vector for
branches, every sub-chain for compositions.  Candidates are then ranked by
an explicitly computed decision key implementing the canonical order, so the
selected binding must equal the engine's first-found one.  Shares only the
AST and tree model with the engine, none of its search code.
"""

from __future__ import annotations

import itertools

from .ast import (
    CUSTOM, EQ, EXISTS, GE, GT, IN, LE, LEAF, LT, ROOT, WILDCARD,
    NodeCore, PathCore, SubtreeCore,
)
from .matcher import MatchResult
from .model import INHERENT_NAMES

DEFAULT_SIZE_BOUND = 40
_ASSIGNMENT_LIMIT = 4_000_000


class SizeBoundExceeded(ValueError):
    pass


# --- independent atom evaluation -------------------------------------------

def _value(node, name):
    if name in INHERENT_NAMES:
        return float(getattr(node.inherent, name))
    return node.attributes.get(name)


def _pred_holds(pred, node, ancestors):
    left = _value(node, pred.attribute)
    if left is None:
        return False
    rhs = pred.rhs
    if type(rhs).__name__ == "RelativeRef":
        target_idx = len(ancestors) - 1 + rhs.offset
        rhs = _value(ancestors[target_idx], pred.attribute) if target_idx >= 0 else None
    elif type(rhs).__name__ == "AbsoluteRef":
        rhs = _value(ancestors[rhs.level - 1], pred.attribute) if rhs.level <= len(ancestors) else None
    if rhs is None:
        return False
    if pred.op == IN:
        wanted = rhs if isinstance(rhs, tuple) else None
        if wanted is None:
            return False
        if isinstance(left, tuple):
            return len(set(left) & set(wanted)) > 0
        return isinstance(left, str) and left in wanted
    if pred.op == EQ:
        if isinstance(left, tuple) and isinstance(rhs, str):
            return rhs in left
        return type(left) == type(rhs) and left == rhs
    if not (isinstance(left, float) and isinstance(rhs, float)):
        return False
    return {GT: left > rhs, GE: left >= rhs, LT: left < rhs, LE: left <= rhs}[pred.op]


def _atom_holds(atom, node, ancestors):
    if atom.kind == WILDCARD:
        raw = True
    elif atom.kind == ROOT:
        raw = len(ancestors) == 1
    elif atom.kind == LEAF:
        raw = len(node.children) == 0
    else:
        raw = all(_pred_holds(p, node, ancestors) for p in atom.predicates)
    return not raw if atom.negated else raw


def _pattern_holds(pattern, node, ancestors):
    atom = pattern
    while atom is not None:
        if _atom_holds(atom, node, ancestors):
            return True
        atom = atom.alt
    return False


def _ancestors(tree, node):
    chain = [node]
    while tree.parents[chain[-1].id] is not None:
        chain.append(tree.parents[chain[-1].id])
    return chain[::-1]


# --- chains and splits ------------------------------------------------------

def _all_chains(start):
    """Every downward chain beginning at start, as node lists."""
    chains = []
    pending = [[start]]
    while pending:
        chain = pending.pop()
        chains.append(chain)
        for child in chain[-1].children:
            pending.append(chain + [child])
    return chains


def _all_splits(steps, chain, tree):
    """Every assignment of chain positions to step indices satisfying bounds."""
    out = []
    n = len(steps)

    def finishable(si, ci):
        while si < n:
            if ci < steps[si].rep.min:
                return False
            si += 1
            ci = 0
        return True

    def rec(pos, si, ci, acc):
        if pos == len(chain):
            if finishable(si, ci):
                out.append(tuple(acc))
            return
        if si >= n:
            return
        rep = steps[si].rep
        if (rep.max is None or ci < rep.max) and _pattern_holds(
                steps[si].node, chain[pos], _ancestors(tree, chain[pos])):
            acc.append(si)
            rec(pos + 1, si, ci + 1, acc)
            acc.pop()
        if ci >= rep.min:
            rec(pos, si + 1, 0, acc)

    rec(0, 0, 0, [])
    return out


def _decision_key(steps, chain, split, tree):
    """Rank of the action sequence producing this (chain, split) candidate."""
    key = []
    si = 0
    ci = 0
    pos = 0
    n = len(steps)
    while si < n:
        if pos < len(chain) and split[pos] == si:
            if pos == 0:
                child_rank = 0
            else:
                parent = chain[pos - 1]
                child_rank = next(i for i, c in enumerate(parent.children) if c is chain[pos])
            if steps[si].rep.max is None:
                key.append((0, child_rank))
            else:
                key.append((1, child_rank))
            ci += 1
            pos += 1
        else:
            if steps[si].rep.max is None:
                key.append((1,))
            else:
                key.append((0,))
            si += 1
            ci = 0
    return key


def _path_candidates(path, start, tree):
    """All (key, chain, split) candidates sorted by decision key."""
    candidates = []
    for chain in _all_chains(start):
        for split in _all_splits(path.steps, chain, tree):
            key = _decision_key(path.steps, chain, split, tree)
            candidates.append((key, chain, split))
    candidates.sort(key=lambda c: c[0])
    return candidates


def _split_binding(path, chain, split):
    binding = {}
    for pos, si in enumerate(split):
        binding.setdefault(path.steps[si].node.elem_id, []).append(chain[pos].id)
    return binding


def _first_path_match(path, start, tree, end_filter=None):
    """Least-ranked candidate, optionally filtered by its final node."""
    for _, chain, split in _path_candidates(path, start, tree):
        extra = None
        if end_filter is not None:
            extra = end_filter(chain[-1])
            if extra is None:
                continue
        return chain, split, extra
    return None


# --- branches ---------------------------------------------------------------

def _branch_match(branch, node, tree):
    arms = branch.arms
    children = node.children
    options = list(range(len(arms))) + [None]
    if len(options) ** len(children) > _ASSIGNMENT_LIMIT:
        raise SizeBoundExceeded(
            f"branch assignment space {len(options)}^{len(children)} too large for the oracle")

    def arm_feasible(child, arm):
        def end_filter(end):
            if arm.child is None:
                return {}
            return _branch_match(arm.child, end, tree)
        return _first_path_match(arm.path, child, tree, end_filter)

    feas = {}
    for j, child in enumerate(children):
        for ai, arm in enumerate(arms):
            feas[(j, ai)] = arm_feasible(child, arm)

    for vector in itertools.product(options, repeat=len(children)):
        counts = [0] * len(arms)
        ok = True
        for j, ai in enumerate(vector):
            if ai is None:
                continue
            if feas[(j, ai)] is None:
                ok = False
                break
            counts[ai] += 1
        if not ok:
            continue
        # lazy quota: exactly min assigned per arm (extras stay unassigned)
        if any(counts[ai] != arm.rep.min for ai, arm in enumerate(arms)):
            continue
        binding = {}
        for j, ai in enumerate(vector):
            if ai is None:
                continue
            chain, split, sub = feas[(j, ai)]
            for elem, ids in _split_binding(arms[ai].path, chain, split).items():
                binding.setdefault(elem, []).extend(ids)
            for elem, ids in sub.items():
                binding.setdefault(elem, []).extend(ids)
        return binding
    return None


# --- element composition ----------------------------------------------------

def _consume_exact(steps, seq, tree):
    """Plain recursion: can steps consume exactly this sequence?"""
    n = len(steps)

    def rec(pos, si, ci):
        if pos == len(seq):
            while si < n:
                if ci < steps[si].rep.min:
                    return False
                si, ci = si + 1, 0
            return True
        if si >= n:
            return False
        rep = steps[si].rep
        node = seq[pos]
        if (rep.max is None or ci < rep.max) and _pattern_holds(
                steps[si].node, node, _ancestors(tree, node)):
            if rec(pos + 1, si, ci + 1):
                return True
        if ci >= rep.min:
            return rec(pos, si + 1, 0)
        return False

    return rec(0, 0, 0)


def _subtree(root):
    nodes = [root]
    i = 0
    while i < len(nodes):
        nodes.extend(nodes[i].children)
        i += 1
    return nodes


def _instance_count(path, root, tree):
    count = 0
    for node in _subtree(root):
        for chain in _all_chains(node):
            if _consume_exact(path.steps, chain, tree):
                count += 1
    return count


def _max_disjoint(path, seq, tree):
    """DP over positions: best packing of exactly-consumed intervals."""
    length = len(seq)
    starts_at = {i: [] for i in range(length)}
    for i in range(length):
        for j in range(i, length):
            if _consume_exact(path.steps, seq[i:j + 1], tree):
                starts_at[i].append(j)
    memo = {}

    def best(i):
        if i >= length:
            return 0
        if i not in memo:
            value = best(i + 1)
            for j in starts_at[i]:
                value = max(value, 1 + best(j + 1))
            memo[i] = value
        return memo[i]

    return best(0)


def _leaf_chains(root):
    chains = []

    def walk(node, acc):
        acc = acc + [node]
        if not node.children:
            chains.append(acc)
        for child in node.children:
            walk(child, acc)

    walk(root, [])
    return chains


def _ec_holds(clauses, match_root, tree):
    for clause in clauses:
        rep = clause.occurrences
        if clause.quantifier == EXISTS:
            count = _instance_count(clause.path, match_root, tree)
            if not (rep.min <= count and (rep.max is None or count <= rep.max)):
                return False
        else:
            for seq in _leaf_chains(match_root):
                if _max_disjoint(clause.path, seq, tree) < rep.min:
                    return False
    return True


# --- whole-target -----------------------------------------------------------

def oracle_match(target, tree, size_bound=DEFAULT_SIZE_BOUND):
    """Exhaustive-enumeration matching; authoritative for tests."""
    if tree.root.inherent.size > size_bound:
        raise SizeBoundExceeded(
            f"tree {tree.tree_id} has {tree.root.inherent.size} nodes, bound is {size_bound}")
    results = []
    core = target.core
    for start in _preorder(tree.root):
        binding = None
        if isinstance(core, NodeCore):
            if _pattern_holds(core.pattern, start, _ancestors(tree, start)):
                binding = {core.pattern.elem_id: [start.id]}
        elif isinstance(core, PathCore):
            found = _first_path_match(core.path, start, tree)
            if found is not None:
                chain, split, _ = found
                binding = _split_binding(core.path, chain, split)
        else:
            if _pattern_holds(core.root, start, _ancestors(tree, start)):
                sub = _branch_match(core.branch, start, tree)
                if sub is not None:
                    binding = {core.root.elem_id: [start.id]}
                    for elem, ids in sub.items():
                        binding.setdefault(elem, []).extend(ids)
        if binding is None:
            continue
        if target.ec and not _ec_holds(target.ec, start, tree):
            continue
        results.append(MatchResult(tree_id=tree.tree_id, match_root=start.id,
                                   binding=binding))
    return results


def _preorder(root):
    order = []

    def walk(node):
        order.append(node)
        for child in node.children:
            walk(child)

    walk(root)
    return order
