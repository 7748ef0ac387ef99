"""Bottom-up expression recommendation by prioritized relaxation.

For every corpus tree the seed fails to match, the relaxer applies single
edits until the tree matches, preferring the highest-priority edit kind and
the smallest widening that admits the tree.  Edit kinds, in priority order:

1. replace a constrained node pattern with a wildcard,
2. widen a node repetition (a step's bounds),
3. widen a path repetition (a branch arm's sibling count or an
   element-composition occurrence bound),
4. delete a branch arm (the branch itself when it is the last arm).

All four edits only ever enlarge the match set, except inside composition
clause paths where loosening a pattern can push an occurrence count past a
finite upper bound; the relaxer therefore never edits patterns inside
clause paths, only their occurrence bounds.

Relaxed expressions are merged by canonical text, counted over the corpus
and ranked by (fewest edits, edit priority, descending match count,
canonical text).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .ast import (
    ECClause, NodeCore, NodePattern, PathCore, QueryTarget, Repetition,
    SubtreeCore, WILDCARD, ast_encode,
)
from .matcher import (
    eval_ec, eval_node, match_branch, match_corpus, match_path, match_tree,
)
from .parser import format as format_expr

NODE_TO_WILDCARD = "node_to_wildcard"
NODE_REPETITION = "node_repetition"
PATH_REPETITION = "path_repetition"
DELETE_BRANCH_ARM = "delete_branch_arm"

_PRIORITY = {NODE_TO_WILDCARD: 0, NODE_REPETITION: 1, PATH_REPETITION: 2,
             DELETE_BRANCH_ARM: 3}

MAX_EDITS_PER_ITEM = 32


@dataclass(frozen=True)
class RelaxEdit:
    kind: str
    elem_id: str  # the step head / arm head / clause head pattern this targets
    new_value: Repetition | None = None


@dataclass
class Recommendation:
    expression: QueryTarget
    edits: tuple
    match_count: int
    matched_tree_ids: list


# ---------------------------------------------------------------------------
# edit sites and application

def _is_plain_wildcard(pattern):
    return pattern.kind == WILDCARD and not pattern.negated and pattern.alt is None


def _sites(target):
    """Editable sites in AST order: (site_kind, elem_id, payload)."""
    out = []

    def path_sites(path, in_ec):
        for step in path.steps:
            if not in_ec:
                if not _is_plain_wildcard(step.node):
                    out.append(("pattern", step.node.elem_id, None))
                if not step.rep.is_default():
                    out.append(("step_rep", step.node.elem_id, step.rep))

    def branch_sites(branch):
        for arm in branch.arms:
            head = arm.path.steps[0].node.elem_id
            path_sites(arm.path, in_ec=False)
            out.append(("arm_rep", head, arm.rep))
            out.append(("arm", head, None))
            if arm.child is not None:
                branch_sites(arm.child)

    core = target.core
    if isinstance(core, NodeCore):
        if not _is_plain_wildcard(core.pattern):
            out.append(("pattern", core.pattern.elem_id, None))
    elif isinstance(core, PathCore):
        path_sites(core.path, in_ec=False)
    else:
        if not _is_plain_wildcard(core.root):
            out.append(("pattern", core.root.elem_id, None))
        branch_sites(core.branch)
    for clause in target.ec:
        head = clause.path.steps[0].node.elem_id
        out.append(("ec_rep", head, clause.occurrences))
    return out


def _rewrite(target, fn_pattern=None, fn_step=None, fn_arm=None, fn_clause=None):
    """Rebuild the AST applying the given element transformers."""

    def do_pattern(p):
        if fn_pattern is not None:
            q = fn_pattern(p)
            if q is not None:
                return q
        return p

    def do_path(path, in_ec):
        steps = []
        for step in path.steps:
            node = step.node if in_ec else do_pattern(step.node)
            rep = step.rep
            if not in_ec and fn_step is not None:
                new = fn_step(step)
                if new is not None:
                    rep = new
            steps.append(replace(step, node=node, rep=rep))
        return replace(path, steps=tuple(steps))

    def do_branch(branch):
        arms = []
        for arm in branch.arms:
            outcome = fn_arm(arm) if fn_arm is not None else None
            if outcome == "delete":
                continue
            rep = outcome if isinstance(outcome, Repetition) else arm.rep
            child = do_branch(arm.child) if arm.child is not None else None
            if child is not None and not child.arms:
                child = None
            arms.append(replace(arm, path=do_path(arm.path, False), rep=rep, child=child))
        return replace(branch, arms=tuple(arms))

    core = target.core
    if isinstance(core, NodeCore):
        core = NodeCore(pattern=do_pattern(core.pattern))
    elif isinstance(core, PathCore):
        core = PathCore(path=do_path(core.path, False))
    else:
        branch = do_branch(core.branch)
        root = do_pattern(core.root)
        core = NodeCore(pattern=root) if not branch.arms else SubtreeCore(root=root, branch=branch)
    clauses = []
    for clause in target.ec:
        occurrences = clause.occurrences
        if fn_clause is not None:
            new = fn_clause(clause)
            if new is not None:
                occurrences = new
        clauses.append(replace(clause, occurrences=occurrences))
    return replace(target, core=core, ec=tuple(clauses))


def apply_edit(target: QueryTarget, edit: RelaxEdit) -> QueryTarget:
    if edit.kind == NODE_TO_WILDCARD:
        def wildcardize(p):
            if p.elem_id == edit.elem_id:
                return NodePattern(kind=WILDCARD, elem_id=p.elem_id, span=p.span)
            return None
        return _rewrite(target, fn_pattern=wildcardize)
    if edit.kind == NODE_REPETITION:
        def widen_step(step):
            if step.node.elem_id == edit.elem_id:
                return edit.new_value
            return None
        return _rewrite(target, fn_step=widen_step)
    if edit.kind == PATH_REPETITION:
        def widen_arm(arm):
            if arm.path.steps[0].node.elem_id == edit.elem_id:
                return edit.new_value
            return None

        def widen_clause(clause):
            if clause.path.steps[0].node.elem_id == edit.elem_id:
                return edit.new_value
            return None
        return _rewrite(target, fn_arm=widen_arm, fn_clause=widen_clause)
    if edit.kind == DELETE_BRANCH_ARM:
        def delete_arm(arm):
            if arm.path.steps[0].node.elem_id == edit.elem_id:
                return "delete"
            return None
        return _rewrite(target, fn_arm=delete_arm)
    raise ValueError(f"unknown edit kind {edit.kind!r}")


# ---------------------------------------------------------------------------
# progress scoring (used only when no single edit fixes an item outright)

def _arm_feasible_children(arm, node, tree):
    count = 0
    for child in node.children:
        from .matcher import _iter_path_matches  # engine order, engine semantics
        for consumed in _iter_path_matches(arm.path, child, tree, None):
            end = consumed[-1][1]
            if arm.child is None or match_branch(arm.child, end, tree) is not None:
                count += 1
                break
    return count


def _core_score(core, start, tree):
    chain = tree.chain_to(start)
    if isinstance(core, NodeCore):
        return 1 if eval_node(core.pattern, start, chain) else 0
    if isinstance(core, PathCore):
        steps = core.path.steps
        for k in range(len(steps), 0, -1):
            prefix = replace(core.path, steps=steps[:k])
            if match_path(prefix, start, tree) is not None:
                return k
        return 0
    score = 1 if eval_node(core.root, start, chain) else 0
    for arm in core.branch.arms:
        feasible = _arm_feasible_children(arm, start, tree)
        score += min(feasible, max(arm.rep.min, 1))
    return score


def _progress_score(target, tree):
    best = 0
    for start in tree.preorder:
        score = _core_score(target.core, start, tree)
        for clause in target.ec:
            if eval_ec((clause,), start, tree):
                score += 1
        best = max(best, score)
    return best


# ---------------------------------------------------------------------------
# per-item relaxation

def _matches(target, tree):
    return len(match_tree(target, tree)) > 0


def _min_widenings(rep, test):
    """Candidate repetitions, smallest widening first; returns the first that passes
    `test`, else the widest attempted (for progress-driven application)."""
    tried = []
    for lo in range(rep.min - 1, -1, -1):
        cand = Repetition(lo, rep.max)
        tried.append(cand)
        if test(cand):
            return cand, True
    if rep.max is not None:
        for cand in (Repetition(rep.min, None), Repetition(0, None)):
            tried.append(cand)
            if test(cand):
                return cand, True
    return (tried[-1] if tried else None), False


def _ec_max_candidates(target, clause, tree):
    """Observed occurrence counts above the clause max, for minimal max widening."""
    from .matcher import count_path_instances
    counts = set()
    for start in tree.preorder:
        counts.add(count_path_instances(clause.path, start, tree))
    hi = clause.occurrences.max
    return sorted(c for c in counts if hi is not None and c > hi)


def _candidate_edits(target, tree):
    """All single edits in priority order, each paired with its edited target.

    Yields (edit, edited_target, fixes_item)."""
    sites = _sites(target)

    def clause_by_head(head):
        for clause in target.ec:
            if clause.path.steps[0].node.elem_id == head:
                return clause
        return None

    # 1. node -> wildcard
    for kind, elem, payload in sites:
        if kind != "pattern":
            continue
        edit = RelaxEdit(NODE_TO_WILDCARD, elem)
        edited = apply_edit(target, edit)
        yield edit, edited, _matches(edited, tree)
    # 2. node repetition
    for kind, elem, rep in sites:
        if kind != "step_rep":
            continue
        if rep.min == 0 and rep.max is None:
            continue

        def try_rep(cand, elem=elem):
            return _matches(apply_edit(target, RelaxEdit(NODE_REPETITION, elem, cand)), tree)

        cand, fixed = _min_widenings(rep, try_rep)
        if cand is not None and cand != rep:
            edit = RelaxEdit(NODE_REPETITION, elem, cand)
            yield edit, apply_edit(target, edit), fixed
    # 3. path repetition (branch arms, then composition occurrences)
    for kind, elem, rep in sites:
        if kind == "arm_rep":
            if rep.min == 0:
                continue

            def try_arm(cand, elem=elem):
                return _matches(apply_edit(target, RelaxEdit(PATH_REPETITION, elem, cand)), tree)

            cand, fixed = _min_widenings(rep, try_arm)
            if cand is not None and cand != rep:
                edit = RelaxEdit(PATH_REPETITION, elem, cand)
                yield edit, apply_edit(target, edit), fixed
        elif kind == "ec_rep":
            clause = clause_by_head(elem)
            tried = False
            for lo in range(rep.min - 1, -1, -1):
                cand = Repetition(lo, rep.max)
                edited = apply_edit(target, RelaxEdit(PATH_REPETITION, elem, cand))
                if _matches(edited, tree):
                    yield RelaxEdit(PATH_REPETITION, elem, cand), edited, True
                    tried = True
                    break
            if tried:
                continue
            for hi in _ec_max_candidates(target, clause, tree):
                cand = Repetition(rep.min, hi)
                edited = apply_edit(target, RelaxEdit(PATH_REPETITION, elem, cand))
                if _matches(edited, tree):
                    yield RelaxEdit(PATH_REPETITION, elem, cand), edited, True
                    tried = True
                    break
            if not tried and (rep.min > 0 or rep.max is not None):
                cand = Repetition(0, None)
                edit = RelaxEdit(PATH_REPETITION, elem, cand)
                yield edit, apply_edit(target, edit), False
    # 4. delete branch arm
    for kind, elem, payload in sites:
        if kind != "arm":
            continue
        edit = RelaxEdit(DELETE_BRANCH_ARM, elem)
        edited = apply_edit(target, edit)
        yield edit, edited, _matches(edited, tree)


def relax_for_item(seed: QueryTarget, tree):
    """Relax the seed until the tree matches; returns (expression, edits) or None."""
    current = seed
    edits = []
    for _ in range(MAX_EDITS_PER_ITEM):
        if _matches(current, tree):
            return current, tuple(edits)
        fix = None
        fallback = None
        base_score = None
        for edit, edited, fixes in _candidate_edits(current, tree):
            if fixes:
                fix = (edit, edited)
                break
            if fallback is None:
                if base_score is None:
                    base_score = _progress_score(current, tree)
                if _progress_score(edited, tree) > base_score:
                    fallback = (edit, edited)
        chosen = fix or fallback
        if chosen is None:
            return None
        edits.append(chosen[0])
        current = chosen[1]
    if _matches(current, tree):
        return current, tuple(edits)
    return None


# ---------------------------------------------------------------------------
# corpus-level recommendation

def recommend(seed: QueryTarget, corpus, k=10) -> list:
    seed_report = match_corpus(seed, corpus)
    already = set(seed_report.matched_tree_ids)
    merged = {}
    for tree in corpus.trees:
        if tree.tree_id in already:
            continue
        relaxed = relax_for_item(seed, tree)
        if relaxed is None:
            continue
        expression, edits = relaxed
        key = format_expr(expression)
        if key not in merged or len(edits) < len(merged[key][1]):
            merged[key] = (expression, edits)
    recs = []
    for expression, edits in merged.values():
        report = match_corpus(expression, corpus)
        recs.append(Recommendation(
            expression=expression,
            edits=edits,
            match_count=len(report.matched_tree_ids),
            matched_tree_ids=list(report.matched_tree_ids),
        ))
    recs.sort(key=lambda r: (
        len(r.edits),
        tuple(_PRIORITY[e.kind] for e in r.edits),
        -r.match_count,
        format_expr(r.expression),
    ))
    return recs[:k]


# ---------------------------------------------------------------------------
# serialization

def _edit_to_doc(edit: RelaxEdit) -> dict:
    doc = {"kind": edit.kind, "elem": edit.elem_id}
    if edit.new_value is not None:
        doc["min"] = edit.new_value.min
        doc["max"] = edit.new_value.max
    return doc


def recommendations_to_doc(recs) -> list:
    return [
        {
            "expr": format_expr(r.expression),
            "ast": ast_encode(r.expression),
            "count": r.match_count,
            "edits": [_edit_to_doc(e) for e in r.edits],
        }
        for r in recs
    ]


def recommendations_to_json(recs) -> bytes:
    return json.dumps(recommendations_to_doc(recs), separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")
