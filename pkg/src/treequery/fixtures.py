"""Synthetic corpora and expression suites used by tests and the CLI.

The citation fixture is a deterministic stand-in for the crawled citation
dataset the original analyses ran on: it plants trees that the shipped
example expressions provably match (confirmed by the exhaustive oracle at
emission time) plus seeded random filler.  The random generators produce
trees and canonical-form query targets for differential testing.
"""

from __future__ import annotations

import json
import random

from .ast import (
    CUSTOM, EQ, EXISTS, FORALL, GE, GT, IN, LE, LEAF, LT, ROOT, WILDCARD,
    AbsoluteRef, BranchArm, BranchPattern, ECClause, NodeCore, NodePattern,
    PathCore, PathPattern, PathStep, Predicate, QueryTarget, Repetition,
    RelativeRef, SubtreeCore, renumber,
)
from .model import Corpus, MultiTree, TreeNode, _infer_schema


# ---------------------------------------------------------------------------
# random trees

def random_tree(rng: random.Random, tree_id: str, max_nodes=40, max_children=4) -> MultiTree:
    """Random tree with the test attribute schema: v (number), tag (text), kw (list)."""
    target_size = rng.randint(1, max_nodes)
    counter = [0]

    def make_node():
        counter[0] += 1
        attrs = {}
        if rng.random() < 0.8:
            attrs["v"] = float(rng.randint(0, 9))
        if rng.random() < 0.6:
            attrs["tag"] = rng.choice(["a", "b", "c"])
        if rng.random() < 0.4:
            attrs["kw"] = tuple(sorted(rng.sample(["x", "y", "z"], rng.randint(1, 3))))
        return TreeNode(id=f"{tree_id}:{counter[0]}", attributes=attrs, children=[])

    root = make_node()
    frontier = [root]
    while counter[0] < target_size and frontier:
        parent = frontier.pop(rng.randrange(len(frontier)))
        n_children = rng.randint(0, min(max_children, target_size - counter[0]))
        for _ in range(n_children):
            child = make_node()
            parent.children.append(child)
            frontier.append(child)
    return MultiTree(tree_id=tree_id, root=root).finalize()


def random_corpus(rng: random.Random, n_trees=10, max_nodes=20, max_children=4) -> Corpus:
    trees = [random_tree(rng, f"t{i}", max_nodes, max_children) for i in range(n_trees)]
    return Corpus(trees=trees, attribute_schema=_infer_schema(trees))


# ---------------------------------------------------------------------------
# random query targets (canonical form)

_NUMERIC_ATTRS = ("v", "depth", "size", "height", "width", "degree")
_REPS = (
    Repetition(1, 1), Repetition(0, 1), Repetition(1, 2), Repetition(2, 2),
    Repetition(2, 3), Repetition(0, None), Repetition(1, None), Repetition(2, None),
    Repetition(0, 2), Repetition(1, 3),
)


def _random_predicate(rng):
    if rng.random() < 0.55:
        attr = rng.choice(_NUMERIC_ATTRS)
        op = rng.choice((GT, GE, LT, LE, EQ))
        roll = rng.random()
        if roll < 0.15:
            rhs = RelativeRef(-rng.randint(1, 2))
        elif roll < 0.25:
            rhs = AbsoluteRef(rng.randint(1, 2))
        else:
            high = 9 if attr in ("v", "degree") else 12
            rhs = float(rng.randint(0, high))
        return Predicate(attribute=attr, op=op, rhs=rhs)
    if rng.random() < 0.5:
        if rng.random() < 0.5:
            return Predicate(attribute="tag", op=EQ, rhs=rng.choice(["a", "b", "c"]))
        return Predicate(attribute="tag", op=IN,
                         rhs=tuple(sorted(rng.sample(["a", "b", "c"], rng.randint(1, 2)))))
    if rng.random() < 0.5:
        return Predicate(attribute="kw", op=IN,
                         rhs=tuple(sorted(rng.sample(["x", "y", "z"], rng.randint(1, 2)))))
    return Predicate(attribute="kw", op=EQ, rhs=rng.choice(["x", "y", "z"]))


def _random_atom(rng, allow_root, allow_leaf):
    roll = rng.random()
    if roll < 0.18:
        kind, preds = WILDCARD, ()
    elif roll < 0.23 and allow_root:
        kind, preds = ROOT, ()
    elif roll < 0.32 and allow_leaf:
        kind, preds = LEAF, ()
    else:
        kind = CUSTOM
        preds = tuple(_random_predicate(rng) for _ in range(rng.randint(1, 2)))
    negated = rng.random() < 0.15
    return NodePattern(kind=kind, predicates=preds, negated=negated)


def _random_pattern(rng, allow_root=False, allow_leaf=False):
    atom = _random_atom(rng, allow_root, allow_leaf)
    if rng.random() < 0.15:
        alt = _random_atom(rng, allow_root, allow_leaf)
        atom = NodePattern(kind=atom.kind, predicates=atom.predicates,
                           negated=atom.negated, alt=alt)
    return atom


def _random_rep(rng):
    return rng.choice(_REPS)


def _random_path(rng, max_steps=3, allow_anchors=True):
    n_steps = rng.randint(1, max_steps)
    steps = []
    for i in range(n_steps):
        node = _random_pattern(rng,
                               allow_root=allow_anchors and i == 0,
                               allow_leaf=allow_anchors and i == n_steps - 1)
        steps.append(PathStep(node=node, rep=_random_rep(rng)))
    return PathPattern(steps=tuple(steps))


def _random_branch(rng, depth=0):
    arms = []
    for _ in range(rng.randint(1, 2)):
        child = _random_branch(rng, depth + 1) if depth == 0 and rng.random() < 0.2 else None
        arms.append(BranchArm(
            path=_random_path(rng, max_steps=2, allow_anchors=False),
            rep=rng.choice((Repetition(0, None), Repetition(1, None), Repetition(1, 2),
                            Repetition(2, None), Repetition(1, 1), Repetition(0, 2))),
            child=child,
        ))
    return BranchPattern(arms=tuple(arms))


def random_target(rng: random.Random) -> QueryTarget:
    roll = rng.random()
    if roll < 0.3:
        core = NodeCore(pattern=_random_pattern(rng, allow_root=True, allow_leaf=True))
    elif roll < 0.7:
        path = _random_path(rng)
        # canonical form: a one-step default-repetition path is a node target
        if len(path.steps) == 1 and path.steps[0].rep.is_default():
            core = NodeCore(pattern=path.steps[0].node)
        else:
            core = PathCore(path=path)
    else:
        core = SubtreeCore(root=_random_pattern(rng), branch=_random_branch(rng))
    ec = ()
    if rng.random() < 0.35:
        quant = EXISTS if rng.random() < 0.75 else FORALL
        ec = (ECClause(
            quantifier=quant,
            path=_random_path(rng, max_steps=2, allow_anchors=False),
            occurrences=rng.choice((Repetition(0, None), Repetition(1, None),
                                    Repetition(2, None), Repetition(1, 3),
                                    Repetition(0, 2))),
        ),)
    return renumber(QueryTarget(core=core, ec=ec))


# ---------------------------------------------------------------------------
# the synthetic citation fixture

_TOPICS = ("graph", "deep learning", "immersive", "evaluation", "volume rendering",
           "time series", "text")
_AUTHORS = ("Ben Shneiderman", "Li Wei", "A. Chen", "M. Novak", "R. Gomez",
            "S. Tanaka", "J. Park", "E. Dubois")


class _PaperFactory:
    def __init__(self, rng):
        self.rng = rng
        self.counter = 0

    def paper(self, tree_id, *, year=None, citation=None, topics=None, authors=None):
        self.counter += 1
        rng = self.rng
        return TreeNode(
            id=f"{tree_id}:p{self.counter}",
            attributes={
                "year": float(year if year is not None else rng.randint(2014, 2020)),
                "citation": float(citation if citation is not None else rng.randint(0, 180)),
                "topics": tuple(sorted(set(topics if topics is not None
                                           else rng.sample(_TOPICS, rng.randint(1, 2))))),
                "authors": tuple(sorted(set(authors if authors is not None
                                            else rng.sample(_AUTHORS, rng.randint(1, 3))))),
            },
            children=[],
        )


def _filler_children(factory, tree_id, parent, depth, max_depth):
    rng = factory.rng
    if depth >= max_depth:
        return
    for _ in range(rng.randint(0, 3)):
        child = factory.paper(tree_id)
        parent.children.append(child)
        _filler_children(factory, tree_id, child, depth + 1, max_depth)


def citation_corpus() -> Corpus:
    """Deterministic citation-tree fixture with planted example-expression targets."""
    rng = random.Random(20240917)
    factory = _PaperFactory(rng)
    trees = []

    def finish(tree_id, root):
        trees.append(MultiTree(tree_id=tree_id, root=root).finalize())

    # A chain of four consecutive same-author papers (long iterative line of work).
    tid = "chain_shneiderman"
    top = factory.paper(tid, authors=["Ben Shneiderman"], topics=["graph"])
    cur = top
    for _ in range(3):
        nxt = factory.paper(tid, authors=["Ben Shneiderman", "A. Chen"])
        cur.children.append(nxt)
        _filler_children(factory, tid, cur, 2, 3)
        cur = nxt
    finish(tid, top)

    # One author node whose children include three highly cited papers.
    tid = "star_shneiderman"
    top = factory.paper(tid, authors=["Ben Shneiderman"], citation=350)
    for cite in (250, 200, 410):
        top.children.append(factory.paper(tid, citation=cite))
    top.children.append(factory.paper(tid, citation=40))
    _filler_children(factory, tid, top.children[-1], 2, 3)
    finish(tid, top)

    # A 2019 paper whose subtree holds exactly ten highly cited papers.
    tid = "hub_2019"
    top = factory.paper(tid, year=2019, citation=500)
    planted = 1 if top.attributes["citation"] >= 200 else 0
    level = [top]
    while planted < 10:
        parent = rng.choice(level)
        child = factory.paper(tid, citation=rng.choice((220, 260, 300)), year=rng.randint(2019, 2020))
        parent.children.append(child)
        level.append(child)
        planted += 1
    for _ in range(6):
        parent = rng.choice(level)
        parent.children.append(factory.paper(tid, citation=rng.randint(0, 150)))
    finish(tid, top)

    # Graph-topic papers cited by k deep-learning papers, k = 0..6.
    for k in (0, 1, 1, 2, 2, 2, 5, 6):
        tid = f"graph_dl_{k}_{factory.counter}"
        top = factory.paper(tid, topics=["graph"], citation=rng.randint(12, 120))
        for _ in range(k):
            top.children.append(factory.paper(tid, topics=["deep learning"],
                                              year=rng.randint(2018, 2020)))
        for _ in range(rng.randint(0, 2)):
            top.children.append(factory.paper(tid, topics=["evaluation"]))
        _filler_children(factory, tid, top, 2, 3)
        finish(tid, top)

    # Random filler trees.
    for i in range(20):
        tid = f"filler_{i}"
        top = factory.paper(tid)
        _filler_children(factory, tid, top, 1, rng.randint(2, 4))
        finish(tid, top)

    return Corpus(trees=trees, attribute_schema=_infer_schema(trees))


# The §4.2 grammar examples and the case-study expressions, in the concrete syntax.
PAPER_EXPRESSIONS = {
    "author_chain": '(authors="Ben Shneiderman"){3,}',
    "author_star": '(authors="Ben Shneiderman")[<(citation>=200)>{3,}]',
    "influential_2019": '(year=2019)[<(.){0,}>{0,}] - exists <(citation>=200)>{10,}',
    "graph_topic": '(topics in ["graph"])',
    "graph_dl_citers": '(topics in ["graph"])[<(topics in ["deep learning"])>{5,}]',
}

# Category-coverage suite: target kind x feature/position constraints.
COVERAGE_EXPRESSIONS = {
    "node_feature_citation": "(citation>=200)",
    "node_feature_topic": '(topics in ["graph"])',
    "node_position_depth": "(depth=3)",
    "node_position_leaf": "$",
    "node_position_parent_ref": "(degree=&-1)",
    "node_position_root_ref": "(degree=#1)",
    "path_feature_topics": '(topics in ["graph"])/(topics in ["deep learning"])',
    "path_feature_chain": '(authors="Ben Shneiderman"){3,}',
    "path_position_from_root": "^/./(citation>=100)",
    "path_position_to_leaf": "(year>=2018)/$",
    "subtree_feature_citers": "(citation>=100)[<(citation>=200)>{2,}]",
    "subtree_position_root": "^[<(year>=2019)>{1,}, <(year<2019)>{1,}]",
    "tree_feature_exists": "^[<.{0,}>{0,}] - exists <(citation>=200)>{3,}",
    "tree_feature_forall": "^[<.{0,}>{0,}] - forall <(year>=2014)>{1,}",
    "tree_position_depth": "^[<./(depth=3)>{1,}]",
}


# ---------------------------------------------------------------------------
# clustered corpus for projection tests

def _chain_tree(rng, tree_id, length, extra):
    nodes = [TreeNode(id=f"{tree_id}:{i}", attributes={}, children=[]) for i in range(length + extra)]
    for i in range(length - 1):
        nodes[i].children.append(nodes[i + 1])
    for j in range(extra):
        nodes[rng.randrange(length)].children.append(nodes[length + j])
    return MultiTree(tree_id=tree_id, root=nodes[0]).finalize()


def _star_tree(rng, tree_id, leaves, extra):
    counter = [0]

    def node():
        counter[0] += 1
        return TreeNode(id=f"{tree_id}:{counter[0]}", attributes={}, children=[])

    root = node()
    for _ in range(leaves):
        root.children.append(node())
    for _ in range(extra):
        rng.choice(root.children).children.append(node())
    return MultiTree(tree_id=tree_id, root=root).finalize()


def _binary_tree(rng, tree_id, depth, extra):
    counter = [0]

    def build(d):
        counter[0] += 1
        n = TreeNode(id=f"{tree_id}:{counter[0]}", attributes={}, children=[])
        if d > 1:
            n.children.append(build(d - 1))
            n.children.append(build(d - 1))
        return n

    root = build(depth)
    all_nodes = []
    stack = [root]
    while stack:
        n = stack.pop()
        all_nodes.append(n)
        stack.extend(n.children)
    for _ in range(extra):
        counter[0] += 1
        rng.choice(all_nodes).children.append(
            TreeNode(id=f"{tree_id}:{counter[0]}", attributes={}, children=[]))
    return MultiTree(tree_id=tree_id, root=root).finalize()


def clustered_corpus(seed=7, per_cluster=12) -> Corpus:
    """Three template topologies with small perturbations; used by projection tests."""
    rng = random.Random(seed)
    trees = []
    for i in range(per_cluster):
        trees.append(_chain_tree(rng, f"c0_{i}", length=12, extra=rng.randint(0, 2)))
    for i in range(per_cluster):
        trees.append(_star_tree(rng, f"c1_{i}", leaves=12, extra=rng.randint(0, 2)))
    for i in range(per_cluster):
        trees.append(_binary_tree(rng, f"c2_{i}", depth=4, extra=rng.randint(0, 2)))
    return Corpus(trees=trees, attribute_schema=_infer_schema(trees))


# ---------------------------------------------------------------------------
# fixture emission (CLI `fixtures` command)

def write_fixtures(out_dir):
    """Write the citation corpus, the expression suites and oracle-derived counts."""
    import os

    from .model import dump_corpus
    from .oracle import oracle_match
    from .parser import parse

    os.makedirs(out_dir, exist_ok=True)
    corpus = citation_corpus()
    with open(os.path.join(out_dir, "citation_corpus.json"), "wb") as fh:
        fh.write(dump_corpus(corpus))

    expressions = {}
    counts = {}
    for name, text in {**PAPER_EXPRESSIONS, **COVERAGE_EXPRESSIONS}.items():
        target = parse(text)
        from .ast import ast_encode
        expressions[name] = {"expr": text, "ast": ast_encode(target)}
        matched = []
        for tree in corpus.trees:
            if oracle_match(target, tree, size_bound=10_000):
                matched.append(tree.tree_id)
        counts[name] = {"matched_trees": len(matched), "tree_ids": matched}
    with open(os.path.join(out_dir, "expressions.json"), "w", encoding="utf-8") as fh:
        json.dump(expressions, fh, indent=2, ensure_ascii=False)
    with open(os.path.join(out_dir, "expected_counts.json"), "w", encoding="utf-8") as fh:
        json.dump(counts, fh, indent=2, ensure_ascii=False)
    return corpus, expressions, counts
