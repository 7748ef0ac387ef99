"""Corpus data model: multivariate trees, inherent attributes, loading and stats.

A corpus is an ordered collection of rooted ordered trees whose nodes carry
named attribute values (numbers, text, or sets of text).  On load every node
additionally gets computed *inherent* attributes derived from the topology:
depth, size, height, width and degree.  The corpus is immutable after load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

# Attribute values are a finite float, a string, or a sorted tuple of
# unique strings (the "set of text" kind).
INHERENT_NAMES = ("depth", "size", "height", "width", "degree")

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class CorpusError(ValueError):
    """Base class for corpus ingestion failures."""


class MalformedDocument(CorpusError):
    pass


class DuplicateNodeId(CorpusError):
    pass


class MixedAttributeKind(CorpusError):
    pass


@dataclass
class InherentAttrs:
    depth: int = 0
    size: int = 0
    height: int = 0
    width: int = 0
    degree: int = 0

    def get(self, name):
        return float(getattr(self, name))


@dataclass
class TreeNode:
    id: str
    attributes: dict
    children: list
    inherent: InherentAttrs = field(default_factory=InherentAttrs)

    def is_leaf(self):
        return not self.children


@dataclass
class MultiTree:
    tree_id: str
    root: TreeNode
    node_index: dict = field(default_factory=dict)
    # derived navigation caches, filled by finalize()
    parents: dict = field(default_factory=dict)
    preorder: list = field(default_factory=list)

    @property
    def size(self):
        return self.root.inherent.size

    def finalize(self):
        """Index nodes, compute inherent attributes and navigation caches."""
        compute_inherent(self)
        self.node_index = {}
        self.parents = {}
        self.preorder = []
        stack = [(self.root, None)]
        order = []
        while stack:
            node, parent = stack.pop()
            order.append(node)
            self.node_index[node.id] = node
            self.parents[node.id] = parent
            for child in reversed(node.children):
                stack.append((child, node))
        self.preorder = order
        return self

    def chain_to(self, node):
        """Root-to-node chain, inclusive."""
        chain = []
        cur = node
        while cur is not None:
            chain.append(cur)
            cur = self.parents[cur.id]
        chain.reverse()
        return chain


@dataclass
class AttributeSchema:
    kind: str  # NUMERIC or CATEGORICAL
    min_value: float | None = None
    max_value: float | None = None
    values: set = field(default_factory=set)


@dataclass
class Corpus:
    trees: list
    attribute_schema: dict

    def tree(self, tree_id):
        for t in self.trees:
            if t.tree_id == tree_id:
                return t
        raise KeyError(tree_id)

    @property
    def node_count(self):
        return sum(t.size for t in self.trees)


def compute_inherent(tree: MultiTree) -> MultiTree:
    """Fill every node's inherent attributes from the topology.

    Iterative post-order so deep chains do not hit the recursion limit.
    Idempotent: values depend only on the current topology.
    """
    # depth: top-down
    stack = [(tree.root, 1)]
    post = []
    while stack:
        node, depth = stack.pop()
        node.inherent.depth = depth
        node.inherent.degree = len(node.children)
        post.append(node)
        for child in node.children:
            stack.append((child, depth + 1))
    # size/height/width: bottom-up over the reversed DFS order.
    # levels[id] = node counts per relative level of that node's subtree.
    levels = {}
    for node in reversed(post):
        if not node.children:
            node.inherent.size = 1
            node.inherent.height = 1
            node.inherent.width = 1
            levels[node.id] = [1]
            continue
        merged = [1]
        size = 1
        for child in node.children:
            sub = levels.pop(child.id)
            size += child.inherent.size
            for i, count in enumerate(sub):
                if i + 1 < len(merged):
                    merged[i + 1] += count
                else:
                    merged.append(count)
        node.inherent.size = size
        node.inherent.height = len(merged)
        node.inherent.width = max(merged)
        levels[node.id] = merged
    return tree


def _coerce_value(raw, where):
    if isinstance(raw, bool):
        raise MalformedDocument(f"{where}: boolean attribute values are not supported")
    if isinstance(raw, (int, float)):
        value = float(raw)
        if not math.isfinite(value):
            raise MalformedDocument(f"{where}: numeric attribute values must be finite")
        return value
    if isinstance(raw, str):
        return raw
    if isinstance(raw, list):
        if not all(isinstance(v, str) for v in raw):
            raise MalformedDocument(f"{where}: list attribute values must contain only strings")
        return tuple(sorted(set(raw)))
    raise MalformedDocument(f"{where}: unsupported attribute value {raw!r}")


def value_kind(value) -> str:
    return NUMERIC if isinstance(value, float) else CATEGORICAL


def _parse_node(doc, tree_id, seen_ids):
    if not isinstance(doc, dict):
        raise MalformedDocument(f"tree {tree_id!r}: node must be an object")
    unknown = set(doc) - {"id", "attributes", "children"}
    if unknown:
        raise MalformedDocument(f"tree {tree_id!r}: unknown node fields {sorted(unknown)}")
    node_id = doc.get("id")
    if not isinstance(node_id, str) or not node_id:
        raise MalformedDocument(f"tree {tree_id!r}: node id must be a non-empty string")
    if node_id in seen_ids:
        raise DuplicateNodeId(f"node id {node_id!r} appears more than once")
    seen_ids.add(node_id)
    attrs = {}
    raw_attrs = doc.get("attributes", {})
    if not isinstance(raw_attrs, dict):
        raise MalformedDocument(f"node {node_id!r}: attributes must be an object")
    for name, raw in raw_attrs.items():
        if name in INHERENT_NAMES:
            raise MalformedDocument(
                f"node {node_id!r}: attribute name {name!r} is reserved for inherent attributes"
            )
        attrs[name] = _coerce_value(raw, f"node {node_id!r} attribute {name!r}")
    children_doc = doc.get("children", [])
    if not isinstance(children_doc, list):
        raise MalformedDocument(f"node {node_id!r}: children must be a list")
    children = [_parse_node(c, tree_id, seen_ids) for c in children_doc]
    return TreeNode(id=node_id, attributes=attrs, children=children)


def _infer_schema(trees):
    schema = {}
    for tree in trees:
        for node in tree.preorder:
            for name, value in node.attributes.items():
                kind = value_kind(value)
                entry = schema.get(name)
                if entry is None:
                    entry = schema[name] = AttributeSchema(kind=kind)
                elif entry.kind != kind:
                    raise MixedAttributeKind(
                        f"attribute {name!r} is used as both numeric and categorical"
                    )
                if kind == NUMERIC:
                    entry.min_value = value if entry.min_value is None else min(entry.min_value, value)
                    entry.max_value = value if entry.max_value is None else max(entry.max_value, value)
                elif isinstance(value, str):
                    entry.values.add(value)
                else:
                    entry.values.update(value)
    return schema


def load_corpus(document) -> Corpus:
    """Parse a corpus document (bytes or str of UTF-8 JSON) into a Corpus.

    An empty tree list is valid and yields a corpus with zero trees.
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        top = json.loads(document, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(top, dict) or set(top) != {"trees"} or not isinstance(top["trees"], list):
        raise MalformedDocument('corpus document must be {"trees": [...]}')
    trees = []
    seen_node_ids = set()
    seen_tree_ids = set()
    for tree_doc in top["trees"]:
        if not isinstance(tree_doc, dict) or set(tree_doc) != {"tree_id", "root"}:
            raise MalformedDocument('each tree must be {"tree_id": ..., "root": ...}')
        tree_id = tree_doc["tree_id"]
        if not isinstance(tree_id, str) or not tree_id:
            raise MalformedDocument("tree_id must be a non-empty string")
        if tree_id in seen_tree_ids:
            raise MalformedDocument(f"duplicate tree_id {tree_id!r}")
        seen_tree_ids.add(tree_id)
        root = _parse_node(tree_doc["root"], tree_id, seen_node_ids)
        trees.append(MultiTree(tree_id=tree_id, root=root).finalize())
    return Corpus(trees=trees, attribute_schema=_infer_schema(trees))


def _reject_constant(name):
    raise MalformedDocument(f"non-finite JSON constant {name!r} is not allowed")


def _node_to_doc(node: TreeNode) -> dict:
    attrs = {}
    for name in sorted(node.attributes):
        value = node.attributes[name]
        attrs[name] = list(value) if isinstance(value, tuple) else value
    return {
        "id": node.id,
        "attributes": attrs,
        "children": [_node_to_doc(c) for c in node.children],
    }


def corpus_to_doc(corpus: Corpus) -> dict:
    return {
        "trees": [
            {"tree_id": t.tree_id, "root": _node_to_doc(t.root)} for t in corpus.trees
        ]
    }


def dump_corpus(corpus: Corpus) -> bytes:
    """Canonical serialization; load_corpus(dump_corpus(c)) is structurally identical."""
    return json.dumps(corpus_to_doc(corpus), separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _distribution(values):
    if not values:
        return {"min": None, "max": None, "histogram": []}
    counts = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return {
        "min": min(values),
        "max": max(values),
        "histogram": [[v, counts[v]] for v in sorted(counts)],
    }


def corpus_stats(corpus: Corpus) -> dict:
    """Summary used by the stats endpoint and the data-distribution panel."""
    attrs = {}
    for name in sorted(corpus.attribute_schema):
        entry = corpus.attribute_schema[name]
        if entry.kind == NUMERIC:
            attrs[name] = {"kind": NUMERIC, "min": entry.min_value, "max": entry.max_value}
        else:
            attrs[name] = {"kind": CATEGORICAL, "values": sorted(entry.values)}
    return {
        "trees": len(corpus.trees),
        "nodes": corpus.node_count if corpus.trees else 0,
        "attributes": attrs,
        "size": _distribution([t.root.inherent.size for t in corpus.trees]),
        "height": _distribution([t.root.inherent.height for t in corpus.trees]),
        "width": _distribution([t.root.inherent.width for t in corpus.trees]),
    }


def stats_to_json(stats: dict) -> bytes:
    return json.dumps(stats, separators=(",", ":"), ensure_ascii=False).encode("utf-8")
