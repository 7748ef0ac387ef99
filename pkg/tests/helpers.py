"""Independent oracles and generators shared by the test modules."""

from __future__ import annotations

import itertools

from treequery.model import MultiTree, TreeNode


def build_tree(tree_id, spec):
    """spec = (node_id, attrs, [child_spec, ...])."""

    def build(node_spec):
        node_id, attrs, children = node_spec
        return TreeNode(id=node_id, attributes=dict(attrs),
                        children=[build(c) for c in children])

    return MultiTree(tree_id=tree_id, root=build(spec)).finalize()


def chain(tree_id, attrs_list):
    """A single downward chain; node ids are c1, c2, ..."""
    spec = None
    for i, attrs in reversed(list(enumerate(attrs_list, start=1))):
        spec = (f"c{i}", attrs, [spec] if spec else [])
    return build_tree(tree_id, spec)


def result_shape(results):
    """Comparable form of a match-result list."""
    return [
        (r.match_root, sorted((k, tuple(v)) for k, v in r.binding.items()))
        for r in results
    ]


# ---------------------------------------------------------------------------
# brute-force unordered-isomorphism check (oracle for topology keys)

def unordered_isomorphic(a: MultiTree, b: MultiTree) -> bool:
    def iso(x, y):
        if len(x.children) != len(y.children):
            return False
        if not x.children:
            return True
        for perm in itertools.permutations(range(len(y.children))):
            if all(iso(x.children[i], y.children[perm[i]]) for i in range(len(x.children))):
                return True
        return False

    return iso(a.root, b.root)


# ---------------------------------------------------------------------------
# exhaustive edit-script oracle for the tree edit distance
#
# Any unit-cost script normalizes to deletions from A down to a common
# forest C followed by insertions up to B, so the distance is
# |A| + |B| - 2 * max{|C| : C a deletion-minor of both}.  Minors are
# enumerated as kept-node subsets; a kept subset induces the forest where
# each kept node hangs under its nearest kept ancestor, order preserved.

def _minor_encoding(tree, kept_ids):
    def walk(node):
        parts = []
        for child in node.children:
            parts.extend(walk(child))
        if node.id in kept_ids:
            return ["(" + "".join(parts) + ")"]
        return parts

    return "".join(walk(tree.root))


def _minor_sizes(tree):
    ids = [n.id for n in tree.preorder]
    encodings = {}
    for r in range(len(ids) + 1):
        for kept in itertools.combinations(ids, r):
            encodings.setdefault(_minor_encoding(tree, set(kept)), r)
    return encodings


def oracle_tree_edit_distance(a: MultiTree, b: MultiTree) -> int:
    enc_a = _minor_sizes(a)
    enc_b = _minor_sizes(b)
    best = max(size for enc, size in enc_a.items() if enc in enc_b)
    return (a.root.inherent.size - best) + (b.root.inherent.size - best)
