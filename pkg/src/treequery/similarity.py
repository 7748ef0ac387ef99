"""Structural-similarity overview: topology grouping, edit distance, projection.

Trees with identical unordered topology are merged into groups; each group
gets a deterministic structural feature vector and the groups are projected
to 2D (t-SNE reimplemented at desk scale, or PCA).  A classic ordered-tree
edit distance ships alongside as the baseline metric it replaces: node
insertion and deletion cost one edit each while relabeling is free, since
only structure is compared here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

DEFAULT_TED_BOUND = 200

_LEVEL_SLOTS = 8   # per-level node counts for levels 1..8
_DEGREE_SLOTS = 9  # degree histogram 0..7 plus an 8+ overflow bucket

FEATURE_NAMES = tuple(
    ["size", "height", "width", "leaf_count", "mean_branching"]
    + [f"level_{i}" for i in range(1, _LEVEL_SLOTS + 1)]
    + [f"degree_{i}" for i in range(_DEGREE_SLOTS - 1)]
    + ["degree_overflow"]
)


class SizeBoundExceeded(ValueError):
    pass


@dataclass
class TopologyGroup:
    key: str
    member_tree_ids: list
    representative: object  # MultiTree


@dataclass
class ProjectionPoint:
    key: str
    x: float
    y: float
    cardinality: int
    member_tree_ids: list


# ---------------------------------------------------------------------------
# canonical topology keys (unordered rooted isomorphism)

def topology_key(tree) -> str:
    """AHU-style canonical encoding; equal keys iff unordered-isomorphic."""
    memo = {}

    def encode(node):
        if not node.children:
            key = "()"
        else:
            key = "(" + "".join(sorted(encode(c) for c in node.children)) + ")"
        memo[node.id] = key
        return key

    return encode(tree.root)


def group_by_topology(corpus) -> list:
    groups = {}
    order = []
    for tree in corpus.trees:
        key = topology_key(tree)
        if key not in groups:
            groups[key] = TopologyGroup(key=key, member_tree_ids=[], representative=tree)
            order.append(key)
        groups[key].member_tree_ids.append(tree.tree_id)
    return [groups[key] for key in order]


# ---------------------------------------------------------------------------
# ordered tree edit distance (Zhang-Shasha dynamic program)

def _postorder_arrays(root):
    """Post-order node list and leftmost-leaf-descendant indices."""
    nodes = []
    lmd = []

    def walk(node):
        first = None
        for child in node.children:
            leaf = walk(child)
            if first is None:
                first = leaf
        nodes.append(node)
        my_lmd = first if first is not None else len(nodes) - 1
        lmd.append(my_lmd)
        return my_lmd

    walk(root)
    return nodes, lmd


def _keyroots(lmd):
    # highest post-order index per distinct leftmost descendant
    last = {}
    for i, value in enumerate(lmd):
        last[value] = i
    return sorted(last.values())


def tree_edit_distance(a, b, size_bound=DEFAULT_TED_BOUND) -> int:
    """Unit-cost insert/delete, free relabel; 0 iff identical ordered structure."""
    for tree in (a, b):
        if tree.root.inherent.size > size_bound:
            raise SizeBoundExceeded(
                f"tree {tree.tree_id} has {tree.root.inherent.size} nodes, bound is {size_bound}")

    a_nodes, a_lmd = _postorder_arrays(a.root)
    b_nodes, b_lmd = _postorder_arrays(b.root)
    a_keyroots = _keyroots(a_lmd)
    b_keyroots = _keyroots(b_lmd)
    m, n = len(a_nodes), len(b_nodes)
    treedist = [[0] * n for _ in range(m)]

    for i in a_keyroots:
        for j in b_keyroots:
            ioff = a_lmd[i] - 1
            joff = b_lmd[j] - 1
            rows = i - a_lmd[i] + 2
            cols = j - b_lmd[j] + 2
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = fd[x - 1][0] + 1  # delete
            for y in range(1, cols):
                fd[0][y] = fd[0][y - 1] + 1  # insert
            for x in range(1, rows):
                for y in range(1, cols):
                    if a_lmd[i] == a_lmd[x + ioff] and b_lmd[j] == b_lmd[y + joff]:
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[x - 1][y - 1],  # relabel is free
                        )
                        treedist[x + ioff][y + joff] = fd[x][y]
                    else:
                        p = a_lmd[x + ioff] - 1 - ioff
                        q = b_lmd[y + joff] - 1 - joff
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[p][q] + treedist[x + ioff][y + joff],
                        )
    return treedist[m - 1][n - 1]


# ---------------------------------------------------------------------------
# structural features

def features(tree) -> list:
    """Deterministic structural descriptor; equal for unordered-isomorphic trees."""
    root = tree.root
    size = float(root.inherent.size)
    height = float(root.inherent.height)
    width = float(root.inherent.width)
    leaves = 0.0
    level_counts = [0.0] * _LEVEL_SLOTS
    degree_hist = [0.0] * _DEGREE_SLOTS
    internal = 0
    stack = [(root, 1)]
    while stack:
        node, depth = stack.pop()
        degree = len(node.children)
        if degree == 0:
            leaves += 1.0
        else:
            internal += 1
        if depth <= _LEVEL_SLOTS:
            level_counts[depth - 1] += 1.0
        degree_hist[min(degree, _DEGREE_SLOTS - 1)] += 1.0
        for child in node.children:
            stack.append((child, depth + 1))
    mean_branching = (size - 1.0) / internal if internal else 0.0
    return [size, height, width, leaves, mean_branching] + level_counts + degree_hist


# ---------------------------------------------------------------------------
# projection

def _normalize(matrix):
    mins = matrix.min(axis=0)
    maxs = matrix.max(axis=0)
    span = maxs - mins
    span[span == 0] = 1.0
    return (matrix - mins) / span


def _pca_2d(x):
    centered = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    coords = u[:, :2] * s[:2]
    if coords.shape[1] < 2:
        coords = np.hstack([coords, np.zeros((coords.shape[0], 2 - coords.shape[1]))])
    # fix the sign convention so the output is reproducible
    for col in range(coords.shape[1]):
        column = coords[:, col]
        if len(column) and column[np.argmax(np.abs(column))] < 0:
            coords[:, col] = -column
    return coords


def _tsne_2d(x, seed, iterations=500):
    n = x.shape[0]
    perplexity = max(1.0, min(30.0, n / 4.0))
    distances = np.square(x[:, None, :] - x[None, :, :]).sum(axis=2)

    # per-point precision via binary search to hit the target perplexity
    p = np.zeros((n, n))
    log_perp = np.log(perplexity)
    for i in range(n):
        beta_lo, beta_hi = 0.0, np.inf
        beta = 1.0
        di = np.delete(distances[i], i)
        for _ in range(50):
            weights = np.exp(-di * beta)
            total = weights.sum()
            if total <= 1e-12:
                entropy = 0.0
                probs = np.zeros_like(weights)
            else:
                probs = weights / total
                entropy = -(probs * np.log(np.maximum(probs, 1e-12))).sum()
            if abs(entropy - log_perp) < 1e-5:
                break
            if entropy > log_perp:
                beta_lo = beta
                beta = beta * 2 if beta_hi == np.inf else (beta + beta_hi) / 2
            else:
                beta_hi = beta
                beta = beta / 2 if beta_lo == 0.0 else (beta + beta_lo) / 2
        row = np.insert(probs, i, 0.0)
        p[i] = row
    p = (p + p.T) / (2.0 * n)
    p = np.maximum(p, 1e-12)

    rng = np.random.RandomState(seed)
    y = rng.normal(0.0, 1e-4, (n, 2))
    gains = np.ones_like(y)
    velocity = np.zeros_like(y)
    exaggeration = 12.0
    for it in range(iterations):
        pk = p * exaggeration if it < 100 else p
        diff = y[:, None, :] - y[None, :, :]
        dist2 = np.square(diff).sum(axis=2)
        inv = 1.0 / (1.0 + dist2)
        np.fill_diagonal(inv, 0.0)
        q = np.maximum(inv / inv.sum(), 1e-12)
        factor = (pk - q) * inv
        grad = 4.0 * (factor[:, :, None] * diff).sum(axis=1)
        momentum = 0.5 if it < 250 else 0.8
        sign_agree = np.sign(grad) == np.sign(velocity)
        gains = np.where(sign_agree, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - 200.0 * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)
    return y


def project(corpus, method="tsne", seed=0) -> list:
    """One 2D point per topology group; deterministic given (method, seed)."""
    groups = group_by_topology(corpus)
    if not groups:
        return []
    if len(groups) == 1:
        coords = [(0.0, 0.0)]
    elif len(groups) == 2:
        coords = [(-1.0, 0.0), (1.0, 0.0)]
    else:
        matrix = _normalize(np.array([features(g.representative) for g in groups], dtype=float))
        if method == "pca":
            xy = _pca_2d(matrix)
        elif method == "tsne":
            xy = _tsne_2d(matrix, seed)
        else:
            raise ValueError(f"unknown projection method {method!r}")
        coords = [(float(a), float(b)) for a, b in xy]
    return [
        ProjectionPoint(key=g.key, x=c[0], y=c[1],
                        cardinality=len(g.member_tree_ids),
                        member_tree_ids=list(g.member_tree_ids))
        for g, c in zip(groups, coords)
    ]


def projection_to_doc(points) -> list:
    return [
        {"key": p.key, "x": p.x, "y": p.y, "n": p.cardinality, "members": p.member_tree_ids}
        for p in points
    ]


def projection_to_json(points) -> bytes:
    return json.dumps(projection_to_doc(points), separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")
