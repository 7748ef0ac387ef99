import math
import random

import pytest

from treequery.fixtures import clustered_corpus, random_corpus, random_tree
from treequery.model import MultiTree, TreeNode, _infer_schema
from treequery.similarity import (
    SizeBoundExceeded, features, group_by_topology, project, projection_to_doc,
    topology_key, tree_edit_distance,
)

from helpers import (
    build_tree, chain, oracle_tree_edit_distance, unordered_isomorphic,
)


def test_topology_key_single_node():
    assert topology_key(build_tree("t", ("a", {}, []))) == "()"


def test_topology_key_ignores_child_order():
    a = build_tree("a", ("r", {}, [("x", {}, [("y", {}, [])]), ("z", {}, [])]))
    b = build_tree("b", ("r2", {}, [("z2", {}, []), ("x2", {}, [("y2", {}, [])])]))
    assert topology_key(a) == topology_key(b)


def test_topology_key_ignores_attributes():
    a = build_tree("a", ("r", {"v": 1.0}, [("x", {"tag": "q"}, [])]))
    b = build_tree("b", ("r2", {}, [("x2", {}, [])]))
    assert topology_key(a) == topology_key(b)


def test_topology_key_matches_isomorphism_oracle():
    rng = random.Random(30)
    trees = [random_tree(rng, f"t{i}", max_nodes=12, max_children=3) for i in range(60)]
    agree = 0
    for i in range(len(trees)):
        for j in range(i + 1, len(trees)):
            same_key = topology_key(trees[i]) == topology_key(trees[j])
            iso = unordered_isomorphic(trees[i], trees[j])
            assert same_key == iso, (trees[i].tree_id, trees[j].tree_id)
            agree += same_key
    assert agree > 0  # the sample contains some isomorphic pairs


def test_edit_distance_identical_trees():
    rng = random.Random(31)
    for i in range(10):
        tree = random_tree(rng, f"t{i}", max_nodes=15)
        assert tree_edit_distance(tree, tree) == 0


def test_edit_distance_level_profile_critique():
    # deep shape: root -> mid -> four leaves; shallow: root -> four leaves.
    # one delete relates them despite very different level profiles.
    deep = build_tree("deep", ("r", {}, [("m", {}, [
        ("a", {}, []), ("b", {}, []), ("c", {}, []), ("d", {}, [])])]))
    shallow = build_tree("shallow", ("r2", {}, [
        ("a2", {}, []), ("b2", {}, []), ("c2", {}, []), ("d2", {}, [])]))
    expected = oracle_tree_edit_distance(deep, shallow)
    assert expected == 1
    assert tree_edit_distance(deep, shallow) == expected
    assert features(deep)[5:13] != features(shallow)[5:13]  # level profiles differ


def test_edit_distance_against_script_oracle():
    rng = random.Random(32)
    for i in range(120):
        a = random_tree(rng, f"a{i}", max_nodes=8, max_children=3)
        b = random_tree(rng, f"b{i}", max_nodes=8, max_children=3)
        assert tree_edit_distance(a, b) == oracle_tree_edit_distance(a, b)


def test_edit_distance_symmetry_and_triangle():
    rng = random.Random(33)
    trees = [random_tree(rng, f"t{i}", max_nodes=12) for i in range(15)]
    for a in trees:
        assert tree_edit_distance(a, a) == 0
    for i in range(len(trees)):
        for j in range(i + 1, len(trees)):
            assert tree_edit_distance(trees[i], trees[j]) == \
                tree_edit_distance(trees[j], trees[i])
    for _ in range(60):
        a, b, c = rng.sample(trees, 3)
        assert tree_edit_distance(a, c) <= \
            tree_edit_distance(a, b) + tree_edit_distance(b, c)


def test_edit_distance_size_bound():
    deep = chain("t", [{} for _ in range(30)])
    with pytest.raises(SizeBoundExceeded):
        tree_edit_distance(deep, deep, size_bound=10)


def test_features_single_node():
    vec = features(build_tree("t", ("a", {}, [])))
    assert vec[0:4] == [1.0, 1.0, 1.0, 1.0]
    assert vec[4] == 0.0  # no internal nodes
    assert vec[5:13] == [1.0, 0, 0, 0, 0, 0, 0, 0]


def test_features_chain_of_five():
    vec = features(chain("t", [{} for _ in range(5)]))
    assert vec[5:13] == [1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    degree_hist = vec[13:]
    assert degree_hist[0] == 1.0  # one leaf
    assert degree_hist[1] == 4.0  # four degree-1 nodes


def test_features_random_tree_recount():
    rng = random.Random(34)
    for i in range(15):
        tree = random_tree(rng, f"t{i}", max_nodes=25)
        vec = features(tree)
        nodes = tree.preorder
        assert vec[0] == len(nodes)
        assert vec[3] == sum(1 for n in nodes if not n.children)
        for level in range(1, 9):
            assert vec[4 + level] == sum(1 for n in nodes if n.inherent.depth == level)
        for degree in range(8):
            assert vec[13 + degree] == sum(1 for n in nodes if len(n.children) == degree)
        assert vec[21] == sum(1 for n in nodes if len(n.children) >= 8)


def test_features_equal_for_isomorphic_trees():
    a = build_tree("a", ("r", {}, [("x", {}, [("y", {}, [])]), ("z", {}, [])]))
    b = build_tree("b", ("r2", {}, [("z2", {}, []), ("x2", {}, [("y2", {}, [])])]))
    assert features(a) == features(b)


def test_project_fixed_placements():
    one = random_corpus(random.Random(35), n_trees=1, max_nodes=6)
    points = project(one, method="tsne", seed=0)
    assert [(p.x, p.y) for p in points] == [(0.0, 0.0)]

    a = chain("a", [{}, {}])
    b = build_tree("b", ("r", {}, [("s", {}, []), ("t2", {}, [])]))
    two = type(one)(trees=[a, b], attribute_schema={})
    points = project(two, method="pca", seed=0)
    assert [(p.x, p.y) for p in points] == [(-1.0, 0.0), (1.0, 0.0)]


def test_project_deterministic_and_complete():
    corpus = clustered_corpus()
    for method in ("tsne", "pca"):
        p1 = projection_to_doc(project(corpus, method=method, seed=11))
        p2 = projection_to_doc(project(corpus, method=method, seed=11))
        assert p1 == p2
        assert sum(p["n"] for p in p1) == len(corpus.trees)


def test_project_groups_cluster_by_template():
    corpus = clustered_corpus()
    points = project(corpus, method="tsne", seed=4)

    def label(point):
        return point.member_tree_ids[0].split("_")[0]

    intra, inter = [], []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = math.hypot(points[i].x - points[j].x, points[i].y - points[j].y)
            (intra if label(points[i]) == label(points[j]) else inter).append(d)
    ratio = (sum(intra) / len(intra)) / (sum(inter) / len(inter))
    assert ratio < 0.8


def test_groups_partition_corpus(citation):
    groups = group_by_topology(citation)
    members = [tid for g in groups for tid in g.member_tree_ids]
    assert sorted(members) == sorted(t.tree_id for t in citation.trees)
    for group in groups:
        assert group.representative.tree_id in group.member_tree_ids
