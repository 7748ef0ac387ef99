import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from treequery.fixtures import random_corpus, random_tree
from treequery.model import (
    Corpus, DuplicateNodeId, MalformedDocument, MixedAttributeKind,
    compute_inherent, corpus_stats, corpus_to_doc, dump_corpus, load_corpus,
)

from helpers import build_tree, chain


def doc_bytes(doc):
    return json.dumps(doc).encode("utf-8")


SMALL = {
    "trees": [
        {"tree_id": "t1", "root": {
            "id": "A", "attributes": {"v": 1}, "children": [
                {"id": "B", "attributes": {}, "children": []},
                {"id": "C", "attributes": {}, "children": []},
            ],
        }},
    ]
}


def test_load_single_tree():
    corpus = load_corpus(doc_bytes(SMALL))
    assert len(corpus.trees) == 1
    root = corpus.trees[0].root
    assert root.inherent.size == 3
    assert root.inherent.height == 2
    assert root.inherent.width == 2
    assert [c.id for c in root.children] == ["B", "C"]


def test_duplicate_node_id():
    doc = {
        "trees": [{"tree_id": "t1", "root": {
            "id": "n1", "attributes": {}, "children": [
                {"id": "n1", "attributes": {}, "children": []}],
        }}]
    }
    with pytest.raises(DuplicateNodeId):
        load_corpus(doc_bytes(doc))


def test_duplicate_node_id_across_trees():
    doc = {
        "trees": [
            {"tree_id": "t1", "root": {"id": "n1", "attributes": {}, "children": []}},
            {"tree_id": "t2", "root": {"id": "n1", "attributes": {}, "children": []}},
        ]
    }
    with pytest.raises(DuplicateNodeId):
        load_corpus(doc_bytes(doc))


def test_empty_corpus_is_valid():
    corpus = load_corpus(b'{"trees": []}')
    assert corpus.trees == []
    stats = corpus_stats(corpus)
    assert stats["trees"] == 0
    assert stats["nodes"] == 0
    assert stats["size"]["histogram"] == []


def test_malformed_json():
    with pytest.raises(MalformedDocument):
        load_corpus(b"{nope")
    with pytest.raises(MalformedDocument):
        load_corpus(b'{"trees": [{"tree_id": "t", "root": null}]}')


def test_mixed_attribute_kind_rejected():
    doc = {
        "trees": [{"tree_id": "t1", "root": {
            "id": "a", "attributes": {"year": 2019}, "children": [
                {"id": "b", "attributes": {"year": "2019"}, "children": []}],
        }}]
    }
    with pytest.raises(MixedAttributeKind):
        load_corpus(doc_bytes(doc))


def test_reserved_inherent_names_rejected():
    doc = {"trees": [{"tree_id": "t", "root": {
        "id": "a", "attributes": {"depth": 2}, "children": []}}]}
    with pytest.raises(MalformedDocument):
        load_corpus(doc_bytes(doc))


def test_nonfinite_numbers_rejected():
    with pytest.raises(MalformedDocument):
        load_corpus(b'{"trees": [{"tree_id": "t", "root": '
                    b'{"id": "a", "attributes": {"v": NaN}, "children": []}}]}')


def test_generated_corpus_schema_and_node_count():
    # emit a document while tallying ground truth, then compare after load
    rng = random.Random(5)
    emitted_nodes = 0
    trees = []
    for t in range(100):
        counter = [0]

        def node():
            nonlocal emitted_nodes
            counter[0] += 1
            emitted_nodes += 1
            my_id = f"t{t}n{counter[0]}"
            children = [node() for _ in range(rng.randint(0, 2))] if counter[0] < 8 else []
            return {"id": my_id,
                    "attributes": {"v": rng.randint(0, 5), "tag": rng.choice("ab")},
                    "children": children}

        trees.append({"tree_id": f"t{t}", "root": node()})
    corpus = load_corpus(doc_bytes({"trees": trees}))
    assert corpus.node_count == emitted_nodes
    assert corpus.attribute_schema["v"].kind == "numeric"
    assert corpus.attribute_schema["tag"].kind == "categorical"


def test_inherent_single_node():
    tree = build_tree("t", ("a", {}, []))
    inh = tree.root.inherent
    assert (inh.depth, inh.size, inh.height, inh.width, inh.degree) == (1, 1, 1, 1, 0)


def test_inherent_chain_of_four():
    tree = chain("t", [{}, {}, {}, {}])
    root = tree.root
    assert root.inherent.size == 4
    assert root.inherent.height == 4
    assert root.inherent.width == 1
    depths = [tree.node_index[f"c{i}"].inherent.depth for i in range(1, 5)]
    assert depths == [1, 2, 3, 4]


def brute_force_inherent(tree):
    """Independent per-node recomputation by full traversal."""
    out = {}

    def subtree_nodes(node):
        nodes = [node]
        for child in node.children:
            nodes.extend(subtree_nodes(child))
        return nodes

    def depth_of(node):
        depth = 1
        cur = node
        while tree.parents[cur.id] is not None:
            cur = tree.parents[cur.id]
            depth += 1
        return depth

    for node in tree.preorder:
        nodes = subtree_nodes(node)
        base = depth_of(node)
        rel_levels = {}
        for member in nodes:
            rel = depth_of(member) - base
            rel_levels[rel] = rel_levels.get(rel, 0) + 1
        out[node.id] = {
            "depth": base,
            "size": len(nodes),
            "height": max(rel_levels) + 1,
            "width": max(rel_levels.values()),
            "degree": len(node.children),
        }
    return out


def test_inherent_random_tree_against_bruteforce():
    rng = random.Random(11)
    for i in range(10):
        tree = random_tree(rng, f"t{i}", max_nodes=50)
        expected = brute_force_inherent(tree)
        for node in tree.preorder:
            inh = node.inherent
            assert expected[node.id] == {
                "depth": inh.depth, "size": inh.size, "height": inh.height,
                "width": inh.width, "degree": inh.degree,
            }


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_compute_inherent_idempotent(seed):
    tree = random_tree(random.Random(seed), "t", max_nodes=25)
    before = {n.id: (n.inherent.depth, n.inherent.size, n.inherent.height,
                     n.inherent.width, n.inherent.degree) for n in tree.preorder}
    compute_inherent(tree)
    after = {n.id: (n.inherent.depth, n.inherent.size, n.inherent.height,
                    n.inherent.width, n.inherent.degree) for n in tree.preorder}
    assert before == after


def test_recurrences_hold():
    rng = random.Random(3)
    tree = random_tree(rng, "t", max_nodes=40)
    for node in tree.preorder:
        if node.children:
            assert node.inherent.size == 1 + sum(c.inherent.size for c in node.children)
            assert node.inherent.height == 1 + max(c.inherent.height for c in node.children)
            for child in node.children:
                assert child.inherent.depth == node.inherent.depth + 1
        else:
            assert (node.inherent.size, node.inherent.height,
                    node.inherent.width, node.inherent.degree) == (1, 1, 1, 0)
    assert tree.root.inherent.depth == 1


def test_round_trip_serialization():
    rng = random.Random(8)
    corpus = random_corpus(rng, n_trees=12, max_nodes=15)
    payload = dump_corpus(corpus)
    reloaded = load_corpus(payload)
    assert corpus_to_doc(reloaded) == corpus_to_doc(corpus)
    assert dump_corpus(reloaded) == payload


def test_stats_single_tree_min_equals_max():
    corpus = load_corpus(doc_bytes(SMALL))
    stats = corpus_stats(corpus)
    for key in ("size", "height", "width"):
        assert stats[key]["min"] == stats[key]["max"]


def test_stats_histogram_totals(citation):
    stats = corpus_stats(citation)
    for key in ("size", "height", "width"):
        assert sum(count for _, count in stats[key]["histogram"]) == stats["trees"]
    assert stats["attributes"]["citation"]["kind"] == "numeric"
    assert "graph" in stats["attributes"]["topics"]["values"]
