"""Query engine for multivariate hierarchical data."""

from .ast import (
    AbsoluteRef, BranchArm, BranchPattern, ECClause, NodeCore, NodePattern,
    PathCore, PathPattern, PathStep, Predicate, QueryTarget, Repetition,
    RelativeRef, SubtreeCore, ast_decode, ast_encode, ast_equal, validate,
)
from .matcher import (
    MatchReport, MatchResult, eval_ec, eval_node, match_branch, match_corpus,
    match_path, match_tree, report_to_doc, report_to_json,
)
from .model import (
    Corpus, InherentAttrs, MultiTree, TreeNode, compute_inherent, corpus_stats,
    dump_corpus, load_corpus,
)
from .oracle import oracle_match
from .parser import QuerySyntaxError, SourceSpan, format, parse
from .recommender import Recommendation, RelaxEdit, recommend, relax_for_item
from .similarity import (
    ProjectionPoint, TopologyGroup, features, group_by_topology, project,
    topology_key, tree_edit_distance,
)

__version__ = "0.1.0"
