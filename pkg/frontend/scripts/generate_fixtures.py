"""Regenerate the recorded service payloads the frontend tests run against.

Everything written here is an external-interface document: AST interchange
encodings, /query, /recommend and /projection response bodies.  Run from the
repo root:  python3 frontend/scripts/generate_fixtures.py
"""

import json
import pathlib

from treequery.ast import ast_encode
from treequery.fixtures import PAPER_EXPRESSIONS, citation_corpus
from treequery.parser import parse
from treequery.recommender import recommend, recommendations_to_doc
from treequery.service import query_response_bytes
from treequery.similarity import project, projection_to_doc

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    corpus = citation_corpus()

    expressions = {
        name: {"expr": text, "ast": ast_encode(parse(text))}
        for name, text in PAPER_EXPRESSIONS.items()
    }
    (OUT / "paper_expressions.json").write_text(
        json.dumps(expressions, indent=2, ensure_ascii=False))

    report = json.loads(query_response_bytes(
        corpus, parse(PAPER_EXPRESSIONS["author_star"])))
    (OUT / "sample_report.json").write_text(json.dumps(report, indent=2))

    empty = json.loads(query_response_bytes(corpus, parse("(citation>=1e9)")))
    (OUT / "empty_report.json").write_text(json.dumps(empty, indent=2))

    recs = recommendations_to_doc(recommend(
        parse(PAPER_EXPRESSIONS["graph_dl_citers"]), corpus, 6))
    (OUT / "recommendations.json").write_text(json.dumps(recs, indent=2, ensure_ascii=False))

    points = projection_to_doc(project(corpus, method="pca", seed=1))
    (OUT / "projection.json").write_text(json.dumps(points, indent=2))

    print(f"wrote {len(list(OUT.glob('*.json')))} fixture files to {OUT}")


if __name__ == "__main__":
    main()
