"""Command-line front end.

Subcommand stdout is byte-identical to the owning module's serialization
(json format), so scripts can treat the CLI and the HTTP service as
interchangeable.  `query` exits 0 when matches were found, 1 when none
were, 2 on errors, mirroring grep.
"""

from __future__ import annotations

import json
import sys

import click

from .ast import MalformedAst, ast_decode, validate
from .matcher import match_corpus, report_to_json
from .model import CorpusError, corpus_stats, load_corpus, stats_to_json
from .parser import QuerySyntaxError, parse
from .recommender import recommend, recommendations_to_json
from .similarity import project, projection_to_json


def _fail(message, code=2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(corpus_path):
    try:
        with open(corpus_path, "rb") as fh:
            return load_corpus(fh.read())
    except OSError as exc:
        _fail(str(exc))
    except CorpusError as exc:
        _fail(f"malformed corpus: {exc}")


def _target(expr, ast_file):
    if (expr is None) == (ast_file is None):
        _fail("supply exactly one of --expr or --ast-file")
    if expr is not None:
        try:
            return parse(expr)
        except QuerySyntaxError as exc:
            _fail(f"syntax error at {exc.span.start}..{exc.span.end}: {exc.message}")
    try:
        with open(ast_file, "r", encoding="utf-8") as fh:
            return ast_decode(json.load(fh))
    except OSError as exc:
        _fail(str(exc))
    except (json.JSONDecodeError, MalformedAst) as exc:
        _fail(f"bad AST document: {exc}")


def _emit(payload: bytes):
    sys.stdout.buffer.write(payload)
    sys.stdout.buffer.flush()


@click.group()
def main():
    """Query engine for multivariate hierarchical data."""


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--expr", default=None, help="query expression text")
@click.option("--ast-file", default=None, type=click.Path(), help="AST interchange document")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "table"]))
def query(corpus_path, expr, ast_file, fmt):
    """Match an expression against a corpus; exit 1 when nothing matches."""
    corpus = _load(corpus_path)
    target = _target(expr, ast_file)
    for diag in validate(target, corpus.attribute_schema):
        click.echo(f"warning: {diag.elem_id}: {diag.message}", err=True)
    report = match_corpus(target, corpus)
    for diag in report.diagnostics:
        click.echo(f"warning: {diag}", err=True)
    if fmt == "json":
        _emit(report_to_json(report))
    else:
        click.echo(f"{'tree':<24} {'matches':>8}")
        for tree_id in report.matched_tree_ids:
            click.echo(f"{tree_id:<24} {len(report.results[tree_id]):>8}")
    sys.exit(0 if report.matched_tree_ids else 1)


@main.command("recommend")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--expr", default=None)
@click.option("--ast-file", default=None, type=click.Path())
@click.option("--k", default=10, type=int)
def recommend_cmd(corpus_path, expr, ast_file, k):
    """Relax the expression against non-matching trees and rank the results."""
    corpus = _load(corpus_path)
    target = _target(expr, ast_file)
    _emit(recommendations_to_json(recommend(target, corpus, k)))


@main.command("project")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--method", default="tsne", type=click.Choice(["tsne", "pca"]))
@click.option("--seed", default=0, type=int)
def project_cmd(corpus_path, method, seed):
    """Project topology groups to 2D."""
    corpus = _load(corpus_path)
    _emit(projection_to_json(project(corpus, method=method, seed=seed)))


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
def check(corpus_path):
    """Validate a corpus file and print its stats."""
    corpus = _load(corpus_path)
    _emit(stats_to_json(corpus_stats(corpus)))


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
def fixtures(out_dir):
    """Write the synthetic citation fixture corpus and example expressions."""
    from .fixtures import write_fixtures

    _, _, counts = write_fixtures(out_dir)
    click.echo(f"wrote fixtures for {len(counts)} expressions to {out_dir}", err=True)


if __name__ == "__main__":
    main()
