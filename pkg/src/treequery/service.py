"""HTTP facade over corpus loading, matching, recommendation and projection.

Corpus uploads are content-addressed snapshots: re-uploading the same
document returns the same snapshot id.  All responses are the exact byte
serializations produced by the owning modules (the same helpers are used
by the CLI and by the equivalence tests), so clients can rely on stable
payloads.  Environment knobs: PORT, TQ_MAX_CORPUS_NODES, TQ_TIMEOUT_SECONDS.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import os
import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .ast import MalformedAst, ast_decode
from .matcher import match_corpus, report_to_doc
from .model import CorpusError, corpus_stats, load_corpus, stats_to_json
from .parser import QuerySyntaxError, format as format_expr, parse
from .recommender import recommend, recommendations_to_json
from .similarity import project, projection_to_json

MAX_CORPUS_NODES = int(os.environ.get("TQ_MAX_CORPUS_NODES", "500000"))
TIMEOUT_SECONDS = float(os.environ.get("TQ_TIMEOUT_SECONDS", "120"))

app = FastAPI(title="treequery", docs_url=None, redoc_url=None)

_snapshots = {}
_snapshots_lock = threading.Lock()
_executor = concurrent.futures.ThreadPoolExecutor(max_workers=8)


def _error(status, code, message, span=None):
    body = {"error": code, "message": message}
    if span is not None:
        body["span"] = [span.start, span.end]
    return JSONResponse(status_code=status, content=body)


def _json_bytes(payload: bytes) -> Response:
    return Response(content=payload, media_type="application/json")


def _with_timeout(fn):
    future = _executor.submit(fn)
    try:
        return future.result(timeout=TIMEOUT_SECONDS)
    except concurrent.futures.TimeoutError:
        raise TimeoutError


class _Snapshot:
    def __init__(self, snapshot_id, corpus):
        self.snapshot_id = snapshot_id
        self.corpus = corpus
        self.stats_json = stats_to_json(corpus_stats(corpus))


def snapshot_id_for(document: bytes) -> str:
    return hashlib.sha256(document).hexdigest()[:16]


def register_corpus(document: bytes) -> _Snapshot:
    snapshot_id = snapshot_id_for(document)
    with _snapshots_lock:
        existing = _snapshots.get(snapshot_id)
    if existing is not None:
        return existing
    corpus = load_corpus(document)
    snapshot = _Snapshot(snapshot_id, corpus)
    with _snapshots_lock:
        _snapshots.setdefault(snapshot_id, snapshot)
        return _snapshots[snapshot_id]


def get_snapshot(snapshot_id):
    with _snapshots_lock:
        return _snapshots.get(snapshot_id)


# --- response builders shared with the equivalence tests -------------------

def corpus_response_bytes(snapshot: _Snapshot) -> bytes:
    doc = {"snapshot_id": snapshot.snapshot_id,
           "stats": json.loads(snapshot.stats_json)}
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def query_response_bytes(corpus, target) -> bytes:
    report = match_corpus(target, corpus)
    doc = {"expr": format_expr(target)}
    doc.update(report_to_doc(report))
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def recommend_response_bytes(corpus, target, k) -> bytes:
    return recommendations_to_json(recommend(target, corpus, k))


def projection_response_bytes(corpus, method, seed) -> bytes:
    return projection_to_json(project(corpus, method=method, seed=seed))


# --- request parsing --------------------------------------------------------

def _target_from_body(body):
    """Exactly one of expr/ast; returns (target, error_response)."""
    expr = body.get("expr")
    ast_doc = body.get("ast")
    if (expr is None) == (ast_doc is None):
        return None, _error(400, "BadRequest", "supply exactly one of 'expr' or 'ast'")
    if expr is not None:
        if not isinstance(expr, str):
            return None, _error(400, "BadRequest", "'expr' must be a string")
        try:
            return parse(expr), None
        except QuerySyntaxError as exc:
            return None, _error(400, "ParseError", exc.message, span=exc.span)
    try:
        return ast_decode(ast_doc), None
    except MalformedAst as exc:
        return None, _error(400, "BadRequest", str(exc))


async def _read_json(request):
    try:
        return json.loads(await request.body()), None
    except json.JSONDecodeError as exc:
        return None, _error(400, "BadRequest", f"invalid JSON body: {exc}")


# --- endpoints ---------------------------------------------------------------

@app.post("/corpus")
async def post_corpus(request: Request):
    document = await request.body()
    try:
        snapshot = register_corpus(document)
    except CorpusError as exc:
        return _error(400, "MalformedCorpus", str(exc))
    if snapshot.corpus.node_count > MAX_CORPUS_NODES:
        with _snapshots_lock:
            _snapshots.pop(snapshot.snapshot_id, None)
        return _error(413, "CorpusTooLarge",
                      f"corpus has {snapshot.corpus.node_count} nodes, "
                      f"limit is {MAX_CORPUS_NODES}")
    return _json_bytes(corpus_response_bytes(snapshot))


@app.post("/query")
async def post_query(request: Request):
    body, err = await _read_json(request)
    if err is not None:
        return err
    snapshot = get_snapshot(body.get("snapshot_id"))
    if snapshot is None:
        return _error(404, "UnknownSnapshot", f"no snapshot {body.get('snapshot_id')!r}")
    target, err = _target_from_body(body)
    if err is not None:
        return err
    try:
        payload = _with_timeout(lambda: query_response_bytes(snapshot.corpus, target))
    except TimeoutError:
        return _error(504, "Timeout", "query timed out")
    return _json_bytes(payload)


@app.post("/recommend")
async def post_recommend(request: Request):
    body, err = await _read_json(request)
    if err is not None:
        return err
    snapshot = get_snapshot(body.get("snapshot_id"))
    if snapshot is None:
        return _error(404, "UnknownSnapshot", f"no snapshot {body.get('snapshot_id')!r}")
    target, err = _target_from_body(body)
    if err is not None:
        return err
    k = body.get("k", 10)
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        return _error(400, "BadRequest", "'k' must be a positive integer")
    try:
        payload = _with_timeout(lambda: recommend_response_bytes(snapshot.corpus, target, k))
    except TimeoutError:
        return _error(504, "Timeout", "recommendation timed out")
    return _json_bytes(payload)


@app.get("/projection")
async def get_projection(snapshot_id: str = "", method: str = "tsne", seed: int = 0):
    snapshot = get_snapshot(snapshot_id)
    if snapshot is None:
        return _error(404, "UnknownSnapshot", f"no snapshot {snapshot_id!r}")
    if method not in ("tsne", "pca"):
        return _error(400, "BadRequest", f"unknown projection method {method!r}")
    try:
        payload = _with_timeout(
            lambda: projection_response_bytes(snapshot.corpus, method, seed))
    except TimeoutError:
        return _error(504, "Timeout", "projection timed out")
    return _json_bytes(payload)


@app.get("/stats")
async def get_stats(snapshot_id: str = ""):
    snapshot = get_snapshot(snapshot_id)
    if snapshot is None:
        return _error(404, "UnknownSnapshot", f"no snapshot {snapshot_id!r}")
    return _json_bytes(snapshot.stats_json)


def main():
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=int(os.environ.get("PORT", "8730")))


if __name__ == "__main__":
    main()
