"""Typed query expressions: node patterns, paths, branches and compositions.

Expressions are immutable values.  Equality (`==` / ast_equal) is structural
and ignores element ids and source spans, which lets the recommender merge
expressions that differ only in how they were built.  The interchange
encoding (ast_encode / ast_decode) is the JSON contract shared with the
visual editor; it preserves element ids exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .model import CATEGORICAL, INHERENT_NAMES, NUMERIC

# predicate operators
GT, GE, LT, LE, EQ, IN = "gt", "ge", "lt", "le", "eq", "in"
OPS = (GT, GE, LT, LE, EQ, IN)

# node pattern kinds
CUSTOM, WILDCARD, ROOT, LEAF = "custom", "wildcard", "root", "leaf"

# element-composition quantifiers
EXISTS, FORALL = "exists", "forall"


class AstError(ValueError):
    pass


class MalformedAst(AstError):
    pass


class UnknownQuantifier(MalformedAst):
    pass


class BadRepetition(MalformedAst):
    pass


@dataclass(frozen=True)
class RelativeRef:
    """Reads the predicate's attribute from an ancestor `offset` levels up (offset <= 0)."""

    offset: int


@dataclass(frozen=True)
class AbsoluteRef:
    """Reads the predicate's attribute from the ancestor chain node at `level` (root = 1)."""

    level: int


@dataclass(frozen=True)
class Predicate:
    attribute: str
    op: str
    rhs: object  # float | str | tuple[str, ...] | RelativeRef | AbsoluteRef
    span: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class NodePattern:
    kind: str = WILDCARD
    predicates: tuple = ()
    negated: bool = False
    alt: "NodePattern | None" = None  # right-nested alternation chain
    elem_id: str = field(default="", compare=False)
    span: object = field(default=None, compare=False, repr=False)

    def chain(self):
        """The alternation atoms, head first."""
        atom = self
        while atom is not None:
            yield atom
            atom = atom.alt


@dataclass(frozen=True)
class Repetition:
    min: int = 1
    max: int | None = 1  # None = unbounded

    def __post_init__(self):
        if self.min < 0 or (self.max is not None and self.max < self.min):
            raise BadRepetition(f"bad repetition bounds {{{self.min},{self.max}}}")

    @property
    def unbounded(self):
        return self.max is None

    def is_default(self):
        return self.min == 1 and self.max == 1


DEFAULT_REP = Repetition(1, 1)


@dataclass(frozen=True)
class PathStep:
    node: NodePattern
    rep: Repetition = DEFAULT_REP


@dataclass(frozen=True)
class PathPattern:
    steps: tuple  # of PathStep, nonempty
    span: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BranchArm:
    path: PathPattern
    rep: Repetition = DEFAULT_REP  # counts sibling paths, not nodes
    child: "BranchPattern | None" = None


@dataclass(frozen=True)
class BranchPattern:
    arms: tuple  # of BranchArm, nonempty
    span: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ECClause:
    quantifier: str  # EXISTS or FORALL
    path: PathPattern
    occurrences: Repetition
    span: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class NodeCore:
    pattern: NodePattern


@dataclass(frozen=True)
class PathCore:
    path: PathPattern


@dataclass(frozen=True)
class SubtreeCore:
    root: NodePattern
    branch: BranchPattern


@dataclass(frozen=True)
class QueryTarget:
    core: object  # NodeCore | PathCore | SubtreeCore
    ec: tuple = ()  # of ECClause, conjunction
    span: object = field(default=None, compare=False, repr=False)


def ast_equal(a: QueryTarget, b: QueryTarget) -> bool:
    """Structural equality ignoring element ids and spans."""
    return a == b


# ---------------------------------------------------------------------------
# traversal helpers

def iter_patterns(target: QueryTarget, include_ec=True):
    """Yield (pattern, context) for every step-head NodePattern in AST order.

    context is one of "core", "arm", "ec"; alternation alternatives are not
    yielded separately (they belong to their head).
    """
    def from_path(path, ctx):
        for step in path.steps:
            yield step.node, ctx

    def from_branch(branch, ctx):
        for arm in branch.arms:
            yield from from_path(arm.path, ctx)
            if arm.child is not None:
                yield from from_branch(arm.child, ctx)

    core = target.core
    if isinstance(core, NodeCore):
        yield core.pattern, "core"
    elif isinstance(core, PathCore):
        yield from from_path(core.path, "core")
    else:
        yield core.root, "core"
        yield from from_branch(core.branch, "arm")
    if include_ec:
        for clause in target.ec:
            yield from from_path(clause.path, "ec")


def all_elem_ids(target: QueryTarget):
    ids = []
    for pattern, _ in iter_patterns(target):
        for atom in pattern.chain():
            ids.append(atom.elem_id)
    return ids


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Diagnostic:
    elem_id: str
    message: str


def _inherent_or_schema_kind(name, schema):
    if name in INHERENT_NAMES:
        return NUMERIC
    entry = schema.get(name) if schema else None
    return entry.kind if entry is not None else None


def _validate_predicate(pred, elem_id, schema, out):
    if pred.op not in OPS:
        out.append(Diagnostic(elem_id, f"unknown operator {pred.op!r}"))
        return
    kind = _inherent_or_schema_kind(pred.attribute, schema)
    if kind is None:
        out.append(Diagnostic(elem_id, f"attribute {pred.attribute!r} is not in the corpus schema"))
        return
    rhs = pred.rhs
    if isinstance(rhs, (RelativeRef, AbsoluteRef)):
        if isinstance(rhs, RelativeRef) and rhs.offset > 0:
            out.append(Diagnostic(elem_id, "relative level reference must have offset <= 0"))
        if isinstance(rhs, AbsoluteRef) and rhs.level < 1:
            out.append(Diagnostic(elem_id, "absolute level reference must have level >= 1"))
        if kind != NUMERIC:
            out.append(Diagnostic(
                elem_id, f"level reference requires numeric attribute, {pred.attribute!r} is {kind}"))
        if pred.op == IN:
            out.append(Diagnostic(elem_id, "'in' does not accept level references"))
        return
    if pred.op == IN:
        if not isinstance(rhs, tuple):
            out.append(Diagnostic(elem_id, "'in' requires a list literal"))
        elif kind != CATEGORICAL:
            out.append(Diagnostic(
                elem_id, f"'in' requires categorical attribute, {pred.attribute!r} is {kind}"))
        return
    if isinstance(rhs, float):
        if kind != NUMERIC:
            out.append(Diagnostic(
                elem_id, f"numeric comparison on {kind} attribute {pred.attribute!r}"))
    elif isinstance(rhs, str):
        if pred.op != EQ:
            out.append(Diagnostic(elem_id, f"operator {pred.op!r} requires a numeric value"))
        elif kind != CATEGORICAL:
            out.append(Diagnostic(
                elem_id, f"text comparison on {kind} attribute {pred.attribute!r}"))
    else:
        out.append(Diagnostic(elem_id, f"operator {pred.op!r} cannot take a list literal"))


def _validate_pattern(pattern, schema, out):
    for atom in pattern.chain():
        if atom.kind == CUSTOM:
            if not atom.predicates:
                out.append(Diagnostic(atom.elem_id, "custom node pattern has no predicates"))
            for pred in atom.predicates:
                _validate_predicate(pred, atom.elem_id, schema, out)
        elif atom.predicates:
            out.append(Diagnostic(atom.elem_id, f"{atom.kind} node pattern carries predicates"))


def _validate_path(path, schema, out):
    if not path.steps:
        out.append(Diagnostic("", "path has no steps"))
        return
    for i, step in enumerate(path.steps):
        _validate_pattern(step.node, schema, out)
        for atom in step.node.chain():
            if atom.kind == ROOT and i != 0:
                out.append(Diagnostic(atom.elem_id, "root pattern allowed only as the first step"))
            if atom.kind == LEAF and i != len(path.steps) - 1:
                out.append(Diagnostic(atom.elem_id, "leaf pattern allowed only as the final step"))


def _validate_branch(branch, schema, out):
    if not branch.arms:
        out.append(Diagnostic("", "branch has no arms"))
    for arm in branch.arms:
        _validate_path(arm.path, schema, out)
        if arm.child is not None:
            _validate_branch(arm.child, schema, out)


def validate(target: QueryTarget, schema) -> list:
    """Check type invariants plus schema compatibility; returns diagnostics."""
    out = []
    ids = all_elem_ids(target)
    seen = set()
    for elem_id in ids:
        if elem_id in seen:
            out.append(Diagnostic(elem_id, f"duplicate element id {elem_id!r}"))
        seen.add(elem_id)
    core = target.core
    if isinstance(core, NodeCore):
        _validate_pattern(core.pattern, schema, out)
    elif isinstance(core, PathCore):
        _validate_path(core.path, schema, out)
    elif isinstance(core, SubtreeCore):
        _validate_pattern(core.root, schema, out)
        for atom in core.root.chain():
            if atom.kind == LEAF:
                out.append(Diagnostic(atom.elem_id, "subtree root cannot be a leaf pattern"))
        _validate_branch(core.branch, schema, out)
    else:
        out.append(Diagnostic("", f"unknown core {type(core).__name__}"))
    for clause in target.ec:
        if clause.quantifier not in (EXISTS, FORALL):
            out.append(Diagnostic("", f"unknown quantifier {clause.quantifier!r}"))
        _validate_path(clause.path, schema, out)
    return out


# ---------------------------------------------------------------------------
# interchange encoding

def _rhs_to_doc(rhs):
    if isinstance(rhs, RelativeRef):
        return {"kind": "relative", "offset": rhs.offset}
    if isinstance(rhs, AbsoluteRef):
        return {"kind": "absolute", "level": rhs.level}
    if isinstance(rhs, float):
        return {"kind": "number", "value": rhs}
    if isinstance(rhs, str):
        return {"kind": "text", "value": rhs}
    return {"kind": "list", "values": list(rhs)}


def _pattern_to_doc(pattern):
    doc = {"id": pattern.elem_id, "node": pattern.kind, "negated": pattern.negated}
    if pattern.kind == CUSTOM:
        doc["predicates"] = [
            {"attr": p.attribute, "op": p.op, "rhs": _rhs_to_doc(p.rhs)}
            for p in pattern.predicates
        ]
    doc["alt"] = _pattern_to_doc(pattern.alt) if pattern.alt is not None else None
    return doc


def _rep_to_doc(rep):
    return {"min": rep.min, "max": rep.max}


def _path_to_doc(path):
    return {
        "steps": [{"node": _pattern_to_doc(s.node), "rep": _rep_to_doc(s.rep)} for s in path.steps]
    }


def _branch_to_doc(branch):
    return {
        "arms": [
            {
                "path": _path_to_doc(arm.path),
                "rep": _rep_to_doc(arm.rep),
                "child": _branch_to_doc(arm.child) if arm.child is not None else None,
            }
            for arm in branch.arms
        ]
    }


def ast_encode(target: QueryTarget) -> dict:
    core = target.core
    if isinstance(core, NodeCore):
        core_doc = {"kind": "node", "pattern": _pattern_to_doc(core.pattern)}
    elif isinstance(core, PathCore):
        core_doc = {"kind": "path", "path": _path_to_doc(core.path)}
    else:
        core_doc = {
            "kind": "subtree",
            "root": _pattern_to_doc(core.root),
            "branch": _branch_to_doc(core.branch),
        }
    return {
        "core": core_doc,
        "ec": [
            {
                "quantifier": c.quantifier,
                "path": _path_to_doc(c.path),
                "occurrences": _rep_to_doc(c.occurrences),
            }
            for c in target.ec
        ],
    }


def _need(doc, keys, what):
    if not isinstance(doc, dict):
        raise MalformedAst(f"{what} must be an object")
    unknown = set(doc) - set(keys)
    if unknown:
        raise MalformedAst(f"{what} has unknown fields {sorted(unknown)}")
    missing = set(keys) - set(doc)
    if missing:
        raise MalformedAst(f"{what} is missing fields {sorted(missing)}")


def _rhs_from_doc(doc):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise MalformedAst("predicate rhs must be a tagged object")
    kind = doc["kind"]
    if kind == "number":
        _need(doc, ("kind", "value"), "number rhs")
        value = doc["value"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedAst("number rhs requires a numeric value")
        return float(value)
    if kind == "text":
        _need(doc, ("kind", "value"), "text rhs")
        if not isinstance(doc["value"], str):
            raise MalformedAst("text rhs requires a string value")
        return doc["value"]
    if kind == "list":
        _need(doc, ("kind", "values"), "list rhs")
        values = doc["values"]
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise MalformedAst("list rhs requires a list of strings")
        return tuple(sorted(set(values)))
    if kind == "relative":
        _need(doc, ("kind", "offset"), "relative rhs")
        offset = doc["offset"]
        if not isinstance(offset, int) or isinstance(offset, bool) or offset > 0:
            raise MalformedAst("relative rhs requires an integer offset <= 0")
        return RelativeRef(offset)
    if kind == "absolute":
        _need(doc, ("kind", "level"), "absolute rhs")
        level = doc["level"]
        if not isinstance(level, int) or isinstance(level, bool) or level < 1:
            raise MalformedAst("absolute rhs requires an integer level >= 1")
        return AbsoluteRef(level)
    raise MalformedAst(f"unknown rhs kind {kind!r}")


def _pattern_from_doc(doc):
    if doc is None:
        return None
    keys = ("id", "node", "negated", "alt")
    if isinstance(doc, dict) and doc.get("node") == CUSTOM:
        keys = keys + ("predicates",)
    _need(doc, keys, "node pattern")
    kind = doc["node"]
    if kind not in (CUSTOM, WILDCARD, ROOT, LEAF):
        raise MalformedAst(f"unknown node kind {kind!r}")
    if not isinstance(doc["id"], str):
        raise MalformedAst("node pattern id must be a string")
    if not isinstance(doc["negated"], bool):
        raise MalformedAst("negated must be a boolean")
    predicates = ()
    if kind == CUSTOM:
        raw = doc["predicates"]
        if not isinstance(raw, list) or not raw:
            raise MalformedAst("custom node pattern requires a nonempty predicate list")
        preds = []
        for p in raw:
            _need(p, ("attr", "op", "rhs"), "predicate")
            if p["op"] not in OPS:
                raise MalformedAst(f"unknown operator {p['op']!r}")
            if not isinstance(p["attr"], str) or not p["attr"]:
                raise MalformedAst("predicate attribute must be a non-empty string")
            preds.append(Predicate(attribute=p["attr"], op=p["op"], rhs=_rhs_from_doc(p["rhs"])))
        predicates = tuple(preds)
    return NodePattern(
        kind=kind,
        predicates=predicates,
        negated=doc["negated"],
        alt=_pattern_from_doc(doc["alt"]),
        elem_id=doc["id"],
    )


def _rep_from_doc(doc):
    _need(doc, ("min", "max"), "repetition")
    lo, hi = doc["min"], doc["max"]
    if not isinstance(lo, int) or isinstance(lo, bool) or lo < 0:
        raise BadRepetition("repetition min must be an integer >= 0")
    if hi is not None and (not isinstance(hi, int) or isinstance(hi, bool)):
        raise BadRepetition("repetition max must be an integer or null")
    if hi is not None and hi < lo:
        raise BadRepetition(f"repetition max {hi} is below min {lo}")
    return Repetition(lo, hi)


def _path_from_doc(doc):
    _need(doc, ("steps",), "path")
    steps = doc["steps"]
    if not isinstance(steps, list) or not steps:
        raise MalformedAst("path requires a nonempty step list")
    out = []
    for s in steps:
        _need(s, ("node", "rep"), "path step")
        out.append(PathStep(node=_pattern_from_doc(s["node"]), rep=_rep_from_doc(s["rep"])))
    return PathPattern(steps=tuple(out))


def _branch_from_doc(doc):
    _need(doc, ("arms",), "branch")
    arms = doc["arms"]
    if not isinstance(arms, list) or not arms:
        raise MalformedAst("branch requires a nonempty arm list")
    out = []
    for a in arms:
        _need(a, ("path", "rep", "child"), "branch arm")
        child = _branch_from_doc(a["child"]) if a["child"] is not None else None
        out.append(BranchArm(path=_path_from_doc(a["path"]), rep=_rep_from_doc(a["rep"]), child=child))
    return BranchPattern(arms=tuple(out))


def ast_decode(doc) -> QueryTarget:
    _need(doc, ("core", "ec"), "query target")
    core_doc = doc["core"]
    if not isinstance(core_doc, dict) or "kind" not in core_doc:
        raise MalformedAst("core must be a tagged object")
    kind = core_doc["kind"]
    if kind == "node":
        _need(core_doc, ("kind", "pattern"), "node core")
        core = NodeCore(pattern=_pattern_from_doc(core_doc["pattern"]))
    elif kind == "path":
        _need(core_doc, ("kind", "path"), "path core")
        core = PathCore(path=_path_from_doc(core_doc["path"]))
    elif kind == "subtree":
        _need(core_doc, ("kind", "root", "branch"), "subtree core")
        core = SubtreeCore(
            root=_pattern_from_doc(core_doc["root"]),
            branch=_branch_from_doc(core_doc["branch"]),
        )
    else:
        raise MalformedAst(f"unknown core kind {kind!r}")
    ec_doc = doc["ec"]
    if not isinstance(ec_doc, list):
        raise MalformedAst("ec must be a list")
    clauses = []
    for c in ec_doc:
        _need(c, ("quantifier", "path", "occurrences"), "ec clause")
        if c["quantifier"] not in (EXISTS, FORALL):
            raise UnknownQuantifier(f"unknown quantifier {c['quantifier']!r}")
        clauses.append(ECClause(
            quantifier=c["quantifier"],
            path=_path_from_doc(c["path"]),
            occurrences=_rep_from_doc(c["occurrences"]),
        ))
    return QueryTarget(core=core, ec=tuple(clauses))


def renumber(target: QueryTarget, prefix="n") -> QueryTarget:
    """Assign fresh sequential element ids in AST order (alternatives included)."""
    counter = [0]

    def fresh():
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    def do_pattern(p):
        if p is None:
            return None
        return replace(p, elem_id=fresh(), alt=do_pattern(p.alt))

    def do_path(path):
        return replace(path, steps=tuple(
            replace(s, node=do_pattern(s.node)) for s in path.steps))

    def do_branch(branch):
        return replace(branch, arms=tuple(
            replace(a, path=do_path(a.path),
                    child=do_branch(a.child) if a.child is not None else None)
            for a in branch.arms))

    core = target.core
    if isinstance(core, NodeCore):
        core = NodeCore(pattern=do_pattern(core.pattern))
    elif isinstance(core, PathCore):
        core = PathCore(path=do_path(core.path))
    else:
        core = SubtreeCore(root=do_pattern(core.root), branch=do_branch(core.branch))
    ec = tuple(replace(c, path=do_path(c.path)) for c in target.ec)
    return replace(target, core=core, ec=ec)
