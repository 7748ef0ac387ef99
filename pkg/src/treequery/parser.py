"""Concrete textual syntax: tokenizer, recursive-descent parser, pretty-printer.

The grammar (published in grammar.ebnf) in brief:

    target     = core , { ec } ;
    core       = step , { "/" , step }            (* single default step = node target *)
               | node , branch ;                  (* subtree target *)
    step       = atom , { "|" , atom } , [ repetition ] ;
    atom       = [ "!" ] , primary ;
    primary    = "." | "^" | "$" | "(" , inner , ")" ;
    inner      = "." | "^" | "$" | predicate , { "," , predicate } ;
    predicate  = name , ( ">" | ">=" | "<" | "<=" | "=" ) , value
               | name , "in" , list ;
    value      = number | string | ref ;
    ref        = "&" , [ "-" ] , integer | "#" , integer ;
    repetition = "{" , [ integer ] , [ "," , [ integer ] ] , "}" ;
    branch     = "[" , arm , { "," , arm } , "]" ;
    arm        = "<" , step , { "/" , step } , [ branch ] , ">" , [ repetition ] ;
    ec         = "-" , ( "exists" | "forall" ) , "<" , step , { "/" , step } , ">" ,
                 [ repetition ] ;

format() prints the canonical form: single-space separators after commas,
`{1,1}` omitted, `{m,m}` printed `{m}`, special nodes printed bare.
parse(format(t)) is ast_equal to t for canonical-form ASTs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .ast import (
    CUSTOM, EQ, EXISTS, FORALL, GE, GT, IN, LE, LEAF, LT, ROOT, WILDCARD,
    AbsoluteRef, BranchArm, BranchPattern, ECClause, NodeCore, NodePattern,
    PathCore, PathPattern, PathStep, Predicate, QueryTarget, Repetition,
    RelativeRef, SubtreeCore,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class QuerySyntaxError(ValueError):
    def __init__(self, message, span, expected=()):
        super().__init__(f"{message} at {span.start}..{span.end}")
        self.message = message
        self.span = span
        self.expected = tuple(expected)


class RepetitionError(QuerySyntaxError):
    pass


class DanglingEC(QuerySyntaxError):
    pass


_PUNCT2 = (">=", "<=")
_PUNCT1 = "()[]<>{},/|!-.^$&#="
_KEYWORDS = ("in", "exists", "forall")


@dataclass(frozen=True)
class _Token:
    kind: str  # punctuation text, "ident", "number", "string", "int", "eof"
    text: str
    value: object
    span: SourceSpan


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text[i:i + 2] in _PUNCT2:
            tokens.append(_Token(text[i:i + 2], text[i:i + 2], None, SourceSpan(i, i + 2)))
            i += 2
            continue
        if c in _PUNCT1:
            tokens.append(_Token(c, c, None, SourceSpan(i, i + 1)))
            i += 1
            continue
        if c == '"':
            j = i + 1
            out = []
            while True:
                if j >= n:
                    raise QuerySyntaxError("unterminated string", SourceSpan(i, n), ('"',))
                ch = text[j]
                if ch == '"':
                    j += 1
                    break
                if ch == "\\":
                    if j + 1 >= n:
                        raise QuerySyntaxError("unterminated escape", SourceSpan(j, n))
                    esc = text[j + 1]
                    mapped = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r", "/": "/"}.get(esc)
                    if mapped is None:
                        raise QuerySyntaxError(f"unknown escape \\{esc}", SourceSpan(j, j + 2))
                    out.append(mapped)
                    j += 2
                    continue
                out.append(ch)
                j += 1
            tokens.append(_Token("string", text[i:j], "".join(out), SourceSpan(i, j)))
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            raw = text[i:j]
            if is_float:
                tokens.append(_Token("number", raw, float(raw), SourceSpan(i, j)))
            else:
                tokens.append(_Token("int", raw, int(raw), SourceSpan(i, j)))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "ident"
            tokens.append(_Token(kind, word, word, SourceSpan(i, j)))
            i = j
            continue
        raise QuerySyntaxError(f"unexpected character {c!r}", SourceSpan(i, i + 1))
    tokens.append(_Token("eof", "", None, SourceSpan(n, n)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.counter = 0

    def peek(self, offset=0):
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok.kind != kind:
            raise QuerySyntaxError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.span, (kind,))
        return self.advance()

    def fresh_id(self):
        self.counter += 1
        return f"n{self.counter}"

    # --- predicates -------------------------------------------------------
    def parse_rhs(self):
        tok = self.peek()
        if tok.kind in ("number", "int"):
            self.advance()
            return float(tok.value)
        if tok.kind == "-":
            self.advance()
            num = self.peek()
            if num.kind not in ("number", "int"):
                raise QuerySyntaxError("expected number after '-'", num.span, ("number",))
            self.advance()
            return -float(num.value)
        if tok.kind == "string":
            self.advance()
            return tok.value
        if tok.kind == "&":
            self.advance()
            sign = 1
            if self.peek().kind == "-":
                self.advance()
                sign = -1
            num = self.expect("int")
            offset = sign * num.value
            if offset > 0:
                raise QuerySyntaxError("relative level reference must be <= 0", num.span)
            return RelativeRef(offset)
        if tok.kind == "#":
            self.advance()
            num = self.expect("int")
            if num.value < 1:
                raise QuerySyntaxError("absolute level reference must be >= 1", num.span)
            return AbsoluteRef(num.value)
        raise QuerySyntaxError(
            f"expected value, found {tok.text or 'end of input'!r}", tok.span,
            ("number", "string", "&", "#"))

    def parse_list(self):
        self.expect("[")
        values = []
        if self.peek().kind != "]":
            while True:
                tok = self.expect("string")
                values.append(tok.value)
                if self.peek().kind == ",":
                    self.advance()
                    continue
                break
        self.expect("]")
        return tuple(sorted(set(values)))

    def parse_predicate(self):
        name_tok = self.expect("ident")
        op_tok = self.peek()
        ops = {">": GT, ">=": GE, "<": LT, "<=": LE, "=": EQ}
        if op_tok.kind in ops:
            self.advance()
            rhs = self.parse_rhs()
            op = ops[op_tok.kind]
        elif op_tok.kind == "in":
            self.advance()
            rhs = self.parse_list()
            op = IN
        else:
            raise QuerySyntaxError(
                f"expected comparison operator, found {op_tok.text!r}", op_tok.span,
                (">", ">=", "<", "<=", "=", "in"))
        end = self.tokens[self.pos - 1].span.end
        return Predicate(attribute=name_tok.value, op=op, rhs=rhs,
                         span=SourceSpan(name_tok.span.start, end))

    # --- node patterns ----------------------------------------------------
    def parse_primary(self):
        tok = self.peek()
        specials = {".": WILDCARD, "^": ROOT, "$": LEAF}
        if tok.kind in specials:
            self.advance()
            return specials[tok.kind], (), tok.span
        if tok.kind == "(":
            open_tok = self.advance()
            inner = self.peek()
            if inner.kind in specials:
                self.advance()
                close = self.expect(")")
                return specials[inner.kind], (), SourceSpan(open_tok.span.start, close.span.end)
            preds = [self.parse_predicate()]
            while self.peek().kind == ",":
                self.advance()
                preds.append(self.parse_predicate())
            close = self.expect(")")
            return CUSTOM, tuple(preds), SourceSpan(open_tok.span.start, close.span.end)
        raise QuerySyntaxError(
            f"expected node pattern, found {tok.text or 'end of input'!r}", tok.span,
            ("(", ".", "^", "$"))

    def parse_atom(self):
        start = self.peek().span.start
        negated = False
        if self.peek().kind == "!":
            self.advance()
            negated = True
        kind, preds, span = self.parse_primary()
        return NodePattern(kind=kind, predicates=preds, negated=negated,
                           elem_id=self.fresh_id(), span=SourceSpan(start, span.end))

    def parse_alt_chain(self):
        atoms = [self.parse_atom()]
        while self.peek().kind == "|":
            self.advance()
            atoms.append(self.parse_atom())
        chain = atoms[-1]
        for atom in reversed(atoms[:-1]):
            chain = NodePattern(kind=atom.kind, predicates=atom.predicates,
                                negated=atom.negated, alt=chain,
                                elem_id=atom.elem_id, span=atom.span)
        return chain

    def parse_repetition(self):
        """Optional `{...}` postfix; returns the default when absent."""
        if self.peek().kind != "{":
            return Repetition(1, 1)
        open_tok = self.advance()
        lo = None
        hi = "absent"
        if self.peek().kind == "int":
            lo = self.advance().value
        if self.peek().kind == ",":
            self.advance()
            hi = None
            if self.peek().kind == "int":
                hi = self.advance().value
        close = self.expect("}")
        span = SourceSpan(open_tok.span.start, close.span.end)
        if lo is None and hi == "absent":
            raise RepetitionError("empty repetition", span)
        if hi == "absent":
            hi = lo  # {m} means exactly m
        if lo is None:
            lo = 0  # {,n} means at most n
        if hi is not None and hi < lo:
            raise RepetitionError(f"repetition max {hi} is below min {lo}", span)
        return Repetition(lo, hi)

    def parse_step(self):
        node = self.parse_alt_chain()
        rep = self.parse_repetition()
        return PathStep(node=node, rep=rep)

    # --- paths, branches --------------------------------------------------
    def parse_path(self, allow_branch=False):
        """Steps separated by '/'; optionally a nested branch after the last step."""
        start = self.peek().span.start
        steps = [self.parse_step()]
        branch = None
        while True:
            if self.peek().kind == "/":
                self.advance()
                steps.append(self.parse_step())
                continue
            if allow_branch and self.peek().kind == "[":
                branch = self.parse_branch()
            break
        end = self.tokens[self.pos - 1].span.end
        path = PathPattern(steps=tuple(steps), span=SourceSpan(start, end))
        self._check_step_positions(path)
        return path, branch

    def _check_step_positions(self, path):
        for i, step in enumerate(path.steps):
            for atom in step.node.chain():
                if atom.kind == ROOT and i != 0:
                    raise QuerySyntaxError("root pattern allowed only as the first step", atom.span)
                if atom.kind == LEAF and i != len(path.steps) - 1:
                    raise QuerySyntaxError("leaf pattern allowed only as the final step", atom.span)

    def parse_arm(self):
        self.expect("<")
        path, child = self.parse_path(allow_branch=True)
        self.expect(">")
        rep = self.parse_repetition()
        return BranchArm(path=path, rep=rep, child=child)

    def parse_branch(self):
        open_tok = self.expect("[")
        arms = [self.parse_arm()]
        while self.peek().kind == ",":
            self.advance()
            arms.append(self.parse_arm())
        close = self.expect("]")
        return BranchPattern(arms=tuple(arms),
                             span=SourceSpan(open_tok.span.start, close.span.end))

    # --- targets ----------------------------------------------------------
    def parse_core(self):
        start = self.peek().span.start
        step = self.parse_step()
        if self.peek().kind == "[":
            if not step.rep.is_default():
                raise QuerySyntaxError(
                    "repetition is not allowed on a subtree root", self.peek().span)
            branch = self.parse_branch()
            return SubtreeCore(root=step.node, branch=branch)
        steps = [step]
        while self.peek().kind == "/":
            self.advance()
            steps.append(self.parse_step())
            if self.peek().kind == "[":
                raise QuerySyntaxError(
                    "a branch may only follow a subtree root or end a branch arm",
                    self.peek().span)
        end = self.tokens[self.pos - 1].span.end
        path = PathPattern(steps=tuple(steps), span=SourceSpan(start, end))
        self._check_step_positions(path)
        if len(steps) == 1 and steps[0].rep.is_default():
            return NodeCore(pattern=steps[0].node)
        return PathCore(path=path)

    def parse_ec_clause(self):
        dash = self.expect("-")
        quant_tok = self.peek()
        if quant_tok.kind not in ("exists", "forall"):
            raise QuerySyntaxError(
                f"expected 'exists' or 'forall', found {quant_tok.text or 'end of input'!r}",
                quant_tok.span, ("exists", "forall"))
        self.advance()
        self.expect("<")
        path, _ = self.parse_path(allow_branch=False)
        self.expect(">")
        rep = self.parse_repetition()
        end = self.tokens[self.pos - 1].span.end
        quant = EXISTS if quant_tok.kind == "exists" else FORALL
        return ECClause(quantifier=quant, path=path, occurrences=rep,
                        span=SourceSpan(dash.span.start, end))

    def parse_target(self):
        if self.peek().kind == "-":
            raise DanglingEC("element composition clause with no core expression",
                             self.peek().span)
        if self.peek().kind == "eof":
            raise QuerySyntaxError("empty expression", self.peek().span)
        core = self.parse_core()
        clauses = []
        while self.peek().kind == "-":
            clauses.append(self.parse_ec_clause())
        tok = self.peek()
        if tok.kind != "eof":
            raise QuerySyntaxError(f"unexpected trailing input {tok.text!r}", tok.span, ("eof",))
        return QueryTarget(core=core, ec=tuple(clauses),
                           span=SourceSpan(0, len(self.text)))


def parse(text: str) -> QueryTarget:
    return _Parser(text).parse_target()


# ---------------------------------------------------------------------------
# canonical pretty-printer

def _fmt_number(value):
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _fmt_rhs(rhs):
    if isinstance(rhs, RelativeRef):
        return f"&{rhs.offset}" if rhs.offset < 0 else f"&{rhs.offset}"
    if isinstance(rhs, AbsoluteRef):
        return f"#{rhs.level}"
    if isinstance(rhs, float):
        return _fmt_number(rhs)
    if isinstance(rhs, str):
        return json.dumps(rhs, ensure_ascii=False)
    return "[" + ", ".join(json.dumps(v, ensure_ascii=False) for v in rhs) + "]"


_OP_TEXT = {GT: ">", GE: ">=", LT: "<", LE: "<=", EQ: "="}


def _fmt_predicate(pred):
    if pred.op == IN:
        return f"{pred.attribute} in {_fmt_rhs(pred.rhs)}"
    return f"{pred.attribute}{_OP_TEXT[pred.op]}{_fmt_rhs(pred.rhs)}"


def _fmt_atom(atom):
    bang = "!" if atom.negated else ""
    if atom.kind == WILDCARD:
        return bang + "."
    if atom.kind == ROOT:
        return bang + "^"
    if atom.kind == LEAF:
        return bang + "$"
    return bang + "(" + ", ".join(_fmt_predicate(p) for p in atom.predicates) + ")"


def _fmt_pattern(pattern):
    return "|".join(_fmt_atom(atom) for atom in pattern.chain())


def _fmt_rep(rep):
    if rep.is_default():
        return ""
    if rep.max is None:
        return f"{{{rep.min},}}"
    if rep.max == rep.min:
        return f"{{{rep.min}}}"
    return f"{{{rep.min},{rep.max}}}"


def _fmt_step(step):
    return _fmt_pattern(step.node) + _fmt_rep(step.rep)


def _fmt_path(path):
    return "/".join(_fmt_step(s) for s in path.steps)


def _fmt_branch(branch):
    arms = []
    for arm in branch.arms:
        inner = _fmt_path(arm.path)
        if arm.child is not None:
            inner += _fmt_branch(arm.child)
        arms.append("<" + inner + ">" + _fmt_rep(arm.rep))
    return "[" + ", ".join(arms) + "]"


def format(target: QueryTarget) -> str:
    core = target.core
    if isinstance(core, NodeCore):
        text = _fmt_pattern(core.pattern)
    elif isinstance(core, PathCore):
        text = _fmt_path(core.path)
    else:
        text = _fmt_pattern(core.root) + _fmt_branch(core.branch)
    for clause in target.ec:
        text += f" - {clause.quantifier} <{_fmt_path(clause.path)}>{_fmt_rep(clause.occurrences)}"
    return text
