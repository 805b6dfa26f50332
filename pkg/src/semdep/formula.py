"""Propositional formulas over vertex identifiers.

Formulas are immutable trees built from :class:`Const`, :class:`Var`,
:class:`Not`, :class:`And` and :class:`Or`.  Conjunctions and disjunctions
are n-ary and keep their children in source order; an empty ``And`` is true
and an empty ``Or`` is false.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence, Union

__all__ = [
    "Const",
    "Var",
    "Not",
    "And",
    "Or",
    "Formula",
    "TRUE",
    "FALSE",
    "ThreeValued",
    "FormulaSyntaxError",
    "UnmappedVariableError",
    "CapExceededError",
    "parse_formula",
    "to_text",
    "quote_name",
    "evaluate",
    "eval_partial",
    "occurring",
    "truth_table",
    "relevant",
    "substitute",
    "simplify",
    "is_semantic_constant",
    "from_truth_table",
    "negative_occurrences",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 20

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"TRUE", "FALSE"})


@dataclass(frozen=True)
class Const:
    value: bool

    def __repr__(self) -> str:
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...] = ()

    def __init__(self, *children: "Formula") -> None:
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        object.__setattr__(self, "children", tuple(children))

    def __repr__(self) -> str:
        return f"And{list(self.children)!r}"


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...] = ()

    def __init__(self, *children: "Formula") -> None:
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        object.__setattr__(self, "children", tuple(children))

    def __repr__(self) -> str:
        return f"Or{list(self.children)!r}"


Formula = Union[Const, Var, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


class ThreeValued(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, value: bool) -> "ThreeValued":
        return cls.TRUE if value else cls.FALSE


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


class UnmappedVariableError(KeyError):
    pass


class CapExceededError(ValueError):
    pass


# --------------------------------------------------------------------------
# Lexing and parsing


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, QUOTED, OP, EOF
    text: str
    line: int
    column: int


_OPERATORS = ("->", "--", "=>", "!", "&", "|", "(", ")", "=")


def tokenize(text: str, line: int = 1) -> list[Token]:
    """Split ``text`` into tokens, dropping whitespace and ``#`` comments.

    The operator set is shared by the formula, system and graph readers; each
    parser rejects the operators it does not understand.
    """
    tokens: list[Token] = []
    i, col = 0, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            start_col = col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n or text[i] == "\n":
                    raise FormulaSyntaxError("unterminated quoted identifier", line, start_col)
                ch = text[i]
                if ch == "\\" and i + 1 < n and text[i + 1] in '"\\':
                    buf.append(text[i + 1])
                    i += 2
                    col += 2
                    continue
                i += 1
                col += 1
                if ch == '"':
                    break
                buf.append(ch)
            if not buf:
                raise FormulaSyntaxError("empty quoted identifier", line, start_col)
            tokens.append(Token("QUOTED", "".join(buf), line, start_col))
            continue
        m = re.match(r"[A-Za-z_][A-Za-z0-9_]*", text[i:])
        if m:
            tokens.append(Token("IDENT", m.group(), line, col))
            i += m.end()
            col += m.end()
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token("OP", op, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            raise FormulaSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.text == op

    def error(self, message: str, tok: Token | None = None) -> FormulaSyntaxError:
        tok = tok or self.peek()
        return FormulaSyntaxError(message, tok.line, tok.column)

    def formula(self) -> Formula:
        return self.disjunction()

    def disjunction(self) -> Formula:
        items = [self.conjunction()]
        while self.at_op("|"):
            self.advance()
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(items)

    def conjunction(self) -> Formula:
        items = [self.unary()]
        while self.at_op("&"):
            self.advance()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(items)

    def unary(self) -> Formula:
        if self.at_op("!"):
            self.advance()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.advance()
            if tok.text == "TRUE":
                return TRUE
            if tok.text == "FALSE":
                return FALSE
            return Var(tok.text)
        if tok.kind == "QUOTED":
            self.advance()
            return Var(tok.text)
        if self.at_op("("):
            self.advance()
            inner = self.formula()
            if not self.at_op(")"):
                raise self.error("unbalanced parentheses: expected ')'")
            self.advance()
            return inner
        if tok.kind == "EOF":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {tok.text!r}")


def parse_tokens(tokens: list[Token]) -> Formula:
    if tokens[0].kind == "EOF":
        raise FormulaSyntaxError("empty formula", tokens[0].line, tokens[0].column)
    parser = _Parser(tokens)
    result = parser.formula()
    tok = parser.peek()
    if tok.kind != "EOF":
        if tok.kind == "OP" and tok.text == ")":
            raise parser.error("unbalanced parentheses: unexpected ')'")
        raise parser.error(f"unexpected token {tok.text!r}")
    return result


def parse_formula(text: str) -> Formula:
    """Parse formula source text.

    Precedence is ``!`` over ``&`` over ``|``; runs of the same binary
    operator become one n-ary node.

    >>> parse_formula("a | b & c")
    Or[Var('a'), And[Var('b'), Var('c')]]
    """
    return parse_tokens(tokenize(text))


# --------------------------------------------------------------------------
# Printing


def quote_name(name: str) -> str:
    if IDENT_RE.match(name) and name not in KEYWORDS:
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


_PREC = {Or: 1, And: 2}


def to_text(f: Formula) -> str:
    """Render ``f`` with minimal parentheses.

    Empty junctions print as their constants and singleton junctions print as
    their only child, since the grammar has no syntax for either.
    """
    if isinstance(f, Const):
        return "TRUE" if f.value else "FALSE"
    if isinstance(f, Var):
        return quote_name(f.name)
    if isinstance(f, Not):
        child = _unwrap(f.child)
        inner = to_text(child)
        if isinstance(child, (And, Or)):
            inner = f"({inner})"
        return "!" + inner
    if not f.children:
        return "TRUE" if isinstance(f, And) else "FALSE"
    if len(f.children) == 1:
        return to_text(f.children[0])
    sep = " & " if isinstance(f, And) else " | "
    parts = []
    for child in f.children:
        child = _unwrap(child)
        text = to_text(child)
        # a same-kind child keeps its own node only behind parentheses
        if isinstance(child, (And, Or)) and _PREC[type(child)] <= _PREC[type(f)]:
            text = f"({text})"
        parts.append(text)
    return sep.join(parts)


def _unwrap(f: Formula) -> Formula:
    while isinstance(f, (And, Or)) and len(f.children) == 1:
        f = f.children[0]
    if isinstance(f, (And, Or)) and not f.children:
        return Const(isinstance(f, And))
    return f


# --------------------------------------------------------------------------
# Semantics


def evaluate(f: Formula, v: Mapping[str, bool]) -> bool:
    """Classical truth value of ``f`` under the total valuation ``v``."""
    if isinstance(f, Var):
        try:
            return v[f.name]
        except KeyError:
            raise UnmappedVariableError(f.name) from None
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.child, v)
    if isinstance(f, And):
        return all(evaluate(c, v) for c in f.children)
    return any(evaluate(c, v) for c in f.children)


def eval_partial(f: Formula, pv: Mapping[str, bool]) -> ThreeValued:
    """Strong Kleene evaluation under a partial valuation."""
    if isinstance(f, Var):
        if f.name in pv:
            return ThreeValued.of(pv[f.name])
        return ThreeValued.UNKNOWN
    if isinstance(f, Const):
        return ThreeValued.of(f.value)
    if isinstance(f, Not):
        inner = eval_partial(f.child, pv)
        if inner is ThreeValued.UNKNOWN:
            return inner
        return ThreeValued.of(inner is ThreeValued.FALSE)
    dominant = ThreeValued.FALSE if isinstance(f, And) else ThreeValued.TRUE
    unknown = False
    for c in f.children:
        r = eval_partial(c, pv)
        if r is dominant:
            return dominant
        if r is ThreeValued.UNKNOWN:
            unknown = True
    if unknown:
        return ThreeValued.UNKNOWN
    return ThreeValued.TRUE if isinstance(f, And) else ThreeValued.FALSE


def _walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, (And, Or)):
            stack.extend(reversed(node.children))


def occurring(f: Formula) -> frozenset[str]:
    return frozenset(node.name for node in _walk(f) if isinstance(node, Var))


def occurring_ordered(f: Formula) -> list[str]:
    """Occurring variables in first-occurrence order (left to right)."""
    seen: dict[str, None] = {}
    for node in _walk(f):
        if isinstance(node, Var):
            seen.setdefault(node.name)
    return list(seen)


def negative_occurrences(f: Formula) -> frozenset[str]:
    """Variables with at least one occurrence under an odd number of negations."""
    found: set[str] = set()
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, neg = stack.pop()
        if isinstance(node, Var):
            if neg:
                found.add(node.name)
        elif isinstance(node, Not):
            stack.append((node.child, not neg))
        elif isinstance(node, (And, Or)):
            stack.extend((c, neg) for c in node.children)
    return frozenset(found)


def _check_cap(names: Sequence[str], cap: int) -> None:
    if len(names) > cap:
        raise CapExceededError(f"{len(names)} variables exceed the cap of {cap}")


def truth_table(f: Formula, names: Sequence[str]) -> list[bool]:
    """Values of ``f`` on all rows over ``names``.

    Row ``r`` assigns ``names[i]`` the bit ``(r >> (k - 1 - i)) & 1``, so row
    0 is all-false and the first name is the most significant.
    """
    k = len(names)
    rows = []
    for bits in itertools.product((False, True), repeat=k):
        rows.append(evaluate(f, dict(zip(names, bits))))
    return rows


def relevant(f: Formula, cap: int = DEFAULT_CAP) -> frozenset[str]:
    """Occurring variables whose flip changes the value under some co-assignment."""
    names = sorted(occurring(f))
    _check_cap(names, cap)
    table = truth_table(f, names)
    k = len(names)
    result = set()
    for i, name in enumerate(names):
        bit = 1 << (k - 1 - i)
        if any(table[r] != table[r | bit] for r in range(len(table)) if not r & bit):
            result.add(name)
    return frozenset(result)


def is_semantic_constant(f: Formula, cap: int = DEFAULT_CAP) -> bool | None:
    names = sorted(occurring(f))
    _check_cap(names, cap)
    table = truth_table(f, names)
    if all(table):
        return True
    if not any(table):
        return False
    return None


def substitute(f: Formula, x: str, c: bool) -> Formula:
    if isinstance(f, Var):
        return Const(c) if f.name == x else f
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.child, x, c))
    return type(f)([substitute(child, x, c) for child in f.children])


def simplify(f: Formula) -> Formula:
    """Fold constants; the result has no constant leaf unless it is one."""
    if isinstance(f, (Var, Const)):
        return f
    if isinstance(f, Not):
        child = simplify(f.child)
        if isinstance(child, Const):
            return Const(not child.value)
        return Not(child)
    neutral = isinstance(f, And)
    kept = []
    for child in f.children:
        child = simplify(child)
        if isinstance(child, Const):
            if child.value != neutral:
                return Const(not neutral)
            continue
        kept.append(child)
    if not kept:
        return Const(neutral)
    if len(kept) == 1:
        return kept[0]
    return type(f)(kept)


def from_truth_table(names: Sequence[str], table: Sequence[bool]) -> Formula:
    """Shannon expansion of ``table`` in which every name occurs.

    Row ordering follows :func:`truth_table`.
    """
    names = list(names)
    if len(names) > DEFAULT_CAP:
        raise CapExceededError(f"{len(names)} variables exceed the cap of {DEFAULT_CAP}")
    if len(table) != 1 << len(names):
        raise ValueError(f"table has {len(table)} rows, expected {1 << len(names)}")
    return _expand(names, [bool(b) for b in table])


def _expand(names: list[str], table: list[bool]) -> Formula:
    if not names:
        return Const(table[0])
    half = len(table) // 2
    x = Var(names[0])
    rest = names[1:]
    return Or(And(x, _expand(rest, table[half:])), And(Not(x), _expand(rest, table[:half])))
