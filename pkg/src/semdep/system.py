"""Denotation systems, their dependency graphs and acceptability."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .formula import (
    And,
    Const,
    Formula,
    FormulaSyntaxError,
    Not,
    Or,
    Var,
    evaluate,
    occurring,
    occurring_ordered,
    parse_tokens,
    quote_name,
    to_text,
    tokenize,
)
from .graph import DiGraph

__all__ = [
    "DenotationSystem",
    "AcceptabilityReport",
    "InvalidSystemError",
    "TruncationPolicy",
    "parse_system",
    "dependency_graph",
    "check_acceptable",
    "apply_boundary_policy",
    "system_to_text",
]


class InvalidSystemError(ValueError):
    """Invalid system: duplicate vertex, forbidden loop, bad syntax."""

    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


_HEADER_RE = re.compile(r"\s*system(?![A-Za-z0-9_])(?!\s*=)(.*)\Z")


class TruncationPolicy(enum.Enum):
    CLIP = "clip"
    GROUND_TRUE = "ground_true"
    GROUND_FALSE = "ground_false"


@dataclass(frozen=True)
class DenotationSystem:
    denoted: tuple[str, ...]
    d: Mapping[str, Formula]
    name: str | None = None
    allow_loops: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "denoted", tuple(self.denoted))
        object.__setattr__(self, "d", dict(self.d))
        if len(set(self.denoted)) != len(self.denoted):
            raise InvalidSystemError("duplicate vertex")
        if set(self.d) != set(self.denoted):
            raise InvalidSystemError("denotation map must be defined exactly on the denoted vertices")
        if not self.allow_loops:
            for s in self.denoted:
                if s in occurring(self.d[s]):
                    raise InvalidSystemError(f"vertex {s!r} mentions itself; loops are not allowed")

    def __hash__(self) -> int:
        return hash((self.denoted, tuple(self.d[s] for s in self.denoted)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenotationSystem):
            return NotImplemented
        return self.denoted == other.denoted and all(
            self.d[s] == other.d[s] for s in self.denoted
        )

    @property
    def free_vars(self) -> tuple[str, ...]:
        """Undenoted variables, in order of first occurrence."""
        denoted = set(self.denoted)
        seen: dict[str, None] = {}
        for s in self.denoted:
            for x in occurring_ordered(self.d[s]):
                if x not in denoted:
                    seen.setdefault(x)
        return tuple(seen)

    @property
    def is_closed(self) -> bool:
        return not self.free_vars

    @property
    def variables(self) -> tuple[str, ...]:
        """Denoted vertices followed by free variables: the system order."""
        return self.denoted + self.free_vars

    def graph(self, include_free: bool = True) -> DiGraph:
        return dependency_graph(self, include_free=include_free)


@dataclass(frozen=True)
class AcceptabilityReport:
    violations: tuple[tuple[str, bool, bool], ...] = field(default=())

    @property
    def acceptable(self) -> bool:
        return not self.violations


def parse_system(text: str, allow_loops: bool = False) -> DenotationSystem:
    """Read the line-oriented system format.

    An optional first line ``system <name>`` names the system; every other
    non-blank line is ``vertex = formula``.
    """
    name = None
    denoted: list[str] = []
    d: dict[str, Formula] = {}
    first = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        header = _HEADER_RE.match(raw)
        if first and header:
            first = False
            name = header.group(1).split("#", 1)[0].strip() or None
            continue
        try:
            tokens = tokenize(raw, line=lineno)
        except FormulaSyntaxError as exc:
            raise InvalidSystemError(str(exc), lineno) from exc
        if tokens[0].kind == "EOF":
            continue
        first = False
        head = tokens[0]
        if head.kind not in ("IDENT", "QUOTED") or (head.kind == "IDENT" and head.text in ("TRUE", "FALSE")):
            raise InvalidSystemError(f"expected a vertex name, got {head.text!r}", lineno)
        if not (tokens[1].kind == "OP" and tokens[1].text == "="):
            raise InvalidSystemError("expected '='", lineno)
        try:
            formula = parse_tokens(tokens[2:])
        except FormulaSyntaxError as exc:
            raise InvalidSystemError(str(exc), lineno) from exc
        vertex = head.text
        if vertex in d:
            raise InvalidSystemError(f"duplicate vertex {vertex!r}", lineno)
        if not allow_loops and vertex in occurring(formula):
            raise InvalidSystemError(f"vertex {vertex!r} mentions itself; loops are not allowed", lineno)
        denoted.append(vertex)
        d[vertex] = formula
    return DenotationSystem(tuple(denoted), d, name=name, allow_loops=allow_loops)


def system_to_text(sys: DenotationSystem) -> str:
    lines = []
    if sys.name:
        lines.append(f"system {sys.name}")
    for s in sys.denoted:
        lines.append(f"{quote_name(s)} = {to_text(sys.d[s])}")
    return "\n".join(lines) + "\n"


def dependency_graph(sys: DenotationSystem, include_free: bool = False) -> DiGraph:
    """Edge ``s -> t`` iff ``t`` occurs in ``d(s)``.

    Free variables become sink vertices when ``include_free`` is set; an open
    system without it is an error.
    """
    free = sys.free_vars
    if free and not include_free:
        raise InvalidSystemError(f"open system (free variables {', '.join(free)}); pass include_free")
    vertices = sys.denoted + free
    edges = []
    for s in sys.denoted:
        targets = occurring(sys.d[s])
        edges.extend((s, t) for t in vertices if t in targets)
    return DiGraph(vertices, edges)


def check_acceptable(sys: DenotationSystem, v: Mapping[str, bool]) -> AcceptabilityReport:
    missing = [x for x in sys.variables if x not in v]
    if missing:
        raise ValueError(f"partial valuation: no value for {', '.join(missing)}")
    violations = []
    for s in sys.denoted:
        expected = evaluate(sys.d[s], v)
        if expected != v[s]:
            violations.append((s, expected, v[s]))
    return AcceptabilityReport(tuple(violations))


def apply_boundary_policy(
    template: Formula,
    in_range: Callable[[str], bool],
    policy: TruncationPolicy,
    unwrap_singletons: bool = True,
) -> Formula:
    """Resolve references to variables outside a finite window.

    ``CLIP`` deletes out-of-range literals (a variable, possibly under
    negations) from their enclosing junction; a junction left with a single
    child collapses to it unless ``unwrap_singletons`` is false.  The
    ``GROUND_*`` policies replace every out-of-range variable by a constant.
    """
    if policy is TruncationPolicy.CLIP:
        result = _clip(template, in_range, unwrap_singletons)
        if result is None:
            raise ValueError("template is a single out-of-range literal; nothing left to clip to")
        return result
    c = Const(policy is TruncationPolicy.GROUND_TRUE)
    return _ground(template, in_range, c)


def _literal_var(f: Formula) -> str | None:
    while isinstance(f, Not):
        f = f.child
    return f.name if isinstance(f, Var) else None


def _clip(f: Formula, in_range: Callable[[str], bool], unwrap: bool) -> Formula | None:
    lit = _literal_var(f)
    if lit is not None:
        return f if in_range(lit) else None
    if isinstance(f, Not):
        inner = _clip(f.child, in_range, unwrap)
        return None if inner is None else Not(inner)
    if isinstance(f, (And, Or)):
        kept = []
        dropped = False
        for child in f.children:
            c = _clip(child, in_range, unwrap)
            if c is None:
                dropped = True
            else:
                kept.append(c)
        if dropped and unwrap and len(kept) == 1:
            return kept[0]
        return type(f)(kept)
    return f


def _ground(f: Formula, in_range: Callable[[str], bool], c: Const) -> Formula:
    if isinstance(f, Var):
        return f if in_range(f.name) else c
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(_ground(f.child, in_range, c))
    return type(f)([_ground(child, in_range, c) for child in f.children])
