"""Finite directed graphs and their undirected shadows.

Vertices are plain strings shared with the formula module, so a dependency
graph and its system never need translating.  Vertex order is preserved and
drives every deterministic choice made elsewhere (successor order, witness
order, component order).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .formula import FormulaSyntaxError, quote_name, tokenize

__all__ = [
    "DiGraph",
    "UndiGraph",
    "GraphError",
    "HomomorphismError",
    "BudgetExceededError",
    "underlying",
    "succ",
    "downward",
    "cone",
    "is_transitive",
    "transitive_closure",
    "is_cycle_free",
    "topological_order",
    "is_simply_connected",
    "components",
    "is_homomorphism",
    "homomorphism_violation",
    "collapse",
    "orientations",
    "has_undirected_cycle",
    "parse_graph",
    "parse_map",
    "digraph_to_text",
    "undigraph_to_text",
    "to_dot",
    "MAX_ORIENTATION_EDGES",
]

MAX_ORIENTATION_EDGES = 16


class GraphError(ValueError):
    pass


class HomomorphismError(GraphError):
    pass


class BudgetExceededError(ValueError):
    pass


def _ordered_unique(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True, eq=False)
class DiGraph:
    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable[tuple[str, str]] = ()) -> None:
        edges = [tuple(e) for e in edges]
        verts = _ordered_unique(vertices)
        known = set(verts)
        for a, b in edges:
            if a not in known or b not in known:
                raise GraphError(f"edge {a} -> {b} has an endpoint outside the vertex set")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(edges))
        index = {v: i for i, v in enumerate(verts)}
        out: dict[str, list[str]] = {v: [] for v in verts}
        inc: dict[str, list[str]] = {v: [] for v in verts}
        for a, b in sorted(self.edges, key=lambda e: (index[e[0]], index[e[1]])):
            out[a].append(b)
            inc[b].append(a)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_succ", {v: tuple(s) for v, s in out.items()})
        object.__setattr__(self, "_pred", {v: tuple(p) for v, p in inc.items()})

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]]) -> "DiGraph":
        edges = list(edges)
        return cls(_ordered_unique(x for e in edges for x in e), edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiGraph):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.edges))

    def __repr__(self) -> str:
        return f"DiGraph({list(self.vertices)!r}, {self.sorted_edges()!r})"

    def __contains__(self, v: object) -> bool:
        return v in self._index

    def __len__(self) -> int:
        return len(self.vertices)

    def sorted_edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a in self.vertices for b in self._succ[a]]

    def successors(self, x: str) -> tuple[str, ...]:
        """Successors of ``x`` in vertex order."""
        try:
            return self._succ[x]
        except KeyError:
            raise GraphError(f"unknown vertex {x!r}") from None

    def predecessors(self, x: str) -> tuple[str, ...]:
        try:
            return self._pred[x]
        except KeyError:
            raise GraphError(f"unknown vertex {x!r}") from None

    def out_degree(self, x: str) -> int:
        return len(self.successors(x))

    def induced(self, keep: Iterable[str]) -> "DiGraph":
        keep = set(keep)
        return DiGraph(
            [v for v in self.vertices if v in keep],
            [(a, b) for a, b in self.edges if a in keep and b in keep],
        )

    def without_edges(self, removed: Iterable[tuple[str, str]]) -> "DiGraph":
        return DiGraph(self.vertices, self.edges - set(removed))


@dataclass(frozen=True, eq=False)
class UndiGraph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable[Iterable[str]] = ()) -> None:
        verts = _ordered_unique(vertices)
        known = set(verts)
        es = set()
        for e in edges:
            e = frozenset(e)
            if not 1 <= len(e) <= 2 or not e <= known:
                raise GraphError(f"bad undirected edge {sorted(e)}")
            es.add(e)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(es))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]]) -> "UndiGraph":
        edges = list(edges)
        return cls(_ordered_unique(x for e in edges for x in e), edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UndiGraph):
            return NotImplemented
        return set(self.vertices) == set(other.vertices) and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((frozenset(self.vertices), self.edges))

    def sorted_edges(self) -> list[tuple[str, str]]:
        """Edges as ``(a, b)`` pairs with ``a`` first in vertex order."""
        index = {v: i for i, v in enumerate(self.vertices)}
        pairs = []
        for e in self.edges:
            ends = sorted(e, key=index.__getitem__)
            pairs.append((ends[0], ends[-1]))
        return sorted(pairs, key=lambda p: (index[p[0]], index[p[1]]))


# --------------------------------------------------------------------------
# Basic structure


def underlying(g: DiGraph) -> UndiGraph:
    return UndiGraph(g.vertices, (frozenset(e) for e in g.edges))


def succ(g: DiGraph, x: str) -> tuple[str, ...]:
    return g.successors(x)


def downward(g: DiGraph, x: str) -> frozenset[str]:
    """Vertices reachable from ``x`` by a path of length at least one."""
    seen: set[str] = set()
    stack = list(g.successors(x))
    while stack:
        y = stack.pop()
        if y in seen:
            continue
        seen.add(y)
        stack.extend(g.successors(y))
    return frozenset(seen)


def cone(g: DiGraph, x: str) -> DiGraph:
    return g.induced({x} | downward(g, x))


def is_transitive(g: DiGraph) -> bool:
    for a, b in g.edges:
        for c in g.successors(b):
            if (a, c) not in g.edges:
                return False
    return True


def transitive_closure(g: DiGraph) -> DiGraph:
    return DiGraph(g.vertices, ((x, y) for x in g.vertices for y in downward(g, x)))


def topological_order(g: DiGraph) -> list[str] | None:
    """Vertices with every edge pointing forward, or None if g has a cycle.

    Ties are broken by vertex order (Kahn's algorithm).
    """
    indeg = {v: len(g.predecessors(v)) for v in g.vertices}
    ready = [v for v in g.vertices if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in g.successors(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort(key=g._index.__getitem__)
    return order if len(order) == len(g.vertices) else None


def is_cycle_free(g: DiGraph) -> bool:
    return topological_order(g) is not None


def _components_of(vertices: tuple[str, ...], pairs: Iterable[frozenset[str]]) -> list[list[str]]:
    parent = {v: v for v in vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in pairs:
        a, *rest = e
        for b in rest:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
    groups: dict[str, list[str]] = {}
    for v in vertices:
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def has_undirected_cycle(u: UndiGraph) -> bool:
    if any(len(e) == 1 for e in u.edges):
        return True
    # a forest has exactly |V| - (#components) edges
    return len(u.edges) != len(u.vertices) - len(_components_of(u.vertices, u.edges))


def is_simply_connected(g: DiGraph) -> bool:
    """At most one undirected path between any two vertices.

    Loops and anti-parallel pairs are rejected explicitly: the shadow of a
    two-cycle is a single edge, yet ``a = !b, b = a`` has no fixpoint.
    """
    for a, b in g.edges:
        if a == b or (b, a) in g.edges:
            return False
    return not has_undirected_cycle(underlying(g))


def components(g: DiGraph) -> list[DiGraph]:
    """Weakly connected components, ordered by their first vertex."""
    groups = _components_of(g.vertices, (frozenset(e) for e in g.edges))
    return [g.induced(group) for group in groups]


# --------------------------------------------------------------------------
# Homomorphisms


def _check_total(g: DiGraph, f: Mapping[str, str]) -> None:
    missing = [v for v in g.vertices if v not in f]
    if missing:
        raise HomomorphismError(f"map is not total: no image for {', '.join(missing)}")


def homomorphism_violation(g: DiGraph, h: DiGraph, f: Mapping[str, str]) -> tuple[str, str] | None:
    """First edge of ``g`` (in edge order) whose image is not an edge of ``h``."""
    _check_total(g, f)
    outside = [v for v in g.vertices if f[v] not in h]
    if outside:
        raise HomomorphismError(f"image of {outside[0]!r} is not a vertex of the target")
    for a, b in g.sorted_edges():
        if (f[a], f[b]) not in h.edges:
            return (a, b)
    return None


def is_homomorphism(g: DiGraph, h: DiGraph, f: Mapping[str, str]) -> bool:
    return homomorphism_violation(g, h, f) is None


def collapse(g: DiGraph, f: Mapping[str, str]) -> DiGraph:
    """Image of ``g`` under ``f``; an edge mapped onto a single vertex is an error."""
    _check_total(g, f)
    edges = []
    for a, b in g.sorted_edges():
        if f[a] == f[b]:
            raise HomomorphismError(f"collapsing edge {a} -> {b} onto {f[a]!r} would create a loop")
        edges.append((f[a], f[b]))
    return DiGraph(_ordered_unique(f[v] for v in g.vertices), edges)


# --------------------------------------------------------------------------
# Orientations


def orientations(u: UndiGraph, max_edges: int = MAX_ORIENTATION_EDGES) -> Iterator[DiGraph]:
    """All ways of directing the edges of ``u``.

    Edge ``i`` (in :meth:`UndiGraph.sorted_edges` order) is bit ``i`` of the
    counter, most significant first; bit 0 keeps the ``a -> b`` direction.
    Loops have a single orientation.
    """
    pairs = u.sorted_edges()
    loops = [(a, b) for a, b in pairs if a == b]
    proper = [(a, b) for a, b in pairs if a != b]
    if len(proper) > max_edges:
        raise BudgetExceededError(f"{len(proper)} edges exceed the orientation budget of {max_edges}")
    for flips in itertools.product((False, True), repeat=len(proper)):
        edges = [(b, a) if flip else (a, b) for (a, b), flip in zip(proper, flips)]
        yield DiGraph(u.vertices, edges + loops)


# --------------------------------------------------------------------------
# Text formats


def parse_graph(text: str) -> DiGraph | UndiGraph:
    """Read ``a -> b`` (directed) or ``a -- b`` (undirected) lines.

    A line holding a single name declares an isolated vertex.  Mixing the
    two edge kinds in one file is an error.
    """
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    kind = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        try:
            tokens = tokenize(raw, line=lineno)[:-1]
        except FormulaSyntaxError as exc:
            raise GraphError(str(exc)) from exc
        if not tokens:
            continue
        names = [t for t in tokens if t.kind in ("IDENT", "QUOTED")]
        if len(tokens) == 1 and names:
            vertices.append(names[0].text)
            continue
        if len(tokens) != 3 or tokens[1].kind != "OP" or tokens[1].text not in ("->", "--") or len(names) != 2:
            raise GraphError(f"line {lineno}: expected 'a -> b' or 'a -- b'")
        this = tokens[1].text
        if kind is not None and this != kind:
            raise GraphError(f"line {lineno}: mixed directed and undirected edges")
        kind = this
        a, b = names[0].text, names[1].text
        vertices.extend((a, b))
        edges.append((a, b))
    if kind == "--":
        return UndiGraph(vertices, edges)
    return DiGraph(vertices, edges)


def parse_map(text: str) -> dict[str, str]:
    """Read a vertex map, one ``source => target`` line per vertex."""
    result: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        try:
            tokens = tokenize(raw, line=lineno)[:-1]
        except FormulaSyntaxError as exc:
            raise GraphError(str(exc)) from exc
        if not tokens:
            continue
        if (
            len(tokens) != 3
            or tokens[1].kind != "OP"
            or tokens[1].text != "=>"
            or tokens[0].kind not in ("IDENT", "QUOTED")
            or tokens[2].kind not in ("IDENT", "QUOTED")
        ):
            raise GraphError(f"line {lineno}: expected 'source => target'")
        if tokens[0].text in result:
            raise GraphError(f"line {lineno}: {tokens[0].text!r} mapped twice")
        result[tokens[0].text] = tokens[2].text
    return result


def map_to_text(f: Mapping[str, str]) -> str:
    return "".join(f"{quote_name(a)} => {quote_name(b)}\n" for a, b in f.items())


def _isolated(vertices: tuple[str, ...], touched: set[str]) -> list[str]:
    return [quote_name(v) for v in vertices if v not in touched]


def digraph_to_text(g: DiGraph) -> str:
    touched = {x for e in g.edges for x in e}
    lines = _isolated(g.vertices, touched)
    lines += [f"{quote_name(a)} -> {quote_name(b)}" for a, b in g.sorted_edges()]
    return "".join(line + "\n" for line in lines)


def undigraph_to_text(u: UndiGraph) -> str:
    touched = {x for e in u.edges for x in e}
    lines = _isolated(u.vertices, touched)
    lines += [f"{quote_name(a)} -- {quote_name(b)}" for a, b in u.sorted_edges()]
    return "".join(line + "\n" for line in lines)


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: DiGraph, name: str = "G", marked: Iterable[tuple[str, str]] = ()) -> str:
    """DOT text for ``g``; ``marked`` edges get a crossed-line style."""
    marked = set(marked)
    lines = [f"digraph {_dot_id(name)} {{"]
    for v in g.vertices:
        lines.append(f"  {_dot_id(v)};")
    for a, b in g.sorted_edges():
        attr = ' [style=bold, arrowtail=tee, dir=both, label="¬"]' if (a, b) in marked else ""
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
