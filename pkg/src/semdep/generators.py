"""Finite builders for the named structures.

Infinite structures are cut to a window of ``n`` levels; references that
leave the window are resolved by a :class:`TruncationPolicy`.
"""

from __future__ import annotations

import enum
import random
from typing import Sequence

from .formula import FALSE, TRUE, And, Formula, Not, Or, Var
from .graph import DiGraph
from .system import DenotationSystem, TruncationPolicy, apply_boundary_policy

__all__ = [
    "ChainForm",
    "GeneratorError",
    "yablo_name",
    "triple_name",
    "ygpp_name",
    "gen_yablo",
    "gen_ygprime",
    "ygprime_graph",
    "gen_ygpp",
    "yg_collapse_map",
    "ygprime_level",
    "gen_only_negative",
    "gen_chain",
    "gen_tree_to_root",
    "gen_random_simply_connected",
]


class GeneratorError(ValueError):
    pass


class ChainForm(enum.Enum):
    NEXT = "next"
    NOT_NEXT = "not_next"
    CONST_TRUE = "const_true"
    CONST_FALSE = "const_false"

    @classmethod
    def parse(cls, tag: str) -> "ChainForm":
        tag = tag.strip().lower()
        aliases = {"not": "not_next", "true": "const_true", "false": "const_false"}
        return cls(aliases.get(tag, tag))


def _check_range(what: str, n: int, lo: int, hi: int) -> None:
    if not lo <= n <= hi:
        raise GeneratorError(f"{what} must be between {lo} and {hi}, got {n}")


def yablo_name(i: int) -> str:
    return f"Y{i}"


def triple_name(i: int, j: int, k: int) -> str:
    return f"(Y{i},Y{j},Y{k})"


def ygpp_name(k: int) -> str:
    return f"<Y{k}>"


def gen_yablo(n: int, policy: TruncationPolicy = TruncationPolicy.CLIP) -> DenotationSystem:
    """Y1..Yn with d(Yi) the conjunction of all later negations.

    The references past ``Yn`` are represented by one out-of-range literal,
    ``!Y(n+1)``, so ``CLIP`` leaves the in-window conjunction (empty for
    ``Yn``) and ``GROUND_c`` adds one conjunct ``!c``.
    """
    _check_range("n", n, 1, 16)
    in_range = _window(n)
    d = {}
    for i in range(1, n + 1):
        template = And([Not(Var(yablo_name(j))) for j in range(i + 1, n + 2)])
        d[yablo_name(i)] = apply_boundary_policy(template, in_range, policy, unwrap_singletons=False)
    return DenotationSystem([yablo_name(i) for i in range(1, n + 1)], d, name=f"yablo-{n}")


def _window(n: int):
    names = {yablo_name(i) for i in range(1, n + 1)}
    names |= {triple_name(i, j, k) for i, j, k in _triples(n)}

    def in_range(name: str) -> bool:
        return name in names

    return in_range


def _triples(n: int) -> list[tuple[int, int, int]]:
    """All (i, j, k) with i < k < j <= n, grouped by the owning Yi."""
    return [
        (i, j, k)
        for i in range(1, n + 1)
        for j in range(i + 2, n + 1)
        for k in range(i + 1, j)
    ]


def gen_ygprime(n: int, policy: TruncationPolicy = TruncationPolicy.CLIP) -> DenotationSystem:
    """The modified Yablo system whose long arrows are factorised.

    Every arrow Yi -> Yj with j >= i + 2 is replaced by the path
    Yi -> (Yi,Yj,Yi+1) -> (Yi,Yj,Yi+2) -> ... -> (Yi,Yj,Yj-1) -> Yj, each
    intermediate vertex denoting its successor.
    """
    _check_range("n", n, 3, 8)
    in_range = _window(n)
    order = []
    d: dict[str, Formula] = {}
    for i in range(1, n + 1):
        name = yablo_name(i)
        order.append(name)
        # j = n + 1 stands for every triple leaving the window
        conj = [Not(Var(yablo_name(i + 1)))]
        conj += [Not(Var(triple_name(i, j, i + 1))) for j in range(i + 2, n + 2)]
        d[name] = apply_boundary_policy(And(conj), in_range, policy, unwrap_singletons=False)
    for i, j, k in sorted(_triples(n)):
        name = triple_name(i, j, k)
        order.append(name)
        d[name] = Var(yablo_name(j)) if k == j - 1 else Var(triple_name(i, j, k + 1))
    return DenotationSystem(order, d, name=f"ygprime-{n}")


def ygprime_level(name: str) -> int:
    """Level k of ``Yk`` and of ``(Yi,Yj,Yk)``."""
    last = name.strip("()").split(",")[-1]
    return int(last[1:])


def ygprime_graph(n: int) -> DiGraph:
    """The arrows of YG' drawn directly from their definition."""
    _check_range("n", n, 3, 8)
    vertices = [yablo_name(i) for i in range(1, n + 1)]
    vertices += [triple_name(i, j, k) for i, j, k in sorted(_triples(n))]
    edges = [(yablo_name(i), yablo_name(i + 1)) for i in range(1, n)]
    for i, j, k in _triples(n):
        if k == i + 1:
            edges.append((yablo_name(i), triple_name(i, j, k)))
        if k < j - 1:
            edges.append((triple_name(i, j, k), triple_name(i, j, k + 1)))
        else:
            edges.append((triple_name(i, j, k), yablo_name(j)))
    return DiGraph(vertices, edges)


def gen_ygpp(n: int) -> DenotationSystem:
    """The chain <Y1> -> ... -> <Yn>; each vertex denotes its successor, the last is true."""
    _check_range("n", n, 1, 24)
    names = [ygpp_name(k) for k in range(1, n + 1)]
    d: dict[str, Formula] = {names[k]: Var(names[k + 1]) for k in range(n - 1)}
    d[names[-1]] = TRUE
    return DenotationSystem(names, d, name=f"ygpp-{n}")


def yg_collapse_map(n: int) -> dict[str, str]:
    """Send Yk and every (Yi,Yj,Yk) to <Yk>."""
    _check_range("n", n, 3, 8)
    f = {yablo_name(k): ygpp_name(k) for k in range(1, n + 1)}
    for i, j, k in sorted(_triples(n)):
        f[triple_name(i, j, k)] = ygpp_name(k)
    return f


def gen_only_negative(n: int, policy: TruncationPolicy = TruncationPolicy.GROUND_FALSE) -> DenotationSystem:
    """d(Yi) = !Y(i+1) & X(i+2) and d(Xi) = !Yi & X(i+1), for Y1..Yn and X3..Xn."""
    _check_range("n", n, 4, 16)
    names = [f"Y{i}" for i in range(1, n + 1)] + [f"X{i}" for i in range(3, n + 1)]
    known = set(names)
    d = {}
    for i in range(1, n + 1):
        d[f"Y{i}"] = apply_boundary_policy(
            And(Not(Var(f"Y{i + 1}")), Var(f"X{i + 2}")), known.__contains__, policy
        )
    for i in range(3, n + 1):
        d[f"X{i}"] = apply_boundary_policy(
            And(Not(Var(f"Y{i}")), Var(f"X{i + 1}")), known.__contains__, policy
        )
    return DenotationSystem(names, d, name=f"only-negative-{n}")


def gen_chain(spec: Sequence[ChainForm | str], open_end: bool = False) -> DenotationSystem:
    """Chain x1 -> x2 -> ... with one denotation form per vertex.

    Constant forms inside the chain are written as a tautology or
    contradiction over the successor, so the arrow survives.  Closed chains
    end in a bare constant; open chains end at the free variable x(n+1).
    """
    forms = [f if isinstance(f, ChainForm) else ChainForm.parse(f) for f in spec]
    _check_range("chain length", len(forms), 1, 20)
    n = len(forms)
    names = [f"x{i}" for i in range(1, n + 1)]
    d: dict[str, Formula] = {}
    for i, form in enumerate(forms):
        has_next = i + 1 < n or open_end
        nxt = Var(f"x{i + 2}")
        if form is ChainForm.NEXT or form is ChainForm.NOT_NEXT:
            if not has_next:
                raise GeneratorError(f"{form.value} needs a successor; the closed chain ends at x{n}")
            d[names[i]] = nxt if form is ChainForm.NEXT else Not(nxt)
        elif not has_next:
            d[names[i]] = TRUE if form is ChainForm.CONST_TRUE else FALSE
        elif form is ChainForm.CONST_TRUE:
            d[names[i]] = Or(nxt, Not(nxt))
        else:
            d[names[i]] = And(nxt, Not(nxt))
    return DenotationSystem(names, d, name=f"chain-{n}{'-open' if open_end else ''}")


def gen_tree_to_root(branching: int, depth: int, transitive: bool = False) -> DenotationSystem:
    """Complete tree whose arrows point to the root; each non-root vertex denotes !parent.

    With ``transitive`` every vertex instead points to all of its ancestors
    and denotes the conjunction of their negations, the Yablo-style reading
    under which "root true, everything else false" is acceptable at any depth.
    """
    if branching < 1 or depth < 0:
        raise GeneratorError("branching must be >= 1 and depth >= 0")
    count = sum(branching**level for level in range(depth + 1))
    if count > 200:
        raise GeneratorError(f"{count} vertices exceed the budget of 200")
    names = ["r"]
    d: dict[str, Formula] = {"r": And()}
    ancestors: dict[str, list[str]] = {"r": []}
    frontier = ["r"]
    for _ in range(depth):
        nxt = []
        for parent in frontier:
            for b in range(1, branching + 1):
                child = f"{parent}_{b}"
                names.append(child)
                ancestors[child] = [parent] + ancestors[parent] if transitive else [parent]
                d[child] = And([Not(Var(a)) for a in ancestors[child]])
                nxt.append(child)
        frontier = nxt
    suffix = "-transitive" if transitive else ""
    return DenotationSystem(names, d, name=f"tree-{branching}-{depth}{suffix}")


def _random_formula(rng: random.Random, names: list[str], depth: int) -> Formula:
    """Random formula in which every name occurs at least once."""
    if not names:
        return rng.choice([TRUE, FALSE])
    if len(names) == 1 and (depth <= 0 or rng.random() < 0.4):
        leaf: Formula = Var(names[0])
        return Not(leaf) if rng.random() < 0.5 else leaf
    if depth <= 0:
        parts: list[Formula] = [Var(x) if rng.random() < 0.5 else Not(Var(x)) for x in names]
        return rng.choice([And, Or])(parts)
    shuffled = names[:]
    rng.shuffle(shuffled)
    cut = rng.randint(1, len(shuffled)) if len(shuffled) > 1 else 1
    groups = [shuffled[:cut], shuffled[cut:]] if cut < len(shuffled) else [shuffled]
    parts = [_random_formula(rng, sorted(grp, key=names.index), depth - 1) for grp in groups]
    # repeat an occurrence now and then so irrelevant-successor cases show up
    if rng.random() < 0.25:
        x = rng.choice(names)
        parts.append(Or(Var(x), Not(Var(x))) if rng.random() < 0.5 else And(Var(x), Not(Var(x))))
    node = rng.choice([And, Or])(parts)
    return Not(node) if rng.random() < 0.3 else node


def gen_random_simply_connected(n: int, seed: int, max_formula_depth: int = 2) -> DenotationSystem:
    """Random closed system whose dependency graph is an oriented forest.

    Vertex i > 1 is linked to one earlier vertex with probability 0.85; the
    link's direction is a coin flip.  A tree edge can never close a cycle, so
    the graph is cycle-free and simply connected whatever the directions.
    """
    _check_range("n", n, 1, 12)
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(1, n + 1)]
    succ: dict[str, list[str]] = {x: [] for x in names}
    for i in range(1, n):
        if rng.random() < 0.85:
            j = rng.randrange(i)
            a, b = names[i], names[j]
            if rng.random() < 0.5:
                a, b = b, a
            succ[a].append(b)
    d = {}
    for x in names:
        targets = sorted(succ[x], key=names.index)
        d[x] = _random_formula(rng, targets, max_formula_depth)
    return DenotationSystem(names, d, name=f"random-sc-{n}-{seed}")
