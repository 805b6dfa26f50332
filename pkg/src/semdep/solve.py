"""Acceptable-valuation solvers.

``solve_brute`` is the exhaustive oracle.  The specialised solvers each need
a structural precondition on the dependency graph (free variables included
as sinks) and always succeed when it holds:

* ``solve_topological``: cycle-free graphs, evaluated bottom-up;
* ``solve_simply_connected``: forests without anti-parallel edges, solved by
  local simplification plus component-wise choices;
* ``solve_chain``: disjoint unions of paths where each denotation is the
  successor, its negation, or a constant.

``yablo_like_check`` decides the conjunction-of-negations systems induced by
a transitive graph.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .formula import (
    DEFAULT_CAP,
    And,
    CapExceededError,
    Formula,
    Not,
    Var,
    evaluate,
    is_semantic_constant,
    occurring,
    relevant,
    simplify,
    substitute,
    truth_table,
)
from .graph import (
    DiGraph,
    is_cycle_free,
    is_simply_connected,
    is_transitive,
    topological_order,
)
from .system import DenotationSystem, check_acceptable, dependency_graph

__all__ = [
    "Status",
    "SolveOutcome",
    "ParadoxWitness",
    "SafeValuation",
    "PreconditionError",
    "BRUTE_BUDGET",
    "solve_brute",
    "enumerate_acceptable",
    "solve_topological",
    "solve_simply_connected",
    "solve_chain",
    "yablo_like_check",
    "induced_andnot_system",
]

BRUTE_BUDGET = 24


class Status(enum.Enum):
    ACCEPTABLE = "acceptable"
    PARADOXICAL = "paradoxical"


class PreconditionError(ValueError):
    """A solver was handed a system outside its domain."""

    def __init__(self, precondition: str, detail: str = "") -> None:
        super().__init__(f"{precondition}: {detail}" if detail else precondition)
        self.precondition = precondition


@dataclass
class SolveOutcome:
    status: Status
    method: str
    valuation: dict[str, bool] | None = None
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def acceptable(self) -> bool:
        return self.status is Status.ACCEPTABLE

    def to_dict(self, order: tuple[str, ...] | None = None) -> dict:
        valuation = None
        if self.valuation is not None:
            keys = order if order is not None else tuple(self.valuation)
            valuation = {k: self.valuation[k] for k in keys}
        return {
            "status": self.status.value,
            "method": self.method,
            "valuation": valuation,
            "stats": dict(self.stats),
        }


@dataclass(frozen=True)
class ParadoxWitness:
    vertex: str


@dataclass(frozen=True)
class SafeValuation:
    valuation: Mapping[str, bool]


# --------------------------------------------------------------------------
# Brute force


def _valuations(sys: DenotationSystem):
    names = sys.variables
    if len(names) > BRUTE_BUDGET:
        raise PreconditionError(
            "variable budget exceeded", f"{len(names)} variables, at most {BRUTE_BUDGET}"
        )
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))


def _is_fixpoint(sys: DenotationSystem, v: Mapping[str, bool]) -> bool:
    return all(evaluate(sys.d[s], v) == v[s] for s in sys.denoted)


def solve_brute(sys: DenotationSystem) -> SolveOutcome:
    """First acceptable valuation in lexicographic order (false before true)."""
    tried = 0
    for v in _valuations(sys):
        tried += 1
        if _is_fixpoint(sys, v):
            return SolveOutcome(Status.ACCEPTABLE, "brute", v, {"valuations_tried": tried})
    return SolveOutcome(Status.PARADOXICAL, "brute", None, {"valuations_tried": tried})


def enumerate_acceptable(sys: DenotationSystem) -> list[dict[str, bool]]:
    return [v for v in _valuations(sys) if _is_fixpoint(sys, v)]


# --------------------------------------------------------------------------
# Cycle-free systems


def solve_topological(
    sys: DenotationSystem, free_choice: Mapping[str, bool] | bool = False
) -> SolveOutcome:
    """Evaluate sinks first, then every vertex once its successors are known.

    ``free_choice`` fixes the free variables, either per variable or all to
    one value.
    """
    g = dependency_graph(sys, include_free=True)
    order = topological_order(g)
    if order is None:
        raise PreconditionError("cycle-free", "the dependency graph has a directed cycle")
    v = _free_values(sys, free_choice)
    for x in reversed(order):
        if x in sys.d:
            v[x] = evaluate(sys.d[x], v)
    return SolveOutcome(Status.ACCEPTABLE, "topo", _in_order(sys, v), {"evaluations": len(sys.denoted)})


def _free_values(sys: DenotationSystem, free_choice: Mapping[str, bool] | bool) -> dict[str, bool]:
    if isinstance(free_choice, bool):
        return {x: free_choice for x in sys.free_vars}
    return {x: bool(free_choice.get(x, False)) for x in sys.free_vars}


def _in_order(sys: DenotationSystem, v: Mapping[str, bool]) -> dict[str, bool]:
    return {x: v[x] for x in sys.variables}


# --------------------------------------------------------------------------
# Simply connected systems


class _Work:
    """Mutable working copy of a system and its graph."""

    def __init__(self, sys: DenotationSystem, cap: int) -> None:
        self.order = sys.variables
        self.rank = {x: i for i, x in enumerate(self.order)}
        self.d: dict[str, Formula] = dict(sys.d)
        g = dependency_graph(sys, include_free=True)
        self.succ: dict[str, set[str]] = {x: set(g.successors(x)) for x in self.order}
        self.pred: dict[str, set[str]] = {x: set(g.predecessors(x)) for x in self.order}
        self.value: dict[str, bool] = {}
        self.cap = cap
        self.stats = {"edges_erased": 0, "choices_made": 0, "constants_propagated": 0}

    def erase(self, a: str, b: str) -> None:
        self.succ[a].discard(b)
        self.pred[b].discard(a)
        self.stats["edges_erased"] += 1

    def replace(self, x: str, var: str, c: bool) -> None:
        """Substitute ``c`` for ``var`` in d(x) and drop the edge x -> var."""
        self.d[x] = simplify(substitute(self.d[x], var, c))
        self.erase(x, var)
        # folding can drop other successors along with the constant
        left = occurring(self.d[x])
        for y in sorted(self.succ[x] - left, key=self.rank.__getitem__):
            self.erase(x, y)

    def fix(self, x: str, c: bool) -> list[str]:
        """Record [x] = c and cut x off from its predecessors.

        Returns the predecessors whose denotation changed.
        """
        if x in self.value and self.value[x] != c:
            raise AssertionError(f"conflicting values for {x!r}")
        self.value[x] = c
        preds = sorted(self.pred[x], key=self.rank.__getitem__)
        for p in preds:
            self.replace(p, x, c)
        return preds

    def local_step(self, queue: list[str]) -> None:
        """Erase irrelevant arrows and propagate forced constants upward."""
        queue = list(queue)
        while queue:
            x = queue.pop(0)
            if x not in self.d or x in self.value:
                continue
            f = self.d[x]
            names = occurring(f)
            try:
                keep = relevant(f, self.cap)
            except CapExceededError:
                keep = names
            for y in sorted(names - keep, key=self.rank.__getitem__):
                self.replace(x, y, True)
            f = self.d[x]
            if not occurring(f):
                c = evaluate(f, {})
                self.stats["constants_propagated"] += 1
                queue.extend(self.fix(x, c))

    def realize(self, x: str, c: bool) -> dict[str, bool]:
        """Least assignment (false first) of x's successors making d(x) equal c."""
        names = sorted(self.succ[x], key=self.rank.__getitem__)
        if occurring(self.d[x]) != set(names):
            raise AssertionError(f"edges and occurrences of {x!r} disagree")
        for r, value in enumerate(truth_table(self.d[x], names)):
            if value == c:
                k = len(names)
                return {n: bool((r >> (k - 1 - i)) & 1) for i, n in enumerate(names)}
        raise AssertionError(f"d({x!r}) cannot take the value {c}")


def solve_simply_connected(sys: DenotationSystem, cap: int = DEFAULT_CAP) -> SolveOutcome:
    """Constructive solver for simply connected, cycle-free systems.

    First every denotation is simplified locally: irrelevant successors are
    replaced by a constant and their arrows erased, and a denotation that
    becomes constant fixes its vertex, whose value is pushed into the
    predecessors.  Then, component by component, the first undetermined
    vertex takes the value true; the value is pushed into its predecessors
    and the least successor assignment realising it is chosen.  Every erased
    arrow splits a component, so the pending successor values never
    interact; they are processed with their value given instead of chosen.
    """
    g = dependency_graph(sys, include_free=True)
    if not is_cycle_free(g):
        raise PreconditionError("cycle-free", "the dependency graph has a directed cycle")
    if not is_simply_connected(g):
        raise PreconditionError("simply connected", "two vertices are joined by more than one path")
    w = _Work(sys, cap)
    w.local_step(list(sys.denoted))

    pending: list[tuple[str, bool]] = []
    while True:
        if pending:
            x, c = pending.pop(0)
        else:
            undetermined = [x for x in w.order if x not in w.value]
            if not undetermined:
                break
            x, c = undetermined[0], True
            w.stats["choices_made"] += 1
        changed = w.fix(x, c)
        if x in w.d:
            chosen = w.realize(x, c)
            for y in sorted(chosen, key=w.rank.__getitem__):
                w.erase(x, y)
            pending.extend((y, chosen[y]) for y in sorted(chosen, key=w.rank.__getitem__))
        w.local_step(changed)

    v = _in_order(sys, w.value)
    report = check_acceptable(sys, v)
    if not report.acceptable:
        raise AssertionError(f"constructed valuation violates {report.violations}")
    return SolveOutcome(Status.ACCEPTABLE, "simply", v, w.stats)


# --------------------------------------------------------------------------
# Chains


class _Form(enum.Enum):
    NEXT = "next"
    NOT_NEXT = "not_next"
    CONST = "const"


def _classify(sys: DenotationSystem, x: str, nxt: str | None) -> tuple[_Form, bool | None]:
    f = sys.d[x]
    names = occurring(f)
    if nxt is None:
        if names:
            raise PreconditionError("chain shape", f"terminal vertex {x!r} mentions {sorted(names)}")
        return _Form.CONST, evaluate(f, {})
    if names != {nxt}:
        raise PreconditionError("chain shape", f"d({x}) must mention exactly its successor {nxt!r}")
    c = is_semantic_constant(f)
    if c is not None:
        return _Form.CONST, c
    table = truth_table(f, [nxt])
    return (_Form.NEXT, None) if table == [False, True] else (_Form.NOT_NEXT, None)


def _paths(g: DiGraph) -> list[list[str]]:
    for x in g.vertices:
        if len(g.successors(x)) > 1 or len(g.predecessors(x)) > 1:
            raise PreconditionError("chain shape", f"{x!r} branches")
    if not is_cycle_free(g):
        raise PreconditionError("chain shape", "the dependency graph has a directed cycle")
    paths = []
    for start in g.vertices:
        if g.predecessors(start):
            continue
        path = [start]
        while g.successors(path[-1]):
            path.append(g.successors(path[-1])[0])
        paths.append(path)
    return paths


def solve_chain(sys: DenotationSystem, free_choice: Mapping[str, bool] | bool = False) -> SolveOutcome:
    """Solve a union of successor chains.

    Each path splits at its constants.  Below a constant the value is pushed
    downward (towards smaller indices) until the next constant restarts the
    propagation.  The segment above the highest constant ends in a free
    variable whose value is a choice (``free_choice``), then pushed downward
    the same way; a path with no constant at all is that segment entirely.
    """
    g = dependency_graph(sys, include_free=True)
    paths = _paths(g)
    free = _free_values(sys, free_choice)
    v: dict[str, bool] = {}
    stats = {"paths": len(paths), "constants": 0, "all_constant": 0, "no_constant": 0, "mixed": 0}
    for path in paths:
        forms = {}
        for i, x in enumerate(path):
            if x in sys.d:
                nxt = path[i + 1] if i + 1 < len(path) else None
                forms[x] = _classify(sys, x, nxt)
        denoted = [x for x in path if x in sys.d]
        consts = [x for x in denoted if forms[x][0] is _Form.CONST]
        stats["constants"] += len(consts)
        if consts and len(consts) == len(denoted):
            stats["all_constant"] += 1
        elif not consts:
            stats["no_constant"] += 1
        else:
            stats["mixed"] += 1
        for i in range(len(path) - 1, -1, -1):
            x = path[i]
            if x not in sys.d:
                v[x] = free[x]
                continue
            form, c = forms[x]
            if form is _Form.CONST:
                v[x] = c
            elif form is _Form.NEXT:
                v[x] = v[path[i + 1]]
            else:
                v[x] = not v[path[i + 1]]
    return SolveOutcome(Status.ACCEPTABLE, "chain", _in_order(sys, v), stats)


# --------------------------------------------------------------------------
# Yablo-like systems


def induced_andnot_system(g: DiGraph) -> DenotationSystem:
    """d(x) = conjunction of the negated successors of x."""
    d = {x: And([Not(Var(y)) for y in g.successors(x)]) for x in g.vertices}
    return DenotationSystem(g.vertices, d, allow_loops=True)


def yablo_like_check(g: DiGraph) -> ParadoxWitness | SafeValuation:
    """Decide the conjunction-of-negations system induced by a transitive graph.

    A vertex with successors all of which have successors makes the system
    paradoxical.  Without one, making exactly the sinks true is acceptable.
    """
    if not is_transitive(g):
        raise PreconditionError("transitive", "the graph is not transitive")
    for x in g.vertices:
        succs = g.successors(x)
        if succs and all(g.successors(y) for y in succs):
            return ParadoxWitness(x)
    return SafeValuation({x: not g.successors(x) for x in g.vertices})

