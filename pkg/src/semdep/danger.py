"""Exhaustive dangerousness checks for small labelled digraphs.

A graph is dangerous when some system with exactly this dependency graph has
no acceptable valuation.  Whether a system has one depends only on the
Boolean function each vertex denotes, so the search runs over truth tables:
one table per vertex, with one column per successor (successors in vertex
order, the first successor most significant, row 0 = all successors false).
Tables are counted like binary numbers whose most significant digit is row
0, and candidates are ordered row-major with the first vertex most
significant.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .formula import from_truth_table
from .graph import BudgetExceededError, DiGraph, UndiGraph, orientations
from .solve import solve_brute
from .system import DenotationSystem

__all__ = [
    "DangerLimits",
    "DangerReport",
    "OrientationReport",
    "realize_candidate",
    "is_dangerous",
    "dangerous_orientation_exists",
    "table_bits",
    "bits_table",
]

# booleans materialised per vectorised block
_BLOCK = 1 << 22


@dataclass(frozen=True)
class DangerLimits:
    max_vertices: int = 5
    max_out_degree: int = 3
    max_candidates: int = 1 << 26
    max_edges: int = 16


@dataclass
class DangerReport:
    dangerous: bool
    witness: dict[str, tuple[bool, ...]] | None
    candidates_tried: int
    limits: DangerLimits = field(default_factory=DangerLimits)

    def to_dict(self) -> dict:
        return {
            "dangerous": self.dangerous,
            "witness": None
            if self.witness is None
            else {x: table_bits(t) for x, t in self.witness.items()},
            "candidates_tried": self.candidates_tried,
            "limits": asdict(self.limits),
        }


@dataclass
class OrientationReport:
    exists: bool
    witness: DiGraph | None
    report: DangerReport | None
    orientations_tried: int


def table_bits(table: tuple[bool, ...]) -> str:
    """Render a table as a bit string, row 0 (all successors false) first."""
    return "".join("1" if b else "0" for b in table)


def bits_table(bits: str) -> tuple[bool, ...]:
    if set(bits) - {"0", "1"}:
        raise ValueError(f"not a bit string: {bits!r}")
    return tuple(b == "1" for b in bits)


def _table_of(index: int, rows: int) -> tuple[bool, ...]:
    return tuple(bool((index >> (rows - 1 - r)) & 1) for r in range(rows))


def realize_candidate(g: DiGraph, candidate: Mapping[str, tuple[bool, ...]]) -> DenotationSystem:
    """System whose vertex x denotes the Shannon expansion of its table.

    Every successor occurs in the expansion, so the dependency graph is g.
    """
    d = {}
    for x in g.vertices:
        if x not in candidate:
            raise ValueError(f"candidate has no table for {x!r}")
        succs = g.successors(x)
        table = tuple(candidate[x])
        if len(table) != 1 << len(succs):
            raise ValueError(f"table for {x!r} has {len(table)} rows, expected {1 << len(succs)}")
        d[x] = from_truth_table(succs, table)
    return DenotationSystem(g.vertices, d, allow_loops=True)


def _check_limits(g: DiGraph, limits: DangerLimits) -> None:
    if len(g.vertices) > limits.max_vertices:
        raise BudgetExceededError(
            f"{len(g.vertices)} vertices exceed the budget of {limits.max_vertices}"
        )
    for x in g.vertices:
        if g.out_degree(x) > limits.max_out_degree:
            raise BudgetExceededError(
                f"out-degree {g.out_degree(x)} of {x!r} exceeds the budget of {limits.max_out_degree}"
            )


def _agreement(g: DiGraph) -> list[np.ndarray]:
    """Per vertex x, a (tables, valuations) mask: table value at x's row == [x]."""
    n = len(g.vertices)
    pos = {x: i for i, x in enumerate(g.vertices)}
    u = np.arange(1 << n)
    bit = {x: (u >> (n - 1 - pos[x])) & 1 for x in g.vertices}
    masks = []
    for x in g.vertices:
        succs = g.successors(x)
        k = len(succs)
        row = np.zeros_like(u)
        for j, y in enumerate(succs):
            row |= bit[y] << (k - 1 - j)
        rows = 1 << k
        t = np.arange(1 << rows)[:, None]
        value = (t >> (rows - 1 - row[None, :])) & 1
        masks.append(value == bit[x][None, :])
    return masks


class _Search:
    def __init__(self, masks: list[np.ndarray], limit: int) -> None:
        self.masks = masks
        self.sizes = [m.shape[0] for m in masks]
        self.limit = limit
        self.examined = 0
        self.width = masks[0].shape[1] if masks else 1

    def remaining(self, k: int) -> int:
        return int(np.prod(self.sizes[k:], dtype=object)) if k < len(self.sizes) else 1

    def run(self, k: int, mask: np.ndarray) -> int | None:
        """Offset (within the block of candidates below ``k``) of the first unsatisfiable one."""
        total = self.remaining(k)
        if not mask.any():
            return 0
        if total * self.width <= _BLOCK:
            self._charge(total)
            block = mask[None, :]
            for m in self.masks[k:]:
                block = (block[:, None, :] & m[None, :, :]).reshape(-1, self.width)
            unsat = np.flatnonzero(~block.any(axis=1))
            return int(unsat[0]) if unsat.size else None
        below = self.remaining(k + 1)
        for t in range(self.sizes[k]):
            found = self.run(k + 1, mask & self.masks[k][t])
            if found is not None:
                return t * below + found
        return None

    def _charge(self, count: int) -> None:
        self.examined += count
        if self.examined > self.limit:
            raise BudgetExceededError(
                f"more than {self.limit} candidates needed without reaching a verdict"
            )


def _decode(g: DiGraph, index: int) -> dict[str, tuple[bool, ...]]:
    tables = {}
    for x in reversed(g.vertices):
        rows = 1 << g.out_degree(x)
        count = 1 << rows
        index, t = divmod(index, count)
        tables[x] = _table_of(t, rows)
    return {x: tables[x] for x in g.vertices}


def _candidates(g: DiGraph) -> Iterator[dict[str, tuple[bool, ...]]]:
    per_vertex = []
    for x in g.vertices:
        rows = 1 << g.out_degree(x)
        per_vertex.append([_table_of(t, rows) for t in range(1 << rows)])
    for combo in itertools.product(*per_vertex):
        yield dict(zip(g.vertices, combo))


def is_dangerous(
    g: DiGraph, limits: DangerLimits | None = None, literal: bool = False
) -> DangerReport:
    """Search every candidate for one without an acceptable valuation.

    The default route tests all valuations of a whole block of candidates at
    once with boolean arrays.  ``literal=True`` instead realises each
    candidate as a system and hands it to the brute-force solver; both visit
    candidates in the same order and return the same report.
    """
    limits = limits or DangerLimits()
    _check_limits(g, limits)
    if literal:
        tried = 0
        for cand in _candidates(g):
            tried += 1
            if tried > limits.max_candidates:
                raise BudgetExceededError(f"more than {limits.max_candidates} candidates")
            if not solve_brute(realize_candidate(g, cand)).acceptable:
                return DangerReport(True, cand, tried, limits)
        return DangerReport(False, None, tried, limits)

    search = _Search(_agreement(g), limits.max_candidates)
    found = search.run(0, np.ones(1 << len(g.vertices), dtype=bool))
    if found is None:
        return DangerReport(False, None, search.remaining(0), limits)
    witness = _decode(g, found)
    if solve_brute(realize_candidate(g, witness)).acceptable:
        raise AssertionError("danger witness has an acceptable valuation")
    return DangerReport(True, witness, found + 1, limits)


def dangerous_orientation_exists(u: UndiGraph, limits: DangerLimits | None = None) -> OrientationReport:
    limits = limits or DangerLimits()
    tried = 0
    for g in orientations(u, max_edges=limits.max_edges):
        tried += 1
        report = is_dangerous(g, limits)
        if report.dangerous:
            return OrientationReport(True, g, report, tried)
    return OrientationReport(False, None, None, tried)
