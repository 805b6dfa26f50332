"""Command-line interface.

Every command prints one JSON result document on stdout and a short human
summary on stderr.  Exit codes: 0 success, 2 bad input or violated
precondition, 3 paradox/danger found under ``--fail-on-paradox`` /
``--fail-on-danger``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from . import __version__
from .danger import DangerLimits, dangerous_orientation_exists, is_dangerous
from .formula import (
    And,
    CapExceededError,
    Const,
    Not,
    Var,
    negative_occurrences,
    occurring,
    relevant,
    to_text,
)
from .generators import (
    ChainForm,
    gen_chain,
    gen_only_negative,
    gen_random_simply_connected,
    gen_tree_to_root,
    gen_yablo,
    gen_ygpp,
    gen_ygprime,
    yg_collapse_map,
)
from .graph import (
    BudgetExceededError,
    DiGraph,
    GraphError,
    UndiGraph,
    collapse,
    digraph_to_text,
    has_undirected_cycle,
    homomorphism_violation,
    map_to_text,
    parse_graph,
    parse_map,
    to_dot,
)
from .solve import (
    ParadoxWitness,
    PreconditionError,
    SolveOutcome,
    Status,
    solve_brute,
    solve_chain,
    solve_simply_connected,
    solve_topological,
    yablo_like_check,
)
from .system import (
    DenotationSystem,
    InvalidSystemError,
    TruncationPolicy,
    check_acceptable,
    dependency_graph,
    parse_system,
    system_to_text,
)

__all__ = ["main", "build_parser", "andnot_graph"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FOUND = 3


class CliError(Exception):
    pass


class _Inputs:
    """Collects input bytes for the digest."""

    def __init__(self) -> None:
        self.hash = hashlib.sha256()

    def read(self, path: str) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}") from exc
        self.hash.update(len(data).to_bytes(8, "big"))
        self.hash.update(data)
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CliError(f"{path} is not UTF-8") from exc

    def add(self, text: str) -> None:
        data = text.encode("utf-8")
        self.hash.update(len(data).to_bytes(8, "big"))
        self.hash.update(data)

    def digest(self) -> str:
        return "sha256:" + self.hash.hexdigest()


def _load_system(inputs: _Inputs, path: str, allow_loops: bool) -> DenotationSystem:
    return parse_system(inputs.read(path), allow_loops=allow_loops)


def _load_digraph(inputs: _Inputs, path: str) -> DiGraph:
    """A graph file, or the dependency graph of a system file."""
    text = inputs.read(path)
    try:
        g = parse_graph(text)
    except GraphError:
        try:
            sys_ = parse_system(text, allow_loops=True)
        except InvalidSystemError as exc:
            raise CliError(f"{path}: neither a graph nor a system file ({exc})") from exc
        return dependency_graph(sys_, include_free=True)
    if isinstance(g, UndiGraph):
        raise CliError(f"{path}: expected a directed graph ('a -> b' lines)")
    return g


def _write(path: str | None, text: str, payload: dict) -> None:
    if path is None:
        payload["text"] = text
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from exc
    payload["output"] = path


# --------------------------------------------------------------------------
# Commands


def cmd_parse(args, inputs: _Inputs) -> tuple[dict, int]:
    s = _load_system(inputs, args.path, args.allow_loops)
    g = dependency_graph(s, include_free=True)
    payload = {
        "name": s.name,
        "normalized": system_to_text(s),
        "vertices": len(s.denoted),
        "edges": len(g.edges),
        "closed": s.is_closed,
        "status": "closed" if s.is_closed else "open",
        "free_vars": list(s.free_vars),
    }
    _summary(f"{len(s.denoted)} vertices, {len(g.edges)} edges, {payload['status']}")
    return payload, EXIT_OK


def andnot_graph(s: DenotationSystem) -> DiGraph:
    """The graph of a system whose denotations are conjunctions of negated variables."""
    edges = []
    for x in s.denoted:
        f = s.d[x]
        if f == Const(True):
            parts: tuple = ()
        elif isinstance(f, And):
            parts = f.children
        else:
            parts = (f,)
        for p in parts:
            if not (isinstance(p, Not) and isinstance(p.child, Var)):
                raise PreconditionError("conjunction of negations", f"d({x}) = {to_text(f)}")
            edges.append((x, p.child.name))
    return DiGraph(s.variables, edges)


def _solve_with(method: str, s: DenotationSystem, free_choice: bool) -> tuple[SolveOutcome, dict]:
    extra: dict = {}
    if method == "brute":
        return solve_brute(s), extra
    if method == "topo":
        return solve_topological(s, free_choice), extra
    if method == "simply":
        return solve_simply_connected(s), extra
    if method == "chain":
        return solve_chain(s, free_choice), extra
    if method == "yablo-like":
        g = andnot_graph(s)
        if s.free_vars:
            raise PreconditionError("closed system", "yablo-like needs every vertex denoted")
        verdict = yablo_like_check(g)
        if isinstance(verdict, ParadoxWitness):
            extra["witness"] = verdict.vertex
            return SolveOutcome(Status.PARADOXICAL, "yablo-like", None, {}), extra
        return SolveOutcome(Status.ACCEPTABLE, "yablo-like", dict(verdict.valuation), {}), extra
    raise CliError(f"unknown method {method!r}")


def cmd_solve(args, inputs: _Inputs) -> tuple[dict, int]:
    s = _load_system(inputs, args.path, args.allow_loops)
    free_choice = args.free_choice == "true"
    if args.method == "auto":
        tried = []
        for method in ("chain", "simply", "topo", "brute"):
            try:
                outcome, extra = _solve_with(method, s, free_choice)
                break
            except PreconditionError as exc:
                tried.append(f"{method}: {exc}")
        extra["skipped"] = tried
    else:
        outcome, extra = _solve_with(args.method, s, free_choice)
    payload = outcome.to_dict(s.variables)
    payload.update(extra)
    if outcome.valuation is not None:
        payload["verified"] = check_acceptable(s, outcome.valuation).acceptable
    _summary(f"{outcome.status.value} (method {outcome.method})")
    code = EXIT_FOUND if args.fail_on_paradox and not outcome.acceptable else EXIT_OK
    return payload, code


def _limits(args) -> DangerLimits:
    return DangerLimits(
        max_vertices=args.budget_vertices,
        max_out_degree=args.budget_outdegree,
        max_candidates=args.budget_candidates,
        max_edges=args.budget_edges,
    )


def cmd_danger(args, inputs: _Inputs) -> tuple[dict, int]:
    g = _load_digraph(inputs, args.path)
    report = is_dangerous(g, _limits(args))
    payload = report.to_dict()
    payload["vertex_order"] = list(g.vertices)
    payload["successor_order"] = {x: list(g.successors(x)) for x in g.vertices}
    _summary("dangerous" if report.dangerous else "not dangerous")
    code = EXIT_FOUND if args.fail_on_danger and report.dangerous else EXIT_OK
    return payload, code


def cmd_orientations(args, inputs: _Inputs) -> tuple[dict, int]:
    u = parse_graph(inputs.read(args.path))
    if isinstance(u, DiGraph):
        if u.edges:
            raise CliError(f"{args.path}: expected an undirected graph ('a -- b' lines)")
        u = UndiGraph(u.vertices, ())
    result = dangerous_orientation_exists(u, _limits(args))
    payload = {
        "exists": result.exists,
        "has_undirected_cycle": has_undirected_cycle(u),
        "orientations_tried": result.orientations_tried,
        "witness": None if result.witness is None else digraph_to_text(result.witness),
        "danger": None if result.report is None else result.report.to_dict(),
    }
    _summary("a dangerous orientation exists" if result.exists else "no dangerous orientation")
    code = EXIT_FOUND if args.fail_on_danger and result.exists else EXIT_OK
    return payload, code


def cmd_generate(args, inputs: _Inputs) -> tuple[dict, int]:
    policy = TruncationPolicy(args.policy) if args.policy else None
    family = args.family
    params: dict = {"family": family}
    if family == "yablo":
        s = gen_yablo(args.n, policy or TruncationPolicy.CLIP)
        params.update(n=args.n, policy=(policy or TruncationPolicy.CLIP).value)
    elif family == "ygprime":
        s = gen_ygprime(args.n, policy or TruncationPolicy.CLIP)
        params.update(n=args.n, policy=(policy or TruncationPolicy.CLIP).value)
    elif family == "ygpp":
        s = gen_ygpp(args.n)
        params.update(n=args.n)
    elif family == "only-negative":
        s = gen_only_negative(args.n, policy or TruncationPolicy.GROUND_FALSE)
        params.update(n=args.n, policy=(policy or TruncationPolicy.GROUND_FALSE).value)
    elif family == "chain":
        if not args.spec:
            raise CliError("chain needs --spec")
        forms = [ChainForm.parse(t) for t in args.spec.split(",")]
        s = gen_chain(forms, open_end=args.open_end)
        params.update(spec=[f.value for f in forms], open_end=args.open_end)
    elif family == "tree":
        s = gen_tree_to_root(args.branching, args.depth, args.transitive)
        params.update(branching=args.branching, depth=args.depth, transitive=args.transitive)
    else:
        s = gen_random_simply_connected(args.n, args.seed, args.max_depth)
        params.update(n=args.n, seed=args.seed, max_depth=args.max_depth)
    inputs.add(json.dumps(params, sort_keys=True))
    text = system_to_text(s)
    g = dependency_graph(s, include_free=True)
    payload = {"parameters": params, "vertices": len(s.denoted), "edges": len(g.edges)}
    _write(args.output, text, payload)
    if args.map_out:
        if family != "ygprime":
            raise CliError("--map-out only applies to ygprime")
        Path(args.map_out).write_text(map_to_text(yg_collapse_map(args.n)), encoding="utf-8")
        payload["map_output"] = args.map_out
    _summary(f"generated {family} with {len(s.denoted)} vertices")
    return payload, EXIT_OK


def cmd_check_hom(args, inputs: _Inputs) -> tuple[dict, int]:
    g = _load_digraph(inputs, args.g)
    h = _load_digraph(inputs, args.h)
    f = parse_map(inputs.read(args.map))
    bad = homomorphism_violation(g, h, f)
    payload = {"homomorphism": bad is None, "violation": None}
    if bad is not None:
        a, b = bad
        payload["violation"] = {"edge": [a, b], "image": [f[a], f[b]]}
        _summary(f"not a homomorphism: {a} -> {b} maps to {f[a]} -> {f[b]}, not an edge")
    else:
        _summary("homomorphism")
    return payload, EXIT_OK


def cmd_collapse(args, inputs: _Inputs) -> tuple[dict, int]:
    g = _load_digraph(inputs, args.g)
    f = parse_map(inputs.read(args.map))
    image = collapse(g, f)
    payload = {"vertices": len(image.vertices), "edges": len(image.edges)}
    _write(args.output, digraph_to_text(image), payload)
    _summary(f"collapsed to {len(image.vertices)} vertices, {len(image.edges)} edges")
    return payload, EXIT_OK


def cmd_export_dot(args, inputs: _Inputs) -> tuple[dict, int]:
    text = inputs.read(args.path)
    marked: list[tuple[str, str]] = []
    try:
        g = parse_graph(text)
        if isinstance(g, UndiGraph):
            raise CliError(f"{args.path}: DOT export needs a directed graph or a system")
        name = Path(args.path).stem
    except GraphError:
        s = parse_system(text, allow_loops=True)
        g = dependency_graph(s, include_free=True)
        name = s.name or Path(args.path).stem
        if args.negation_marks:
            marked = [(a, b) for a, b in g.sorted_edges() if b in negative_occurrences(s.d[a])]
    payload = {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "negation_marked": [list(e) for e in marked],
    }
    _write(args.output, to_dot(g, name, marked), payload)
    return payload, EXIT_OK


def cmd_relevance(args, inputs: _Inputs) -> tuple[dict, int]:
    s = _load_system(inputs, args.path, args.allow_loops)
    rows = {}
    for x in s.denoted:
        names = occurring(s.d[x])
        ordered = [y for y in s.variables if y in names]
        try:
            rel = relevant(s.d[x])
            entry = {"occurring": ordered, "relevant": [y for y in ordered if y in rel]}
        except CapExceededError:
            entry = {"occurring": ordered, "relevant": None}
        rows[x] = entry
    return {"vertices": rows}, EXIT_OK


# --------------------------------------------------------------------------
# Plumbing


def _summary(text: str) -> None:
    print(text, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semdep", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"semdep {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def budgets(sp: argparse.ArgumentParser) -> None:
        defaults = DangerLimits()
        sp.add_argument("--budget-vertices", type=int, default=defaults.max_vertices)
        sp.add_argument("--budget-outdegree", type=int, default=defaults.max_out_degree)
        sp.add_argument("--budget-candidates", type=int, default=defaults.max_candidates)
        sp.add_argument("--budget-edges", type=int, default=defaults.max_edges)
        sp.add_argument("--fail-on-danger", action="store_true")

    sp = sub.add_parser("parse", help="parse a system file and echo it normalized")
    sp.add_argument("path")
    sp.add_argument("--allow-loops", action="store_true")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("solve", help="find an acceptable valuation")
    sp.add_argument("path")
    sp.add_argument(
        "--method", default="auto", choices=["auto", "brute", "topo", "simply", "chain", "yablo-like"]
    )
    sp.add_argument("--free-choice", default="false", choices=["true", "false"])
    sp.add_argument("--allow-loops", action="store_true")
    sp.add_argument("--fail-on-paradox", action="store_true")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("danger", help="decide whether a small digraph is dangerous")
    sp.add_argument("path")
    budgets(sp)
    sp.set_defaults(func=cmd_danger)

    sp = sub.add_parser("orientations", help="search the orientations of an undirected graph")
    sp.add_argument("path")
    budgets(sp)
    sp.set_defaults(func=cmd_orientations)

    sp = sub.add_parser("generate", help="write a generated system file")
    sp.add_argument(
        "family", choices=["yablo", "ygprime", "ygpp", "only-negative", "chain", "tree", "random-sc"]
    )
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--policy", choices=[p.value for p in TruncationPolicy])
    sp.add_argument("--spec", help="comma-separated chain forms: next, not, const_true, const_false")
    sp.add_argument("--open-end", action="store_true")
    sp.add_argument("--branching", type=int, default=2)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--transitive", action="store_true", help="tree only: arrows to every ancestor")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-depth", type=int, default=2)
    sp.add_argument("--map-out", help="ygprime only: also write the collapse map here")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("check-hom", help="check a vertex map for the homomorphism property")
    sp.add_argument("g")
    sp.add_argument("h")
    sp.add_argument("map")
    sp.set_defaults(func=cmd_check_hom)

    sp = sub.add_parser("collapse", help="write the image of a graph under a vertex map")
    sp.add_argument("g")
    sp.add_argument("map")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_collapse)

    sp = sub.add_parser("export-dot", help="DOT rendering of a system or graph")
    sp.add_argument("path")
    sp.add_argument("--negation-marks", action="store_true")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_export_dot)

    sp = sub.add_parser("relevance", help="occurring and relevant successors per vertex")
    sp.add_argument("path")
    sp.add_argument("--allow-loops", action="store_true")
    sp.set_defaults(func=cmd_relevance)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    inputs = _Inputs()
    start = time.perf_counter()
    try:
        payload, code = args.func(args, inputs)
    except PreconditionError as exc:
        _summary(f"error: precondition violated: {exc}")
        return EXIT_INPUT
    except (CliError, InvalidSystemError, GraphError, BudgetExceededError, ValueError) as exc:
        _summary(f"error: {exc}")
        return EXIT_INPUT
    doc = {
        "tool_version": __version__,
        "command": args.command,
        "input_digest": inputs.digest(),
        "payload": payload,
        "timing": {"wall_ms": round((time.perf_counter() - start) * 1000, 3)},
    }
    print(json.dumps(doc, indent=2, ensure_ascii=False))
    return code


if __name__ == "__main__":
    sys.exit(main())
