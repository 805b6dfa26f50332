"""Acceptance suite: one or more tests per numbered criterion.

Run with ``pytest tests/test_acceptance.py``; the terminal summary ends with
one ``criterion N: PASS|FAIL`` line per criterion.
"""

import itertools
import json
import random
import time

import pytest

from semdep.cli import main
from semdep.danger import dangerous_orientation_exists, is_dangerous, realize_candidate
from semdep.formula import (
    FALSE,
    TRUE,
    And,
    Not,
    Or,
    ThreeValued,
    Var,
    eval_partial,
    evaluate,
    occurring,
    parse_formula,
    simplify,
    substitute,
    to_text,
)
from semdep.generators import (
    ChainForm,
    gen_chain,
    gen_only_negative,
    gen_random_simply_connected,
    gen_yablo,
    gen_ygpp,
    gen_ygprime,
    triple_name,
    yablo_name,
    yg_collapse_map,
)
from semdep.graph import (
    DiGraph,
    UndiGraph,
    collapse,
    has_undirected_cycle,
    is_cycle_free,
    is_homomorphism,
    is_transitive,
    transitive_closure,
)
from semdep.solve import (
    ParadoxWitness,
    SafeValuation,
    Status,
    enumerate_acceptable,
    induced_andnot_system,
    solve_brute,
    solve_chain,
    solve_simply_connected,
    solve_topological,
    yablo_like_check,
)
from semdep.system import TruncationPolicy, check_acceptable

from .conftest import fixpoints, py_eval

criterion = pytest.mark.criterion


class Clock:
    def __init__(self, limit_s):
        self.limit_s = limit_s

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit_s, f"took {self.elapsed:.1f}s, target {self.limit_s}s"


# 1 --------------------------------------------------------------------------


@criterion(1, "simply connected systems are never paradoxical (200 seeded instances)")
def test_criterion_1_simply_connected_oracle_agreement():
    rng = random.Random(20240601)
    with Clock(60):
        for _ in range(200):
            n = rng.randint(1, 10)
            s = gen_random_simply_connected(n, rng.randrange(2**32), rng.randint(0, 3))
            out = solve_simply_connected(s)
            assert out.status is Status.ACCEPTABLE
            assert check_acceptable(s, out.valuation).acceptable
            assert solve_brute(s).status is Status.ACCEPTABLE


# 2 --------------------------------------------------------------------------


@criterion(2, "all 512 closed chains of length 5 have exactly one valuation")
def test_criterion_2_integer_chains():
    count = 0
    with Clock(30):
        for head in itertools.product(list(ChainForm), repeat=4):
            for last in (ChainForm.CONST_TRUE, ChainForm.CONST_FALSE):
                s = gen_chain([*head, last])
                out = solve_chain(s)
                assert out.status is Status.ACCEPTABLE
                assert out.valuation == solve_brute(s).valuation
                assert enumerate_acceptable(s) == [out.valuation]
                count += 1
    assert count == 4**4 * 2


# 3 --------------------------------------------------------------------------


def labelled_dags(n):
    verts = "abcd"[:n]
    pairs = [(x, y) for x in verts for y in verts if x != y]
    for mask in range(1 << len(pairs)):
        g = DiGraph(verts, [p for i, p in enumerate(pairs) if mask >> i & 1])
        if is_cycle_free(g):
            yield g


@criterion(3, "every cycle-free digraph on <= 4 vertices is not dangerous")
def test_criterion_3_finite_branching_safety():
    counts = []
    with Clock(600):
        for n in range(0, 5):
            graphs = list(labelled_dags(n))
            counts.append(len(graphs))
            for g in graphs:
                assert not is_dangerous(g).dangerous
    # labelled DAG counts, OEIS A003024
    assert counts == [1, 1, 3, 25, 543]


# 4 --------------------------------------------------------------------------


def undirected_graphs(n, max_edges):
    verts = "abcd"[:n]
    pairs = list(itertools.combinations(verts, 2))
    for k in range(0, min(max_edges, len(pairs)) + 1):
        for chosen in itertools.combinations(pairs, k):
            yield UndiGraph(verts, chosen)


@criterion(4, "a dangerous orientation exists iff the graph has a cycle (<= 4 vertices, <= 5 edges)")
def test_criterion_4_orientation_desk_check():
    seen = 0
    with Clock(900):
        for n in range(0, 5):
            for u in undirected_graphs(n, 5):
                result = dangerous_orientation_exists(u)
                assert result.exists == has_undirected_cycle(u), sorted(u.sorted_edges())
                if result.exists:
                    witness = realize_candidate(result.witness, result.report.witness)
                    assert not solve_brute(witness).acceptable
                seen += 1
    assert seen == 1 + 1 + 2 + 8 + 63


# 5 --------------------------------------------------------------------------


@criterion(5, "YG' collapse pipeline and propagation identities")
def test_criterion_5_collapse_pipeline():
    with Clock(30):
        for n in range(3, 7):
            g = gen_ygprime(n, TruncationPolicy.CLIP).graph()
            h = gen_ygpp(n).graph()
            f = yg_collapse_map(n)
            assert is_homomorphism(g, h, f)
            assert collapse(g, f) == h
            assert solve_chain(gen_ygpp(n)).status is Status.ACCEPTABLE


@criterion(5, "YG' collapse pipeline and propagation identities")
def test_criterion_5_propagation_identities():
    with Clock(30):
        for n in range(3, 7):
            s = gen_ygprime(n, TruncationPolicy.CLIP)
            if len(s.denoted) <= 16:
                [v] = enumerate_acceptable(s)
            else:
                # cycle-free closed systems have exactly one acceptable valuation
                assert is_cycle_free(s.graph())
                v = solve_topological(s).valuation
            assert check_acceptable(s, v).acceptable
            for i in range(1, n + 1):
                for j in range(i + 2, n + 1):
                    for k in range(i + 1, j - 1):
                        assert v[triple_name(i, j, k)] == v[triple_name(i, j, k + 1)]
                    assert v[triple_name(i, j, j - 1)] == v[yablo_name(j)]


# 6 --------------------------------------------------------------------------


def random_dag(rng, n):
    names = [f"v{i}" for i in range(n)]
    order = names[:]
    rng.shuffle(order)
    edges = [
        (order[a], order[b])
        for a in range(n)
        for b in range(a + 1, n)
        if rng.random() < 0.35
    ]
    return DiGraph(names, edges)


@criterion(6, "Yablo-like check on transitive DAG closures and looped graphs")
def test_criterion_6_transitive_dags_are_safe():
    rng = random.Random(6)
    with Clock(60):
        for _ in range(100):
            g = transitive_closure(random_dag(rng, rng.randint(1, 10)))
            verdict = yablo_like_check(g)
            assert isinstance(verdict, SafeValuation)
            assert check_acceptable(induced_andnot_system(g), verdict.valuation).acceptable


def transitive_graphs_with_loop(n):
    verts = "abcd"[:n]
    pairs = [(x, y) for x in verts for y in verts]
    for mask in range(1 << len(pairs)):
        g = DiGraph(verts, [p for i, p in enumerate(pairs) if mask >> i & 1])
        if any(a == b for a, b in g.edges) and is_transitive(g):
            yield g


@criterion(6, "Yablo-like check on transitive DAG closures and looped graphs")
def test_criterion_6_loop_graphs_are_paradoxical():
    # Checked as stated, over every transitive digraph on <= 4 vertices that
    # contains a loop.  The claim does not hold: a loop vertex x with a sink
    # successor z induces x = !x & !z, z = TRUE, which has the acceptable
    # valuation z = true, x = false.  The failure is expected.
    counterexamples = []
    with Clock(60):
        for n in range(1, 5):
            for g in transitive_graphs_with_loop(n):
                verdict = yablo_like_check(g)
                paradoxical = not solve_brute(induced_andnot_system(g)).acceptable
                if not (isinstance(verdict, ParadoxWitness) and paradoxical):
                    counterexamples.append(g.sorted_edges())
    assert not counterexamples, (
        f"{len(counterexamples)} looped transitive graphs are not paradoxical, "
        f"smallest: {min(counterexamples, key=len)}"
    )


# 7 --------------------------------------------------------------------------


@criterion(7, "truncated Yablo has exactly one valuation: Yn true, the rest false")
def test_criterion_7_truncated_yablo_uniqueness():
    with Clock(5):
        for n in range(2, 11):
            s = gen_yablo(n, TruncationPolicy.CLIP)
            expected = {yablo_name(i): i == n for i in range(1, n + 1)}
            assert enumerate_acceptable(s) == [expected]
    # independent evaluator at the small end of the range
    for n in range(2, 7):
        assert fixpoints(gen_yablo(n)) == [{yablo_name(i): i == n for i in range(1, n + 1)}]


# 8 --------------------------------------------------------------------------


@criterion(8, "Only-Negative: all-false is acceptable and Y1 is always false")
def test_criterion_8_only_negative_procrastination():
    with Clock(60):
        for n in range(5, 9):
            s = gen_only_negative(n, TruncationPolicy.GROUND_FALSE)
            assert check_acceptable(s, dict.fromkeys(s.variables, False)).acceptable
            found = enumerate_acceptable(s)
            assert found
            assert all(v["Y1"] is False for v in found)


# 9 --------------------------------------------------------------------------

NAMES = ["a", "b", "c", "Y2", "x_1", "(Y1,Y3,Y2)", "<Y4>", "TRUE"]


def random_formula(rng, depth):
    """Printable formula: junctions always have at least two children."""
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.1:
            return rng.choice([TRUE, FALSE])
        return Var(rng.choice(NAMES))
    kind = rng.random()
    if kind < 0.3:
        return Not(random_formula(rng, depth - 1))
    children = [random_formula(rng, depth - 1) for _ in range(rng.randint(2, 4))]
    return And(children) if kind < 0.65 else Or(children)


def random_valuation(rng):
    return {n: rng.random() < 0.5 for n in NAMES}


@criterion(9, "formula round trip, coherence and CLI determinism")
def test_criterion_9_round_trip():
    rng = random.Random(9)
    with Clock(60):
        for _ in range(1000):
            f = random_formula(rng, 5)
            assert parse_formula(to_text(f)) == f


@criterion(9, "formula round trip, coherence and CLI determinism")
def test_criterion_9_coherence():
    rng = random.Random(99)
    with Clock(60):
        for _ in range(1000):
            f = random_formula(rng, 5)
            v = random_valuation(rng)
            value = evaluate(f, v)
            assert value == py_eval(f, v)
            assert evaluate(simplify(f), v) == value
            name = rng.choice(NAMES)
            assert evaluate(substitute(f, name, v[name]), v) == value
            partial = {k: b for k, b in v.items() if rng.random() < 0.5}
            known = eval_partial(f, partial)
            if known is not ThreeValued.UNKNOWN:
                assert (known is ThreeValued.TRUE) == value
            if not occurring(f):
                assert eval_partial(f, {}) is not ThreeValued.UNKNOWN


def document(capsys, argv):
    assert main(argv) in (0, 3)
    out = capsys.readouterr().out
    doc = json.loads(out)
    doc.pop("timing")
    return json.dumps(doc, indent=2)


@criterion(9, "formula round trip, coherence and CLI determinism")
def test_criterion_9_cli_determinism(tmp_path, capsys):
    families = [
        ["yablo", "--n", "5"],
        ["ygprime", "--n", "4"],
        ["ygpp", "--n", "4"],
        ["only-negative", "--n", "5"],
        ["chain", "--spec", "not,next,const_true"],
        ["tree", "--branching", "2", "--depth", "2"],
        ["random-sc", "--n", "7", "--seed", "42"],
    ]
    with Clock(60):
        for k, fam in enumerate(families):
            path = tmp_path / f"s{k}.sys"
            first = document(capsys, ["generate", *fam, "-o", str(path)])
            text = path.read_text()
            assert document(capsys, ["generate", *fam, "-o", str(path)]) == first
            assert path.read_text() == text
            parsed = json.loads(document(capsys, ["parse", str(path)]))
            assert parsed["payload"]["normalized"] == text
            for argv in (["parse", str(path)], ["solve", str(path)], ["relevance", str(path)],
                         ["export-dot", str(path), "--negation-marks"]):
                assert document(capsys, argv) == document(capsys, argv)
        graph = tmp_path / "tri.g"
        graph.write_text("a -> b\nb -> c\nc -> a\n")
        assert document(capsys, ["danger", str(graph)]) == document(capsys, ["danger", str(graph)])
