import pytest
from hypothesis import given
from hypothesis import strategies as st

from semdep.formula import FALSE, TRUE, And, Not, Var, occurring
from semdep.generators import gen_yablo, gen_ygprime
from semdep.system import (
    DenotationSystem,
    InvalidSystemError,
    TruncationPolicy,
    apply_boundary_policy,
    check_acceptable,
    dependency_graph,
    parse_system,
    system_to_text,
)

from .conftest import fixpoints, formulas


def test_parse_closed_system():
    s = parse_system("Y1 = !Y2\nY2 = TRUE")
    assert s.denoted == ("Y1", "Y2")
    assert s.is_closed


def test_parse_open_system():
    s = parse_system("X = !Y")
    assert s.denoted == ("X",)
    assert s.free_vars == ("Y",)
    assert not s.is_closed


def test_loop_rejected_unless_allowed():
    with pytest.raises(InvalidSystemError, match="loops"):
        parse_system("X = !X")
    assert parse_system("X = !X", allow_loops=True).d["X"] == Not(Var("X"))


def test_duplicate_vertex_names_line():
    with pytest.raises(InvalidSystemError) as err:
        parse_system("a = b\n\nb = TRUE\na = FALSE\n")
    assert err.value.line == 4
    assert "duplicate" in str(err.value)


def test_header_comments_and_quoted_names():
    text = 'system demo-1  # named\n# comment\n"(Y1,Y3,Y2)" = Y3 # tail\nY3 = TRUE\n'
    s = parse_system(text)
    assert s.name == "demo-1"
    assert s.denoted == ("(Y1,Y3,Y2)", "Y3")


def test_vertex_named_system_is_not_a_header():
    s = parse_system("system = TRUE")
    assert s.denoted == ("system",)


def test_syntax_error_reports_line():
    with pytest.raises(InvalidSystemError) as err:
        parse_system("a = TRUE\nb = a &\n")
    assert err.value.line == 2


def test_print_parse_round_trip_for_generated_systems():
    for s in (gen_yablo(6), gen_ygprime(5)):
        text = system_to_text(s)
        assert system_to_text(parse_system(text)) == text


def test_dependency_graph_examples():
    g = dependency_graph(gen_yablo(3))
    assert g.edges == {("Y1", "Y2"), ("Y1", "Y3"), ("Y2", "Y3")}

    g = dependency_graph(parse_system("X = TRUE"))
    assert g.vertices == ("X",) and not g.edges

    g = dependency_graph(gen_ygprime(3))
    t = "(Y1,Y3,Y2)"
    assert g.edges == {("Y1", "Y2"), ("Y1", t), (t, "Y3"), ("Y2", "Y3")}


def test_dependency_graph_open_needs_flag():
    s = parse_system("X = !Y")
    with pytest.raises(InvalidSystemError):
        dependency_graph(s)
    g = dependency_graph(s, include_free=True)
    assert g.edges == {("X", "Y")}
    assert g.successors("Y") == ()


@given(st.lists(formulas(names=("a", "b", "c")), min_size=3, max_size=3))
def test_edge_count_is_sum_of_occurrence_sets(fs):
    s = DenotationSystem(("a", "b", "c"), dict(zip("abc", fs)), allow_loops=True)
    g = dependency_graph(s)
    assert len(g.edges) == sum(len(occurring(f)) for f in fs)


def test_check_acceptable_examples():
    s = gen_yablo(3)
    good = {"Y1": False, "Y2": False, "Y3": True}
    assert check_acceptable(s, good).acceptable
    # oracle: the only fixpoint among all 8 valuations
    assert fixpoints(s) == [good]

    report = check_acceptable(s, {"Y1": True, "Y2": True, "Y3": True})
    assert not report.acceptable
    assert ("Y1", False, True) in report.violations

    assert check_acceptable(parse_system("X = TRUE"), {"X": True}).acceptable


def test_check_acceptable_partial_valuation():
    with pytest.raises(ValueError, match="partial"):
        check_acceptable(parse_system("X = !Y"), {"X": True})


def test_boundary_policy_examples():
    n = 6
    in_range = {f"Y{i}" for i in range(1, n + 1)} | {f"X{i}" for i in range(3, n + 1)}
    inside = in_range.__contains__

    yablo_last = And(Not(Var("Y7")))
    assert apply_boundary_policy(yablo_last, inside, TruncationPolicy.CLIP) == And()

    only_neg = And(Not(Var("Y6")), Var("X7"))
    assert apply_boundary_policy(only_neg, inside, TruncationPolicy.GROUND_FALSE) == And(
        Not(Var("Y6")), FALSE
    )
    assert apply_boundary_policy(only_neg, inside, TruncationPolicy.GROUND_TRUE) == And(
        Not(Var("Y6")), TRUE
    )
    assert apply_boundary_policy(only_neg, inside, TruncationPolicy.CLIP) == Not(Var("Y6"))
    assert apply_boundary_policy(
        only_neg, inside, TruncationPolicy.CLIP, unwrap_singletons=False
    ) == And(Not(Var("Y6")))
