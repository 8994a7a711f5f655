import pytest

from mvdatalog import values as V
from mvdatalog.lang import Atom, Constant, parse_program
from mvdatalog.kb import build_kb, consequence
from mvdatalog.query import (Goal, answer, build_tree, parse_goal, parse_level,
                             starting_facts)

from conftest import load_kb

A = lambda p, *args: Atom(p, tuple(Constant(c) for c in args))


def kinds_by_depth(tree):
    out = {}
    for n in tree.walk():
        out.setdefault(n.depth, []).append(n.kind)
    return out


def test_tree_ex23(ex23_kb):
    goal = Goal(parse_goal("li(M, X)", ex23_kb.program))
    tree = build_tree(ex23_kb, goal)
    # level 1 holds the goal's proximity variants li and lo
    level1 = [n.atom.pred for n in tree.root.children]
    assert sorted(level1) == ["li", "lo"]
    # the li branch dies (no li rules or facts), the lo branch carries a body
    by_atom = {n.atom.pred: n for n in tree.root.children}
    assert [c.kind for c in by_atom["li"].children] == ["no"]
    body = by_atom["lo"].children[0]
    assert body.kind == "body" and body.connective == "and"
    members = sorted(lit.atom.pred for lit in body.literals)
    assert members == ["gc", "mu"]
    # proximity expands gc -> {gc, fv} and mu -> {mu, mf}
    for child in body.children:
        expanded = sorted(c.atom.pred for c in child.children)
        assert expanded in (["fv", "gc"], ["mf", "mu"])
    x0 = starting_facts(tree, ex23_kb.program)
    assert {str(a): v for a, v in x0} == {"fv(V)": (0.85, 0.9), "mf(M)": (0.7, 0.8)}


def test_tree_shape_invariants(ex23_kb, ex1):
    kb1 = build_kb(ex1)
    cases = [
        (ex23_kb, build_tree(ex23_kb, Goal(parse_goal("li(M, X)", ex23_kb.program)))),
        (kb1, build_tree(kb1, Goal(parse_goal("s(X)", ex1)))),
        (kb1, build_tree(kb1, Goal(parse_goal("q(X, Y)", ex1)))),
    ]
    for kb, tree in cases:
        program_facts = {a for a, _ in kb.program.facts()}
        for node in tree.walk():
            # AND connectives only at depth 2 mod 3
            if node.connective == "and" and node.children:
                assert node.depth % 3 == 2
            # every YES parent is a ground program fact
            if node.kind == "fact" and any(c.kind == "yes" for c in node.children):
                assert node.atom.is_ground()
                assert node.atom in program_facts


def test_all_no_for_unknown_predicate(ex1):
    kb = build_kb(ex1)
    tree = build_tree(kb, Goal(parse_goal("zz(X)", ex1)))
    assert starting_facts(tree, ex1) == []
    leaves = [n.kind for n in tree.walk() if not n.children and n.kind != "goal"]
    assert set(leaves) == {"no"}


def test_goal_that_is_a_fact(ex1):
    kb = build_kb(ex1)
    tree = build_tree(kb, Goal(parse_goal("p(a)", ex1)))
    x0 = starting_facts(tree, ex1)
    assert [(str(a), v) for a, v in x0] == [("p(a)", 0.8)]
    res = answer(kb, Goal(parse_goal("p(a)", ex1)))
    assert [(str(a), v) for a, v in res.answers] == [("p(a)", 0.8)]


def test_answer_ex23(ex23_kb):
    res = answer(ex23_kb, Goal(parse_goal("li(M, X)", ex23_kb.program)))
    got = {str(a): v for a, v in res.answers}
    assert set(got) == {"li(M, V)", "li(M, B)"}
    for v in got.values():
        assert abs(v[0] - 0.42) < 1e-9 and abs(v[1] - 0.56) < 1e-9


def test_answer_level_filter(ex23_kb):
    goal = Goal(parse_goal("li(M, V)", ex23_kb.program),
                parse_level("(0.9, 0.9)", V.IVS))
    assert answer(ex23_kb, goal).answers == []
    goal_ok = Goal(parse_goal("li(M, V)", ex23_kb.program),
                   parse_level("(0.4, 0.5)", V.IVS))
    assert len(answer(ex23_kb, goal_ok).answers) == 1


def test_answers_match_full_consequence(ex23_kb, ex1):
    """Goal-directed soundness on the golden examples: answer levels equal the
    full-consequence entries atom for atom."""
    cases = [
        (ex23_kb, "li(M, X)"),
        (build_kb(ex1), "s(X)"),
        (build_kb(ex1), "q(X, Y)"),
    ]
    for kb, goal_text in cases:
        full = consequence(kb).interpretation
        res = answer(kb, Goal(parse_goal(goal_text, kb.program)))
        assert res.answers, goal_text
        for atom, val in res.answers:
            assert V.values_equal(kb.program.system, val, full.entries[atom])


def test_query_restriction_is_economical(ex1):
    """Starting facts come from the program's fact base and the restricted
    fixed point never exceeds the full consequence."""
    kb = build_kb(ex1)
    fact_atoms = {a for a, _ in ex1.facts()}
    full = consequence(kb).interpretation
    for goal_text in ("s(X)", "q(X, Y)", "p(X)", "r(X)"):
        res = answer(kb, Goal(parse_goal(goal_text, ex1)))
        assert all(a in fact_atoms for a, _ in res.starting)
        assert res.report.interpretation.leq(full)


def test_negative_literal_expands_kernel(ex1):
    kb = build_kb(ex1)
    tree = build_tree(kb, Goal(parse_goal("q(X, Y)", ex1)))
    negated = [n for n in tree.walk() if n.note == "negated"]
    assert negated and all(n.atom.pred == "q" for n in negated)


def test_depth_limit_truncates():
    prog = parse_program(
        "%system fuzzy.\nfact p(a) = 0.9.\n"
        "rule q(X) <- p(X) : godel, 0.9.\n"
        "rule q(X) <- q(X) : godel, 0.8.\n")
    kb = build_kb(prog)
    tree = build_tree(kb, Goal(parse_goal("q(a)", prog)), depth_limit=3)
    assert tree.truncated
    with pytest.raises(ValueError):
        build_tree(kb, Goal(parse_goal("q(a)", prog)), depth_limit=2)
    # with the default limit the repeat marking cuts the recursion instead
    full_tree = build_tree(kb, Goal(parse_goal("q(a)", prog)))
    assert not full_tree.truncated
    assert any(n.repeated for n in full_tree.walk())
    res = answer(kb, Goal(parse_goal("q(a)", prog)))
    assert [(str(a), v) for a, v in res.answers] == [("q(a)", 0.9)]


def test_memoization_keeps_answers_complete(ex1):
    """The repeated q sub-goal of ex1 is not re-expanded, yet both
    facts are still harvested."""
    kb = build_kb(ex1)
    tree = build_tree(kb, Goal(parse_goal("s(X)", ex1)))
    assert any(n.repeated for n in tree.walk())
    x0 = {str(a) for a, _ in starting_facts(tree, ex1)}
    assert x0 == {"p(a)", "r(b)"}


def test_parse_goal_checks_arity(ex1):
    from mvdatalog.lang import ParseError
    with pytest.raises(ParseError, match="arity"):
        parse_goal("s(X, Y)", ex1)
