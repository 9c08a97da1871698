import pytest
from hypothesis import given, settings, strategies as st

from treelift import (
    Bounds,
    derivation_trace,
    enumerate_io,
    enumerate_regular,
    format_grammar,
    is_regular,
    lift_grammar,
    parse_grammar,
    parse_term,
    validate_grammar,
    yield_language,
)
from treelift.errors import GrammarSyntaxError, NotFound, NotRegular
from treelift.grammars import io_successors, is_terminal_tree
from treelift.lifting import parse_derived, to_ranked
from treelift.terms import Term, replace_at, substitute, subtree_at


def test_fixture_grammars_validate(grammar):
    for name in ["anbncn", "anbncn_printed", "crossserial", "monadic", "anbn_cat",
                 "anbn_monadic", "copying", "astar", "rootf"]:
        assert validate_grammar(grammar(name)) == [], name


def test_validate_diagnostics():
    g = parse_grammar("terminals: a/0\nnonterminals: S/0 F/3\nstart: S\nS -> F(a,a,a)\nF(x1,x2,x3) -> x4\n")
    assert [d.code for d in validate_grammar(g)] == ["VariableOutOfRange"]
    g = parse_grammar("terminals: a/0\nnonterminals: S/1\nstart: S\nS(x1) -> a\n")
    assert [d.code for d in validate_grammar(g)] == ["StartRank"]
    g = parse_grammar("terminals: a/0 f/1\nnonterminals: S/0\nstart: T\nS -> f(a,a) | q\n")
    assert [d.code for d in validate_grammar(g)] == ["StartNotNonterminal", "RankMismatch", "UnknownSymbol"]


def test_is_regular(grammar):
    assert is_regular(grammar("monadic"))
    assert not is_regular(grammar("anbn_monadic"))
    assert is_regular(lift_grammar(grammar("anbncn")))


def test_io_successors_examples(grammar):
    g = grammar("anbncn")
    [step] = io_successors(g, Term("S"))
    assert str(step.after) == "F(a,b,c)"
    outs = {str(s.after) for s in io_successors(g, step.after)}
    assert outs == {"F(cat(a,a),cat(b,b),cat(c,c))", "cat(cat(a,b),c)"}
    c = grammar("copying")
    steps = io_successors(c, parse_term("F(N)"))
    assert {s.address for s in steps} == {(0,)}
    assert {str(s.after) for s in steps} == {"F(a)", "F(b)"}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["anbncn", "copying", "anbn_monadic", "crossserial"]), st.integers(1, 4), st.randoms())
def test_io_steps_satisfy_the_step_definition(name, walk, rnd):
    from conftest import DATA
    from treelift import load_grammar

    g = load_grammar(DATA / f"{name}.grammar")
    t = Term(g.start)
    for _ in range(walk):
        steps = io_successors(g, t)
        if not steps:
            break
        for s in steps:
            redex = subtree_at(s.before, s.address)
            p = g.productions[s.production]
            assert redex.label == p.lhs
            assert all(is_terminal_tree(c, g) for c in redex.children)
            assert s.after == replace_at(s.before, s.address, substitute(p.rhs, redex.children))
        t = rnd.choice(steps).after


def test_enumerate_io_examples(grammar):
    got = {str(t) for t in enumerate_io(grammar("anbn_monadic"), Bounds(8, 60))}
    assert {"eps", "a(b(eps))", "a(a(b(b(eps))))"} <= got
    got = {str(t) for t in enumerate_io(grammar("anbncn"), Bounds(3, 60))}
    assert {"cat(cat(a,b),c)", "cat(cat(cat(a,a),cat(b,b)),cat(c,c))"} <= got


def test_nonterminating_grammars():
    looping = parse_grammar("terminals: f/1 a/0\nnonterminals: S/0\nstart: S\nS -> f(S)\n")
    res = enumerate_io(looping, Bounds(4, 60))
    assert res.items == () and res.exhausted
    # S -> S revisits a known form: the search closes with nothing left to explore
    stuck = parse_grammar("terminals: a/0\nnonterminals: S/0\nstart: S\nS -> S\n")
    res = enumerate_io(stuck, Bounds(4, 60))
    assert res.items == () and not res.exhausted
    with pytest.raises(NotFound):
        derivation_trace(stuck, Term("a"), Bounds(5, None))


def test_enumerate_regular_examples(grammar):
    got = {str(t) for t in enumerate_regular(grammar("monadic"), Bounds(6, 3))}
    assert got == {"eps", "a(eps)", "b(eps)", "a(a(eps))", "a(b(eps))", "b(a(eps))", "b(b(eps))"}
    got = {str(t) for t in enumerate_regular(grammar("anbn_cat"), Bounds(2, 60))}
    assert got == {"eps", "cat(a,cat(eps,b))"}
    A = grammar("anbncn").alphabet
    lifted = enumerate_regular(lift_grammar(grammar("anbncn")), Bounds(3, None))
    for fig in ["S(S(cat,S(cat,pi1,pi2),pi3),a,b,c)",
                "S(S(S(cat,S(cat,pi1,pi2),pi3),S(cat,pi1,a),S(cat,pi2,b),S(cat,pi3,c)),a,b,c)"]:
        assert to_ranked(parse_derived(fig, A, 0)) in lifted
    with pytest.raises(NotRegular):
        enumerate_regular(grammar("anbncn"))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["monadic", "anbn_cat", "astar", "rootf", "copying"]), st.integers(0, 6), st.integers(1, 12))
def test_regular_equals_io(name, steps, nodes):
    from conftest import DATA
    from treelift import load_grammar

    g = load_grammar(DATA / f"{name}.grammar")
    if not is_regular(g):
        return
    b = Bounds(steps, nodes)
    assert enumerate_regular(g, b).as_set() == enumerate_io(g, b).as_set()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5), st.integers(0, 2), st.integers(1, 30), st.integers(0, 20))
def test_enumeration_is_monotone(steps, extra_steps, nodes, extra_nodes):
    from conftest import DATA
    from treelift import load_grammar

    g = load_grammar(DATA / "crossserial.grammar")
    small, big = Bounds(steps, nodes), Bounds(steps + extra_steps, nodes + extra_nodes)
    assert small <= big
    assert enumerate_io(g, small).as_set() <= enumerate_io(g, big).as_set()


def test_copying_language_has_identical_halves(grammar):
    for t in enumerate_io(grammar("copying"), Bounds(6, 60)):
        assert t.label == "cat" and t.children[0] == t.children[1]


def test_yield_language_examples(grammar):
    assert list(yield_language(grammar("anbncn"), Bounds(5, 200)))[:3] == ["abc", "aabbcc", "aaabbbccc"]
    cross = set(yield_language(grammar("crossserial"), Bounds(4, 200), {"eps"}))
    want = {"a" * n + "b" * m + "c" * n + "d" * m for n in range(4) for m in range(4 - n)}
    assert cross == want
    assert list(yield_language(grammar("anbn_cat"), Bounds(4, 60), {"eps"})) == ["", "ab", "aabb", "aaabbb"]


def test_printed_variant_has_the_same_yields(grammar):
    b = Bounds(5, 200)
    assert set(yield_language(grammar("anbncn_printed"), b)) == set(yield_language(grammar("anbncn"), b))
    trees = {str(t) for t in enumerate_io(grammar("anbncn_printed"), Bounds(4, 200))}
    assert "cat(cat(cat(a,cat(a,a)),cat(b,cat(b,b))),cat(c,cat(c,c)))" in trees


def test_trace_replays(grammar):
    g = grammar("anbncn")
    target = parse_term("cat(cat(cat(cat(a,a),a),cat(cat(b,b),b)),cat(cat(c,c),c))")
    steps = derivation_trace(g, target)
    assert len(steps) == 4
    t = Term("S")
    for s in steps:
        assert s.before == t
        p = g.productions[s.production]
        redex = subtree_at(t, s.address)
        t = replace_at(t, s.address, substitute(p.rhs, redex.children))
    assert t == target
    with pytest.raises(NotFound):
        derivation_trace(g, target, Bounds(3, None))


def test_grammar_file_errors():
    with pytest.raises(GrammarSyntaxError) as info:
        parse_grammar("terminals: a/0\nnonterminals: S/0\nstart: S\nS -> f(a,\n")
    assert info.value.line == 4
    with pytest.raises(GrammarSyntaxError) as info:
        parse_grammar("terminals: a/0\nnonterminals: S/0\nstart: S\nS a\n")
    assert (info.value.line, info.value.column) == (4, 1)
    with pytest.raises(GrammarSyntaxError):
        parse_grammar("terminals: a\nnonterminals: S/0\nstart: S\n")
    with pytest.raises(GrammarSyntaxError):
        parse_grammar("terminals: a/0\nnonterminals: S/0\nstart: S\nF(x2) -> a\n")
    with pytest.raises(GrammarSyntaxError):
        parse_grammar("terminals: a/0\nnonterminals: S/0\n")


def test_format_roundtrip(grammar):
    for name in ["anbncn", "crossserial", "copying"]:
        g = grammar(name)
        again = parse_grammar(format_grammar(g))
        assert again.productions == g.productions and again.alphabet == g.alphabet
    lifted = lift_grammar(grammar("anbncn"))
    again = parse_grammar(format_grammar(lifted))
    assert again.productions == lifted.productions and again.sorts == lifted.sorts
