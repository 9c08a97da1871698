import pytest
from hypothesis import given, settings, strategies as st

from strategies import ground_terms
from treelift import Bounds, load_grammar, parse_term
from treelift.errors import (
    BoundTooLarge,
    DomainSentenceFails,
    EmptyDomain,
    FormulaSyntaxError,
    LabelClash,
    NotATreeDomain,
    RankMismatch,
    UnboundVariable,
    UnknownRelation,
)
from treelift.mso import (
    FALSE,
    TRUE,
    And,
    Eq,
    Exists,
    ForAll,
    Iff,
    Implies,
    In,
    Interpretation,
    Label,
    Not,
    Or,
    Rel,
    check_definability_equiv,
    dualize,
    eval_formula,
    free_variables,
    identity_interpretation,
    models_of,
    parse_formula,
    parse_interpretation,
    to_nnf,
    transduce,
    tree_vocabulary,
    word_vocabulary,
)
from treelift.terms import Structure, string_to_structure, term_to_structure, validate_tree_domain

AB = word_vocabulary("ab")


def test_parse_examples():
    assert parse_formula("(exists x (P a x))", AB) == Exists("x", Label("a", "x"))
    assert parse_formula("(forall X (exists x (in x X)))") == ForAll("X", Exists("x", In("x", "X")))
    with pytest.raises(UnknownRelation):
        parse_formula("(P q x)", AB)
    with pytest.raises(UnknownRelation):
        parse_formula("(succ 1 x y)", AB)
    tv = tree_vocabulary({"f": 2, "a": 0})
    assert parse_formula("(succ 2 x y)", tv) == Rel("<_2", "x", "y")
    with pytest.raises(UnknownRelation):
        parse_formula("(succ 3 x y)", tv)


def test_parse_all_connectives():
    text = "(and (or true false) (not (= x y)) (-> (< x y) (<-> (P a x) (in y Y))))"
    phi = parse_formula(text)
    assert free_variables(phi) == {"x", "y", "Y"}
    assert parse_formula(str(phi)) == phi
    assert isinstance(phi.parts[2].right, Iff)


def test_parse_errors():
    for bad in ["(exists x", "(P a)", "(in X x)", "(frob x)", "x", "(exists 1 (P a x))", "(succ 0 x y)", "()", "true false"]:
        with pytest.raises(FormulaSyntaxError):
            parse_formula(bad)
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("(and true\n  (bogus))")
    assert (info.value.line, info.value.column) == (2, 4)


def test_eval_word_examples():
    M = string_to_structure("aab", "ab")
    assert eval_formula(M, parse_formula("(exists x (P b x))"))
    assert not eval_formula(M, parse_formula("(forall x (P a x))"))
    same = parse_formula("(exists X (forall x (<-> (in x X) (P a x))))")
    for w in ["", "a", "ab", "bbab", "aaaaa"]:
        assert eval_formula(string_to_structure(w, "ab"), same)


def test_eval_with_assignment():
    M = string_to_structure("ab", "ab")
    phi = parse_formula("(and (< x y) (in y Y))")
    assert eval_formula(M, phi, {"x": 1, "y": 2, "Y": {2}})
    assert not eval_formula(M, phi, {"x": 2, "y": 1, "Y": {2}})
    with pytest.raises(UnboundVariable):
        eval_formula(M, phi, {"x": 1})
    with pytest.raises(ValueError):
        eval_formula(M, phi, {"x": 1, "y": 7, "Y": ()})


def test_empty_domain_semantics():
    E = string_to_structure("", "ab")
    assert eval_formula(E, parse_formula("(forall x (P a x))"))
    assert eval_formula(E, parse_formula("(forall x false)"))
    assert not eval_formula(E, parse_formula("(exists x true)"))
    assert eval_formula(E, parse_formula("(exists X (forall x (in x X)))"))


def test_guard():
    M = Structure(tuple(range(15)))
    phi = parse_formula("(exists X (forall x (in x X)))")
    with pytest.raises(BoundTooLarge):
        eval_formula(M, phi)
    assert eval_formula(M, phi, guard=False)
    deep = parse_formula("(exists A (exists B (exists C (exists D true))))")
    with pytest.raises(BoundTooLarge):
        eval_formula(string_to_structure("a", "a"), deep)
    assert eval_formula(string_to_structure("a", "a"), deep, guard=False)
    assert eval_formula(M, parse_formula("(exists x true)"))


def test_models_of_examples():
    assert models_of(parse_formula("(forall x (P a x))"), "ab", "word", 2) == ["", "a", "aa"]
    root_f = parse_formula("(exists x (and (P f x) (not (exists y (or (succ 1 y x) (succ 2 y x))))))")
    assert [str(t) for t in models_of(root_f, {"f": 2, "a": 0}, "tree", 3)] == ["f(a,a)"]
    assert models_of(FALSE, "ab", "word", 3) == []
    assert len(models_of(TRUE, "ab", "word", 3)) == 15
    with pytest.raises(UnboundVariable):
        models_of(parse_formula("(P a x)"), "ab", "word", 2)
    with pytest.raises(BoundTooLarge):
        models_of(TRUE, "ab", "word", 30)


def test_models_of_multichar_letters():
    phi = parse_formula("(exists x (P Hans x))")
    assert models_of(phi, ["em", "Hans"], "word", 1) == ["Hans"]


# -- random formulas for the property tests ---------------------------------


def formulas(depth=3):
    node_vars = ["x", "y"]
    atoms = st.one_of(
        st.just(TRUE),
        st.just(FALSE),
        st.builds(Eq, st.sampled_from(node_vars), st.sampled_from(node_vars)),
        st.builds(lambda a, b: Rel("<", a, b), st.sampled_from(node_vars), st.sampled_from(node_vars)),
        st.builds(Label, st.sampled_from("ab"), st.sampled_from(node_vars)),
        st.builds(In, st.sampled_from(node_vars), st.just("X")),
    )

    def extend(sub):
        return st.one_of(
            st.builds(Not, sub),
            st.builds(lambda a, b: And((a, b)), sub, sub),
            st.builds(lambda a, b: Or((a, b)), sub, sub),
            st.builds(Implies, sub, sub),
            st.builds(Iff, sub, sub),
            st.builds(Exists, st.sampled_from(node_vars), sub),
            st.builds(ForAll, st.sampled_from(node_vars), sub),
        )

    body = st.recursive(atoms, extend, max_leaves=8)
    # close every formula: bind X, then x and y
    return st.builds(
        lambda q1, q2, q3, f: q1("X", q2("x", q3("y", f))),
        *[st.sampled_from([Exists, ForAll])] * 3,
        body,
    )


words = st.text("ab", max_size=4)


@settings(max_examples=150, deadline=None)
@given(formulas(), words)
def test_rewrites_preserve_truth(phi, w):
    M = string_to_structure(w, "ab")
    truth = eval_formula(M, phi)
    assert eval_formula(M, Not(Not(phi))) == truth
    assert eval_formula(M, to_nnf(phi)) == truth
    assert eval_formula(M, dualize(phi)) == truth


@settings(max_examples=50, deadline=None)
@given(formulas(), formulas())
def test_models_of_conjunction_is_intersection(phi, psi):
    both = models_of(And((phi, psi)), "ab", "word", 3)
    assert set(both) == set(models_of(phi, "ab", "word", 3)) & set(models_of(psi, "ab", "word", 3))


@given(formulas())
def test_empty_domain_quantifiers(phi):
    E = string_to_structure("", "ab")
    assert eval_formula(E, ForAll("z", phi))
    assert not eval_formula(E, Exists("z", phi))


# -- interpretations --------------------------------------------------------

FAB = {"f": 2, "g": 1, "a": 0, "b": 0}


def test_identity_interpretation_example():
    I = identity_interpretation(FAB)
    assert str(transduce(I, parse_term("f(a,b)")).term) == "f(a,b)"


@given(ground_terms())
def test_identity_interpretation_is_identity(t):
    assert transduce(identity_interpretation(FAB), t).term == t


def test_relabel_example():
    I = identity_interpretation(FAB)
    labels = dict(I.label_formulas)
    labels["b"] = Or((Label("a", "x"), Label("b", "x")))
    labels["a"] = FALSE
    I = Interpretation(I.domain_sentence, I.domain_formula, I.successor_formulas, labels, I.ranks)
    assert str(transduce(I, parse_term("a")).term) == "b"
    assert str(transduce(I, parse_term("f(a,g(b))")).term) == "f(b,g(b))"


MIRROR = """
domain-sentence: true
domain: true
succ 1: (succ 2 x y)
succ 2: (succ 1 x y)
label f/2: (P f x)
label g/1: (P g x)
label a/0: (P a x)
label b/0: (P b x)
"""

def test_mirror_and_node_map():
    I = parse_interpretation(MIRROR)
    res = transduce(I, parse_term("f(a,f(b,a))"))
    assert str(res.term) == "f(f(a,b),a)"
    assert res.addresses[()] == ()
    assert res.addresses[(1,)] == (0,)
    assert res.addresses[(1, 0)] == (0, 1)
    with pytest.raises(NotATreeDomain):  # a lone child would become a second successor
        transduce(I, parse_term("g(a)"))


@given(ground_terms())
def test_mirror_output_is_a_tree_and_relations_match(t):
    I = parse_interpretation(MIRROR)
    try:
        res = transduce(I, t)
    except NotATreeDomain:
        # a g node's only child becomes a second successor: not contiguous
        assert "g" in set(t.labels())
        return
    out = res.term
    assert validate_tree_domain(set(res.addresses.values()))
    M_in = term_to_structure(t)
    M_out = term_to_structure(out, max_rank=2)
    for i, f in I.successor_formulas.items():
        computed = {
            (res.addresses[u], res.addresses[v])
            for u in M_in.domain
            for v in M_in.domain
            if eval_formula(M_in, f, {"x": u, "y": v})
        }
        assert computed == M_out.relation(f"<_{i}")


def test_interpretation_errors():
    t = parse_term("f(a,b)")
    base = identity_interpretation(FAB)

    def with_(**kw):
        fields = dict(
            domain_sentence=base.domain_sentence,
            domain_formula=base.domain_formula,
            successor_formulas=base.successor_formulas,
            label_formulas=base.label_formulas,
            ranks=base.ranks,
        )
        fields.update(kw)
        return Interpretation(**fields)

    with pytest.raises(DomainSentenceFails):
        transduce(with_(domain_sentence=FALSE), t)
    with pytest.raises(EmptyDomain):
        transduce(with_(domain_formula=Not(Eq("x", "x"))), t)
    with pytest.raises(LabelClash):
        transduce(with_(label_formulas={**base.label_formulas, "g": Label("a", "x")}), t)
    with pytest.raises(LabelClash):
        transduce(with_(label_formulas={"f": Label("f", "x")}), t)
    with pytest.raises(NotATreeDomain):  # two roots
        transduce(with_(successor_formulas={1: Rel("<_1", "x", "y")}), t)
    with pytest.raises(NotATreeDomain):  # only a second successor
        transduce(with_(successor_formulas={2: Rel("<_1", "x", "y"), 3: Rel("<_2", "x", "y")}), t)
    with pytest.raises(NotATreeDomain):  # two first successors
        transduce(with_(successor_formulas={1: Or((Rel("<_1", "x", "y"), Rel("<_2", "x", "y")))}), t)
    with pytest.raises(NotATreeDomain):  # cycle back to the root
        cyc = Or((Rel("<_1", "x", "y"), And((Label("a", "x"), Label("f", "y")))))
        transduce(with_(domain_formula=Not(Label("b", "x")), successor_formulas={1: cyc}), t)
    with pytest.raises(RankMismatch):
        transduce(with_(domain_formula=Not(Label("b", "x"))), t)
    with pytest.raises(UnboundVariable):
        with_(domain_formula=Label("a", "y"))


def test_parse_interpretation_sections():
    I = parse_interpretation(MIRROR)
    assert I.ranks == {"f": 2, "g": 1, "a": 0, "b": 0}
    assert I.successor_formulas[1] == Rel("<_2", "x", "y")
    assert I.domain_formula == TRUE
    with pytest.raises(FormulaSyntaxError) as info:
        parse_interpretation("domain: true\nsucc 1: (succ 1 x\n")
    assert info.value.line == 2
    with pytest.raises(FormulaSyntaxError):
        parse_interpretation("nonsense")


# -- definability at desk scale ---------------------------------------------


def test_all_words_vs_true(grammar):
    g = grammar("monadic")
    rep = check_definability_equiv(g, TRUE, Bounds(None, 6), kind="tree")
    assert rep.agree
    rep = check_definability_equiv(g, TRUE, Bounds(8, None), kind="word", size_bound=5, letters="ab", empty={"eps"})
    assert rep.agree


def test_anbn_is_separated_from_a_regular_formula(grammar):
    a_star_b_star = parse_formula("(forall x (forall y (-> (and (P b x) (P a y)) (not (< x y)))))")
    rep = check_definability_equiv(
        grammar("anbn_cat"), a_star_b_star, Bounds(6, None), kind="word", size_bound=2, letters="ab", empty={"eps"}
    )
    assert rep.only_grammar == ()
    assert rep.only_formula == ("a", "b", "aa", "bb")


def test_astar(grammar):
    rep = check_definability_equiv(
        grammar("astar"), parse_formula("(forall x (P a x))"), Bounds(8, None),
        kind="word", size_bound=6, letters="ab", empty={"eps"},
    )
    assert rep.agree


def test_definability_needs_regular(grammar):
    from treelift.errors import NotRegular

    with pytest.raises(NotRegular):
        check_definability_equiv(grammar("anbncn"), TRUE, Bounds(3, None))
