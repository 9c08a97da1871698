"""Hypothesis strategies shared by the module tests."""
from hypothesis import strategies as st

from treelift.alphabets import Lifted, Projection, RankedAlphabet, Substitution
from treelift.lifting import DerivedNonterminal, DerivedTerm
from treelift.terms import Term, Var

ALPHABET = RankedAlphabet(
    {"cat": 2, "f": 3, "g": 1, "a": 0, "b": 0, "c": 0},
    {"S": 0, "F": 3, "H": 1},
)


def terms(alphabet=ALPHABET, k=0, nonterminals=True, max_leaves=12):
    symbols = dict(alphabet.terminals)
    if nonterminals:
        symbols.update(alphabet.nonterminals)
    leaves = [st.just(Term(n)) for n, r in symbols.items() if r == 0]
    leaves += [st.just(Var(i)) for i in range(1, k + 1)]
    inner = [(n, r) for n, r in symbols.items() if r > 0]

    def extend(children):
        return st.one_of(
            [st.tuples(*[children] * r).map(lambda kids, n=n: Term(n, kids)) for n, r in inner]
        )

    return st.recursive(st.one_of(leaves), extend, max_leaves=max_leaves)


def ground_terms(alphabet=RankedAlphabet({"f": 2, "g": 1, "a": 0, "b": 0}, {}), max_leaves=10):
    return terms(alphabet, 0, False, max_leaves)


@st.composite
def derived_terms(draw, sort, alphabet=ALPHABET, depth=3, nonterminals=True):
    ranks = dict(alphabet.terminals)
    nts = dict(alphabet.nonterminals) if nonterminals else {}
    heads = sorted({0, *ranks.values(), *nts.values()})

    def leaves(s):
        out = [Lifted(n, s) for n, r in ranks.items() if r == s]
        out += [Projection(i, s) for i in range(1, s + 1)]
        out += [DerivedNonterminal(n, s) for n, r in nts.items() if r == s]
        return out

    def go(s, d):
        opts = leaves(s)
        if opts and (d == 0 or draw(st.booleans())):
            return DerivedTerm(draw(st.sampled_from(opts)))
        n = draw(st.sampled_from(heads if d > 0 else [0]))
        return DerivedTerm(Substitution(n, s), [go(n, d - 1)] + [go(s, d - 1) for _ in range(n)])

    return go(sort, depth)
