"""Derived terms, LIFT, beta-conversion and the production homomorphisms.

A derived term is a tree over D(Sigma u F). Base symbols appear as sorted
constants, projections as ``pi{i,n}`` and substitution operators as
``S{n,k}``. Derived terms also have a *ranked encoding* as ordinary
:class:`~treelift.terms.Term` values (``S{n,k}`` of rank n+1, everything else
rank 0) so that grammars and homomorphisms over D(Sigma u F) reuse the plain
tree machinery.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Container, Iterable, Mapping, Optional

from .alphabets import (
    Lifted,
    Projection,
    RankedAlphabet,
    Substitution,
    derived_sort,
    projection_name,
    substitution_name,
)
from .errors import (
    SortError,
    TermSyntaxError,
    UnevaluatedNonterminal,
    UnknownSymbol,
    VariableOutOfRange,
)
from .grammars import Cftg, Production, validate_grammar
from .terms import Term, Tree, Var, substitute

__all__ = [
    "DerivedNonterminal",
    "DerivedTerm",
    "HomFamily",
    "lift_term",
    "beta",
    "lift_grammar",
    "hom_apply",
    "production_hom",
    "lifted_production_hom",
    "apply_derived_hom",
    "check_diagram",
    "to_ranked",
    "from_ranked",
    "normalize",
    "parse_derived",
    "identity_hom",
]


@dataclass(frozen=True, order=True)
class DerivedNonterminal:
    """A nonterminal of rank ``sort`` used as a constant of that sort."""

    name: str
    sort: int


class DerivedTerm:
    """Well-sorted tree over the derived alphabet; sort is checked on construction."""

    __slots__ = ("label", "children", "sort", "_hash", "size")

    def __init__(self, label, children: Iterable["DerivedTerm"] = ()):
        children = tuple(children)
        if isinstance(label, Substitution):
            if len(children) != label.n + 1:
                raise SortError(f"{substitution_name(label.n, label.k)} needs {label.n + 1} children, got {len(children)}")
            if children[0].sort != label.n:
                raise SortError(
                    f"head of {substitution_name(label.n, label.k)} must have sort {label.n}, not {children[0].sort}"
                )
            for c in children[1:]:
                if c.sort != label.k:
                    raise SortError(
                        f"argument of {substitution_name(label.n, label.k)} must have sort {label.k}, not {c.sort}"
                    )
            sort = label.k
        elif isinstance(label, (Lifted, Projection, DerivedNonterminal)):
            if children:
                raise SortError(f"{label} is a constant of the derived alphabet")
            if isinstance(label, Projection) and not 1 <= label.i <= label.n:
                raise SortError(f"projection index {label.i} outside 1..{label.n}")
            sort = label.sort if isinstance(label, DerivedNonterminal) else label.n
        else:
            raise TypeError(f"not a derived label: {label!r}")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "sort", sort)
        object.__setattr__(self, "_hash", hash((label, children)))
        object.__setattr__(self, "size", 1 + sum(c.size for c in children))

    def __setattr__(self, key, value):
        raise AttributeError("DerivedTerm is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, DerivedTerm)
            and self._hash == other._hash
            and self.label == other.label
            and self.children == other.children
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"DerivedTerm({str(self)!r})"

    def __str__(self):
        return _show(self, head=False)

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def has_nonterminals(self) -> bool:
        return any(isinstance(leaf.label, DerivedNonterminal) for leaf in self.leaves())


def _show(d: DerivedTerm, head: bool) -> str:
    lab = d.label
    if isinstance(lab, Substitution):
        parts = [_show(d.children[0], True)] + [_show(c, False) for c in d.children[1:]]
        return f"{substitution_name(lab.n, lab.k)}({','.join(parts)})"
    if isinstance(lab, Projection):
        return projection_name(lab.i, lab.n)
    if isinstance(lab, DerivedNonterminal):
        return f"{lab.name}:{lab.sort}"
    if head:
        return lab.base
    return f"lift({lab.base}:{lab.n})" if lab.n else f"lift({lab.base})"


def _leaf(name: str, rank: int, nonterminals: Container[str]) -> DerivedTerm:
    if name in nonterminals:
        return DerivedTerm(DerivedNonterminal(name, rank))
    return DerivedTerm(Lifted(name, rank))


def _projections(k: int) -> list[DerivedTerm]:
    return [DerivedTerm(Projection(i, k)) for i in range(1, k + 1)]


# -- LIFT and beta ----------------------------------------------------------


def lift_term(t: Tree, k: int, alphabet: Optional[RankedAlphabet] = None) -> DerivedTerm:
    """LIFT_k: a tree over X_k to an explicit derived term of sort ``k``.

    x_i becomes pi{i,k}, a constant c becomes S{0,k}(c) and f(t1..tn) becomes
    S{n,k}(f, LIFT_k(t1), ..., LIFT_k(tn)); the tupling layer is left out.
    Symbols listed as nonterminals in ``alphabet`` become
    :class:`DerivedNonterminal` leaves.
    """
    nts = alphabet.nonterminals if alphabet is not None else ()

    def go(u: Tree) -> DerivedTerm:
        if isinstance(u, Var):
            if u.index > k:
                raise VariableOutOfRange(f"x{u.index} in a tree over X_{k}")
            return DerivedTerm(Projection(u.index, k))
        n = len(u.children)
        if alphabet is not None:
            if u.label not in alphabet:
                raise UnknownSymbol(u.label)
            if alphabet.rank(u.label) != n:
                raise SortError(f"{u.label} has rank {alphabet.rank(u.label)}, used with {n}")
        return DerivedTerm(Substitution(n, k), [_leaf(u.label, n, nts)] + [go(c) for c in u.children])

    return go(t)


def beta(d: DerivedTerm, *, nonterminals: bool = False) -> Tree:
    """Evaluate a derived term in the tree substitution algebra.

    Lifted(f, n) -> f(x1..xn), pi{i,n} -> x_i and S{n,k}(h, a1..an) ->
    beta(h)[beta(a1), ..., beta(an)]. Nonterminal leaves raise
    :class:`UnevaluatedNonterminal` unless ``nonterminals`` is set, in which
    case F:m evaluates to F(x1..xm).
    """
    lab = d.label
    if isinstance(lab, Projection):
        return Var(lab.i)
    if isinstance(lab, Lifted):
        return Term(lab.base, [Var(i) for i in range(1, lab.n + 1)])
    if isinstance(lab, DerivedNonterminal):
        if not nonterminals:
            raise UnevaluatedNonterminal(f"{lab.name}:{lab.sort}")
        return Term(lab.name, [Var(i) for i in range(1, lab.sort + 1)])
    head = beta(d.children[0], nonterminals=nonterminals)
    args = [beta(c, nonterminals=nonterminals) for c in d.children[1:]]
    return substitute(head, args)


# -- ranked encoding --------------------------------------------------------

_SUB_RE = re.compile(r"S\{(\d+),(\d+)\}\Z")
_PI_RE = re.compile(r"pi\{(\d+),(\d+)\}\Z")


def to_ranked(d: DerivedTerm) -> Term:
    lab = d.label
    if isinstance(lab, Substitution):
        return Term(substitution_name(lab.n, lab.k), [to_ranked(c) for c in d.children])
    if isinstance(lab, Projection):
        return Term(projection_name(lab.i, lab.n))
    if isinstance(lab, DerivedNonterminal):
        return Term(lab.name)
    return Term(lab.base)


def from_ranked(t: Tree, sorts: Mapping[str, int], nonterminals: Container[str] = ()) -> DerivedTerm:
    """Decode the ranked encoding; ``sorts`` gives the sort of every bare constant."""
    if isinstance(t, Var):
        raise SortError(f"variable {t} in a derived term")
    m = _SUB_RE.match(t.label)
    if m:
        return DerivedTerm(Substitution(int(m[1]), int(m[2])), [from_ranked(c, sorts, nonterminals) for c in t.children])
    if t.children:
        raise SortError(f"{t.label} is a constant of the derived alphabet")
    m = _PI_RE.match(t.label)
    if m:
        return DerivedTerm(Projection(int(m[1]), int(m[2])))
    if t.label not in sorts:
        raise UnknownSymbol(f"no sort known for {t.label}")
    return _leaf(t.label, sorts[t.label], nonterminals)


def normalize(d: DerivedTerm) -> DerivedTerm:
    """Canonical form: every base or nonterminal leaf sits in head position.

    A leaf of sort s found elsewhere becomes S{s,s}(leaf, pi{1,s}..pi{s,s})
    (S{0,0}(leaf) at sort 0). beta is unchanged.
    """

    def go(u: DerivedTerm, head: bool) -> DerivedTerm:
        if isinstance(u.label, Substitution):
            return DerivedTerm(u.label, [go(u.children[0], True)] + [go(c, False) for c in u.children[1:]])
        if head or isinstance(u.label, Projection):
            return u
        s = u.sort
        return DerivedTerm(Substitution(s, s), [u] + _projections(s))

    return go(d, False)


# -- grammars ---------------------------------------------------------------


def lift_grammar(G: Cftg) -> Cftg:
    """The derived regular grammar G_D.

    Every nonterminal F/m becomes a rank-0 nonterminal of sort m and every
    production F(x1..xm) -> t becomes F -> LIFT_m(t). The result is stated in
    the ranked encoding; its ``sorts`` map records the sort of each base
    symbol so derived terms can be decoded with :func:`from_ranked`.
    """
    problems = validate_grammar(G)
    if problems:
        raise SortError("; ".join(map(str, problems)))
    prods = []
    used: dict[str, int] = {}
    for p in G.productions:
        rhs = to_ranked(lift_term(p.rhs, p.rank, G.alphabet))
        _collect_operators(rhs, used)
        prods.append(Production(p.lhs, 0, rhs))
    terminals = dict(sorted(used.items(), key=lambda kv: _operator_key(kv[0])))
    for name in G.terminals:
        terminals[name] = 0
    nonterminals = {name: 0 for name in G.nonterminals}
    sorts = {**dict(G.terminals), **dict(G.nonterminals)}
    return Cftg(RankedAlphabet(terminals, nonterminals), G.start, tuple(prods), sorts)


def _collect_operators(t: Term, out: dict[str, int]):
    if _SUB_RE.match(t.label) or _PI_RE.match(t.label):
        out[t.label] = len(t.children)
    for c in t.children:
        _collect_operators(c, out)


def _operator_key(name: str):
    m = _SUB_RE.match(name)
    if m:
        return (0, int(m[1]), int(m[2]))
    m = _PI_RE.match(name)
    return (1, int(m[2]), int(m[1]))


# -- tree homomorphisms -----------------------------------------------------


@dataclass(frozen=True)
class HomFamily:
    """Images h_n(f) in T(Omega, X_n) for the symbols of a ranked alphabet.

    With ``passthrough`` a symbol without an image maps to f(x1..xn); this is
    how families over the infinite derived alphabet are given.
    """

    images: Mapping[str, Tree] = field(default_factory=dict)
    passthrough: bool = False

    def image(self, label: str, rank: int) -> Tree:
        if label in self.images:
            return self.images[label]
        if self.passthrough:
            return Term(label, [Var(i) for i in range(1, rank + 1)])
        raise UnknownSymbol(label)


def identity_hom() -> HomFamily:
    return HomFamily({}, passthrough=True)


def hom_apply(h: HomFamily, t: Tree) -> Tree:
    """The induced homomorphism: f(t1..tn) -> h_n(f)[h(t1), ..., h(tn)], x_i -> x_i."""
    if isinstance(t, Var):
        return t
    args = [hom_apply(h, c) for c in t.children]
    return substitute(h.image(t.label, len(args)), args, len(args))


def production_hom(p: Production, signature: RankedAlphabet) -> HomFamily:
    """p-hat: the lhs F goes to the rhs, every other symbol g/n to g(x1..xn)."""
    if p.lhs not in signature:
        raise UnknownSymbol(p.lhs)
    images: dict[str, Tree] = {
        s.name: Term(s.name, [Var(i) for i in range(1, s.rank + 1)]) for s in signature
    }
    images[p.lhs] = p.rhs
    return HomFamily(images)


def lifted_production_hom(p: Production, alphabet: Optional[RankedAlphabet] = None) -> HomFamily:
    """p-hat_D on the ranked encoding: F -> LIFT_m(rhs), all other derived symbols fixed."""
    return HomFamily({p.lhs: to_ranked(lift_term(p.rhs, p.rank, alphabet))}, passthrough=True)


def _sort_table(*terms: DerivedTerm) -> tuple[dict[str, int], set[str]]:
    sorts: dict[str, int] = {}
    nts: set[str] = set()
    for d in terms:
        for leaf in d.leaves():
            lab = leaf.label
            if isinstance(lab, Lifted):
                sorts[lab.base] = lab.n
            elif isinstance(lab, DerivedNonterminal):
                sorts[lab.name] = lab.sort
                nts.add(lab.name)
    return sorts, nts


def apply_derived_hom(p: Production, d: DerivedTerm, alphabet: Optional[RankedAlphabet] = None) -> DerivedTerm:
    """p-hat_D(d): every F:m leaf of ``d`` replaced by LIFT_m(rhs)."""
    image = lift_term(p.rhs, p.rank, alphabet)
    sorts, nts = _sort_table(d, image)
    nts.add(p.lhs)
    sorts[p.lhs] = p.rank
    out = hom_apply(lifted_production_hom(p, alphabet), to_ranked(d))
    return from_ranked(out, sorts, nts)


def check_diagram(p: Production, d: DerivedTerm, alphabet: Optional[RankedAlphabet] = None) -> bool:
    """beta(p-hat_D(d)) == p-hat(beta(d)), with beta(F:m) = F(x1..xm)."""
    for leaf in d.leaves():
        lab = leaf.label
        if isinstance(lab, (DerivedNonterminal, Lifted)):
            name, sort = (lab.name, lab.sort) if isinstance(lab, DerivedNonterminal) else (lab.base, lab.n)
            if name == p.lhs and sort != p.rank:
                raise SortError(f"{name} occurs with sort {sort}, production has rank {p.rank}")
    left = beta(apply_derived_hom(p, d, alphabet), nonterminals=True)
    right = hom_apply(HomFamily({p.lhs: p.rhs}, passthrough=True), beta(d, nonterminals=True))
    return left == right


# -- text syntax ------------------------------------------------------------

_DTOKEN = re.compile(r"\s*(?:(?P<p>[(),])|(?P<n>[^\s(),:{}]+(?:\{\d+,\d+\})?)(?::(?P<s>\d+))?)")
_PI_SHORT = re.compile(r"(?:pi|π)_?(\d+)\Z")


class _DReader:
    def __init__(self, text: str, alphabet: Optional[RankedAlphabet]):
        self.text = text
        self.pos = 0
        self.alphabet = alphabet

    def fail(self, msg: str, pos: Optional[int] = None, error=TermSyntaxError):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        if error is TermSyntaxError:
            raise TermSyntaxError(msg, line, col)
        raise error(f"{line}:{col}: {msg}")

    def peek(self) -> Optional[str]:
        m = _DTOKEN.match(self.text, self.pos)
        if not m or m.end() == self.pos:
            return None
        return m["p"]

    def token(self):
        m = _DTOKEN.match(self.text, self.pos)
        if not m or m.end() == self.pos:
            if self.text[self.pos :].strip():
                self.fail(f"unexpected character {self.text[self.pos:].strip()[0]!r}")
            self.fail("unexpected end of input")
        start = m.start("p") if m["p"] else m.start("n")
        self.pos = m.end()
        return m, start

    def expect(self, punct: str):
        m, start = self.token()
        if m["p"] != punct:
            self.fail(f"expected {punct!r}", start)

    def args(self) -> list:
        """Skip over "(t, ..., t)" and return where each argument starts, so sorts can flow down later."""
        self.expect("(")
        spans = []
        while True:
            spans.append(self.pos)
            self.skip_tree()
            m, start = self.token()
            if m["p"] == ")":
                return spans
            if m["p"] != ",":
                self.fail("expected ',' or ')'", start)

    def skip_tree(self):
        m, start = self.token()
        if not m["n"]:
            self.fail("expected a symbol", start)
        if self.peek() == "(":
            self.args()

    def tree(self, sort: Optional[int], head: bool) -> DerivedTerm:
        m, start = self.token()
        name, explicit = m["n"], m["s"]
        if not name:
            self.fail("expected a symbol", start)
        sub = _SUB_RE.match(name)
        if sub or (name == "S" and self.peek() == "("):
            spans = self.args()
            end = self.pos
            if sub:
                n, k = int(sub[1]), int(sub[2])
            else:
                n, k = len(spans) - 1, sort
                if k is None:
                    k = 0
            if len(spans) != n + 1:
                self.fail(f"{name} needs {n + 1} arguments, got {len(spans)}", start, SortError)
            kids = []
            for i, sp in enumerate(spans):
                self.pos = sp
                kids.append(self.tree(n if i == 0 else k, i == 0))
            self.pos = end
            return self.build(Substitution(n, k), kids, start)
        if self.peek() == "(":
            if name != "lift":
                self.fail(f"{name} takes no arguments in a derived term", start, SortError)
            self.expect("(")
            m2, s2 = self.token()
            self.expect(")")
            base = m2["n"]
            if m2["s"] is not None:
                rank = int(m2["s"])
            else:
                rank = self._rank(base, 0 if sort is None else sort, s2)
            return DerivedTerm(Lifted(base, rank))
        pi = _PI_RE.match(name)
        if pi:
            return self.build(Projection(int(pi[1]), int(pi[2])), [], start)
        pi = _PI_SHORT.match(name)
        if pi and (self.alphabet is None or name not in self.alphabet):
            if sort is None:
                self.fail(f"cannot infer the sort of {name}", start, SortError)
            return self.build(Projection(int(pi[1]), sort), [], start)
        if explicit is not None:
            return DerivedTerm(DerivedNonterminal(name, int(explicit)))
        rank = self._rank(name, 0 if not head else sort, start)
        nts = self.alphabet.nonterminals if self.alphabet is not None else ()
        leaf = _leaf(name, rank, nts)
        if head:
            return leaf
        s = 0 if sort is None else sort
        if rank == 0:
            return DerivedTerm(Substitution(0, s), [leaf])
        if rank == s:
            return DerivedTerm(Substitution(s, s), [leaf] + _projections(s))
        self.fail(f"{name} of rank {rank} cannot stand at sort {s}", start, SortError)

    def _rank(self, name: str, default: Optional[int], pos: int) -> int:
        if self.alphabet is not None:
            if name not in self.alphabet:
                self.fail(f"unknown symbol {name!r}", pos, UnknownSymbol)
            return self.alphabet.rank(name)
        if default is None:
            self.fail(f"cannot infer the rank of {name}", pos, SortError)
        return default

    def build(self, label, kids, pos) -> DerivedTerm:
        try:
            return DerivedTerm(label, kids)
        except SortError as exc:
            self.fail(str(exc), pos, SortError)


def parse_derived(text: str, alphabet: Optional[RankedAlphabet] = None, sort: Optional[int] = None) -> DerivedTerm:
    """Read a derived term.

    Accepted forms: ``S{n,k}(head,arg1,...)``, ``pi{i,n}``, ``lift(name)`` (or
    ``lift(name:n)`` to fix the sort),
    ``F:3`` for a nonterminal leaf, and bare names. The index-free notation
    ``S(head,args...)`` and ``pi1`` is also read, with indices inferred from
    the argument count and the expected sort (``sort`` at the root).

    A bare name in head position is the lifted symbol itself. Elsewhere it is
    normalised the way LIFT would have written it: a constant ``a`` at sort
    k becomes ``S{0,k}(a)``. Without an alphabet, bare names outside head
    position are taken to be constants.
    """
    r = _DReader(text, alphabet)
    d = r.tree(sort, False)
    if r.text[r.pos :].strip():
        r.fail(f"trailing input {r.text[r.pos:].strip()!r}")
    if sort is not None and d.sort != sort:
        raise SortError(f"term has sort {d.sort}, expected {sort}")
    return d
