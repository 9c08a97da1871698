"""Monadic second-order logic over word and tree models, by brute force.

Node variables start with a lowercase letter, set variables with an
uppercase one. Set quantifiers range over all subsets of the domain.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .alphabets import RankedAlphabet
from .errors import (
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
from .grammars import Bounds, Cftg, enumerate_regular, is_regular
from .terms import (
    Address,
    Structure,
    Term,
    Tree,
    canonical_key,
    string_to_structure,
    term_to_structure,
    yield_of,
)

__all__ = [
    "Formula",
    "Top",
    "Bottom",
    "Eq",
    "Rel",
    "Label",
    "In",
    "Not",
    "And",
    "Or",
    "Implies",
    "Iff",
    "Exists",
    "ForAll",
    "TRUE",
    "FALSE",
    "Vocabulary",
    "word_vocabulary",
    "tree_vocabulary",
    "parse_formula",
    "free_variables",
    "is_set_variable",
    "eval_formula",
    "to_nnf",
    "dualize",
    "models_of",
    "enumerate_trees",
    "Interpretation",
    "TransductionResult",
    "transduce",
    "apply_interpretation",
    "identity_interpretation",
    "parse_interpretation",
    "DefinabilityReport",
    "check_definability_equiv",
    "MAX_SET_DOMAIN",
    "MAX_SET_NESTING",
]

MAX_SET_DOMAIN = 14
MAX_SET_NESTING = 3


def is_set_variable(name: str) -> bool:
    return name[:1].isupper()


# -- syntax tree ------------------------------------------------------------


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Top(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Bottom(Formula):
    def __str__(self):
        return "false"


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Eq(Formula):
    x: str
    y: str

    def __str__(self):
        return f"(= {self.x} {self.y})"


@dataclass(frozen=True)
class Rel(Formula):
    """Binary atom; ``name`` is ``<`` (word order) or ``<_i`` (i-th successor)."""

    name: str
    x: str
    y: str

    def __str__(self):
        if self.name.startswith("<_"):
            return f"(succ {self.name[2:]} {self.x} {self.y})"
        return f"({self.name} {self.x} {self.y})"


@dataclass(frozen=True)
class Label(Formula):
    """P_a(x)."""

    label: str
    x: str

    def __str__(self):
        return f"(P {self.label} {self.x})"


@dataclass(frozen=True)
class In(Formula):
    x: str
    X: str

    def __str__(self):
        return f"(in {self.x} {self.X})"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    def __str__(self):
        return f"(not {self.body})"


@dataclass(frozen=True)
class And(Formula):
    parts: tuple

    def __str__(self):
        return "(and " + " ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple

    def __str__(self):
        return "(or " + " ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"(-> {self.left} {self.right})"


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"(<-> {self.left} {self.right})"


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"(exists {self.var} {self.body})"


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"(forall {self.var} {self.body})"


def free_variables(phi: Formula) -> set[str]:
    if isinstance(phi, (Top, Bottom)):
        return set()
    if isinstance(phi, (Eq, Rel)):
        return {phi.x, phi.y}
    if isinstance(phi, Label):
        return {phi.x}
    if isinstance(phi, In):
        return {phi.x, phi.X}
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, (And, Or)):
        return set().union(*(free_variables(p) for p in phi.parts))
    if isinstance(phi, (Implies, Iff)):
        return free_variables(phi.left) | free_variables(phi.right)
    if isinstance(phi, (Exists, ForAll)):
        return free_variables(phi.body) - {phi.var}
    raise TypeError(phi)


def _set_nesting(phi: Formula) -> int:
    if isinstance(phi, Not):
        return _set_nesting(phi.body)
    if isinstance(phi, (And, Or)):
        return max((_set_nesting(p) for p in phi.parts), default=0)
    if isinstance(phi, (Implies, Iff)):
        return max(_set_nesting(phi.left), _set_nesting(phi.right))
    if isinstance(phi, (Exists, ForAll)):
        return _set_nesting(phi.body) + is_set_variable(phi.var)
    return 0


# -- rewrites ---------------------------------------------------------------


def to_nnf(phi: Formula) -> Formula:
    """Negation normal form via De Morgan and quantifier duality; -> and <-> are expanded."""

    def pos(f: Formula) -> Formula:
        if isinstance(f, Not):
            return neg(f.body)
        if isinstance(f, And):
            return And(tuple(pos(p) for p in f.parts))
        if isinstance(f, Or):
            return Or(tuple(pos(p) for p in f.parts))
        if isinstance(f, Implies):
            return Or((neg(f.left), pos(f.right)))
        if isinstance(f, Iff):
            return And((Or((neg(f.left), pos(f.right))), Or((pos(f.left), neg(f.right)))))
        if isinstance(f, Exists):
            return Exists(f.var, pos(f.body))
        if isinstance(f, ForAll):
            return ForAll(f.var, pos(f.body))
        return f

    def neg(f: Formula) -> Formula:
        if isinstance(f, Top):
            return FALSE
        if isinstance(f, Bottom):
            return TRUE
        if isinstance(f, Not):
            return pos(f.body)
        if isinstance(f, And):
            return Or(tuple(neg(p) for p in f.parts))
        if isinstance(f, Or):
            return And(tuple(neg(p) for p in f.parts))
        if isinstance(f, Implies):
            return And((pos(f.left), neg(f.right)))
        if isinstance(f, Iff):
            return Or((And((pos(f.left), neg(f.right))), And((neg(f.left), pos(f.right)))))
        if isinstance(f, Exists):
            return ForAll(f.var, neg(f.body))
        if isinstance(f, ForAll):
            return Exists(f.var, neg(f.body))
        return Not(f)

    return pos(phi)


def dualize(phi: Formula) -> Formula:
    """Rewrite every forall/and through its dual: forall v A => not exists v not A, A and B => not(not A or not B)."""
    if isinstance(phi, Not):
        return Not(dualize(phi.body))
    if isinstance(phi, And):
        return Not(Or(tuple(Not(dualize(p)) for p in phi.parts)))
    if isinstance(phi, Or):
        return Or(tuple(dualize(p) for p in phi.parts))
    if isinstance(phi, Implies):
        return Implies(dualize(phi.left), dualize(phi.right))
    if isinstance(phi, Iff):
        return Iff(dualize(phi.left), dualize(phi.right))
    if isinstance(phi, ForAll):
        return Not(Exists(phi.var, Not(dualize(phi.body))))
    if isinstance(phi, Exists):
        return Exists(phi.var, dualize(phi.body))
    return phi


# -- parsing ----------------------------------------------------------------


@dataclass(frozen=True)
class Vocabulary:
    """Names a formula may mention: unary labels and binary relation names."""

    labels: frozenset
    relations: frozenset

    def __post_init__(self):
        object.__setattr__(self, "labels", frozenset(self.labels))
        object.__setattr__(self, "relations", frozenset(self.relations))


def word_vocabulary(letters: Iterable[str]) -> Vocabulary:
    return Vocabulary(frozenset(letters), frozenset({"<"}))


def tree_vocabulary(alphabet: Union[RankedAlphabet, Mapping[str, int]], n: Optional[int] = None) -> Vocabulary:
    ranks = dict(alphabet.terminals) if isinstance(alphabet, RankedAlphabet) else dict(alphabet)
    n = max(ranks.values(), default=0) if n is None else n
    return Vocabulary(frozenset(ranks), frozenset(f"<_{i}" for i in range(1, n + 1)))


_FTOKEN = re.compile(r"\s*(?:(?P<p>[()])|(?P<a>[^\s()]+))")
_COMMENT = re.compile(r"#[^\n]*")
_NODE_VAR = re.compile(r"[a-z][A-Za-z0-9_']*\Z")
_SET_VAR = re.compile(r"[A-Z][A-Za-z0-9_']*\Z")


def _sexpr(text: str):
    """Nested lists of (atom, offset) pairs."""
    stack: list[list] = [[]]
    opens: list[int] = []
    pos = 0
    while True:
        m = _FTOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m["p"] == "(":
            opens.append(m.start("p"))
            stack.append([])
        elif m["p"] == ")":
            if len(stack) == 1:
                raise _err(text, m.start("p"), "unbalanced ')'")
            lst = stack.pop()
            stack[-1].append((lst, opens.pop()))
        else:
            stack[-1].append((m["a"], m.start("a")))
    if text[pos:].strip():
        raise _err(text, pos, "unexpected input")
    if len(stack) != 1:
        raise _err(text, opens[-1], "unbalanced '('")
    if len(stack[0]) != 1:
        raise _err(text, stack[0][1][1] if len(stack[0]) > 1 else 0, "expected exactly one formula")
    return stack[0][0]


def _err(text: str, pos: int, msg: str) -> FormulaSyntaxError:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return FormulaSyntaxError(msg, line, col)


def parse_formula(text: str, vocabulary: Optional[Vocabulary] = None) -> Formula:
    """Read the parenthesised prefix syntax.

    ``(exists x A)``, ``(forall X A)``, ``(not A)``, ``(and A ...)``,
    ``(or A ...)``, ``(-> A B)``, ``(<-> A B)``, ``(= x y)``, ``(< x y)``,
    ``(succ i x y)``, ``(P a x)``, ``(in x X)``, ``true``, ``false``.
    ``#`` starts a comment that runs to the end of the line.
    """
    text = _COMMENT.sub(lambda m: " " * len(m.group()), text)

    def node_var(item) -> str:
        name, pos = item
        if not isinstance(name, str) or not _NODE_VAR.match(name):
            raise _err(text, pos, f"expected a node variable, found {_show(name)}")
        return name

    def set_var(item) -> str:
        name, pos = item
        if not isinstance(name, str) or not _SET_VAR.match(name):
            raise _err(text, pos, f"expected a set variable, found {_show(name)}")
        return name

    def check_rel(name: str, pos: int):
        if vocabulary is not None and name not in vocabulary.relations:
            raise UnknownRelation(f"{_loc(text, pos)}: relation {name} not in the vocabulary")

    def go(item) -> Formula:
        val, pos = item
        if isinstance(val, str):
            if val in ("true", "⊤"):
                return TRUE
            if val in ("false", "⊥"):
                return FALSE
            raise _err(text, pos, f"unexpected atom {val!r}")
        if not val:
            raise _err(text, pos, "empty list")
        op, oppos = val[0]
        args = val[1:]
        if not isinstance(op, str):
            raise _err(text, oppos, "operator expected")

        def arity(n: int):
            if len(args) != n:
                raise _err(text, oppos, f"{op} takes {n} arguments, got {len(args)}")

        if op in ("not", "¬"):
            arity(1)
            return Not(go(args[0]))
        if op in ("and", "∧", "or", "∨"):
            if not args:
                raise _err(text, oppos, f"{op} needs arguments")
            parts = tuple(go(a) for a in args)
            return And(parts) if op in ("and", "∧") else Or(parts)
        if op in ("->", "→", "implies"):
            arity(2)
            return Implies(go(args[0]), go(args[1]))
        if op in ("<->", "↔", "iff"):
            arity(2)
            return Iff(go(args[0]), go(args[1]))
        if op in ("exists", "∃", "forall", "∀"):
            arity(2)
            v, vpos = args[0]
            if not isinstance(v, str) or not (_NODE_VAR.match(v) or _SET_VAR.match(v)):
                raise _err(text, vpos, f"expected a variable, found {_show(v)}")
            body = go(args[1])
            return Exists(v, body) if op in ("exists", "∃") else ForAll(v, body)
        if op == "=":
            arity(2)
            return Eq(node_var(args[0]), node_var(args[1]))
        if op == "<":
            arity(2)
            check_rel("<", oppos)
            return Rel("<", node_var(args[0]), node_var(args[1]))
        if op == "succ":
            arity(3)
            i, ipos = args[0]
            if not isinstance(i, str) or not i.isdigit() or int(i) < 1:
                raise _err(text, ipos, "successor index must be a positive integer")
            check_rel(f"<_{int(i)}", oppos)
            return Rel(f"<_{int(i)}", node_var(args[1]), node_var(args[2]))
        if op == "P":
            arity(2)
            a, apos = args[0]
            if not isinstance(a, str):
                raise _err(text, apos, "label expected")
            if vocabulary is not None and a not in vocabulary.labels:
                raise UnknownRelation(f"{_loc(text, apos)}: predicate P_{a} not in the vocabulary")
            return Label(a, node_var(args[1]))
        if op == "in":
            arity(2)
            return In(node_var(args[0]), set_var(args[1]))
        raise _err(text, oppos, f"unknown operator {op!r}")

    return go(_sexpr(text))


def _show(v) -> str:
    return repr(v) if isinstance(v, str) else "a list"


def _loc(text: str, pos: int) -> str:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return f"{line}:{col}"


# -- evaluation -------------------------------------------------------------


class _Model:
    """Structure re-indexed to 0..n-1 with unary predicates as bitmasks."""

    def __init__(self, M: Structure):
        self.elements = tuple(M.domain)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.n = len(self.elements)
        self.binary = {
            name: frozenset((self.index[a], self.index[b]) for a, b in pairs) for name, pairs in M.binary.items()
        }
        self.unary = {}
        for name, elems in M.unary.items():
            mask = 0
            for e in elems:
                mask |= 1 << self.index[e]
            self.unary[name] = mask


def _holds(m: _Model, phi: Formula, env: dict) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Eq):
        return env[phi.x] == env[phi.y]
    if isinstance(phi, Rel):
        return (env[phi.x], env[phi.y]) in m.binary.get(phi.name, ())
    if isinstance(phi, Label):
        return bool(m.unary.get(phi.label, 0) >> env[phi.x] & 1)
    if isinstance(phi, In):
        return bool(env[phi.X] >> env[phi.x] & 1)
    if isinstance(phi, Not):
        return not _holds(m, phi.body, env)
    if isinstance(phi, And):
        return all(_holds(m, p, env) for p in phi.parts)
    if isinstance(phi, Or):
        return any(_holds(m, p, env) for p in phi.parts)
    if isinstance(phi, Implies):
        return not _holds(m, phi.left, env) or _holds(m, phi.right, env)
    if isinstance(phi, Iff):
        return _holds(m, phi.left, env) == _holds(m, phi.right, env)
    if isinstance(phi, (Exists, ForAll)):
        values = range(1 << m.n) if is_set_variable(phi.var) else range(m.n)
        want = isinstance(phi, Exists)
        saved = env.get(phi.var, _MISSING)
        try:
            for v in values:
                env[phi.var] = v
                if _holds(m, phi.body, env) == want:
                    return want
            return not want
        finally:
            if saved is _MISSING:
                env.pop(phi.var, None)
            else:
                env[phi.var] = saved
    raise TypeError(phi)


_MISSING = object()


def eval_formula(
    M: Structure,
    phi: Formula,
    g: Optional[Mapping[str, object]] = None,
    *,
    guard: bool = True,
) -> bool:
    """Does ``M`` satisfy ``phi`` under the assignment ``g``?

    ``g`` maps node variables to domain elements and set variables to
    iterables of domain elements. With ``guard`` (the default) set
    quantification is refused on domains above ``MAX_SET_DOMAIN`` elements or
    beyond ``MAX_SET_NESTING`` nested set quantifiers.
    """
    m = _Model(M)
    g = dict(g or {})
    missing = free_variables(phi) - set(g)
    if missing:
        raise UnboundVariable(", ".join(sorted(missing)))
    nesting = _set_nesting(phi)
    if guard and nesting and (m.n > MAX_SET_DOMAIN or nesting > MAX_SET_NESTING):
        raise BoundTooLarge(
            f"set quantification over {m.n} elements with nesting {nesting} "
            f"(limits {MAX_SET_DOMAIN}, {MAX_SET_NESTING}); pass guard=False to override"
        )
    env: dict[str, int] = {}
    for var, value in g.items():
        if is_set_variable(var):
            mask = 0
            for e in value:
                if e not in m.index:
                    raise ValueError(f"{var} assigned {e!r}, not in the domain")
                mask |= 1 << m.index[e]
            env[var] = mask
        else:
            if value not in m.index:
                raise ValueError(f"{var} assigned {value!r}, not in the domain")
            env[var] = m.index[value]
    return _holds(m, phi, env)


# -- model enumeration ------------------------------------------------------


def enumerate_trees(alphabet: Union[RankedAlphabet, Mapping[str, int]], max_nodes: int) -> list[Term]:
    """All trees over the terminal alphabet with at most ``max_nodes`` nodes, canonically ordered."""
    ranks = dict(alphabet.terminals) if isinstance(alphabet, RankedAlphabet) else dict(alphabet)
    by_size: dict[int, list[Term]] = {}

    def compositions(total: int, parts: int):
        if parts == 0:
            if total == 0:
                yield ()
            return
        for first in range(1, total - parts + 2):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    for size in range(1, max_nodes + 1):
        out: list[Term] = []
        for name in sorted(ranks):
            r = ranks[name]
            if r == 0:
                if size == 1:
                    out.append(Term(name))
                continue
            for sizes in compositions(size - 1, r):
                for kids in itertools.product(*(by_size[s] for s in sizes)):
                    out.append(Term(name, kids))
        by_size[size] = out
    trees = [t for size in sorted(by_size) for t in by_size[size]]
    return sorted(trees, key=canonical_key)


def models_of(
    phi: Formula,
    alphabet,
    kind: str = "word",
    size_bound: int = 10,
    *,
    max_candidates: int = 500_000,
    guard: bool = True,
) -> list:
    """Mod(phi) restricted to small models.

    ``kind="word"``: words over the letters ``alphabet`` of length at most
    ``size_bound``, returned as strings (space-separated when some letter is
    longer than one character). ``kind="tree"``: trees over the ranked
    ``alphabet`` with at most ``size_bound`` nodes.
    """
    free = free_variables(phi)
    if free:
        raise UnboundVariable(", ".join(sorted(free)))
    if kind == "word":
        letters = list(dict.fromkeys(alphabet))
        count = sum(len(letters) ** n for n in range(size_bound + 1))
        if count > max_candidates:
            raise BoundTooLarge(f"{count} candidate words (limit {max_candidates})")
        sep = "" if all(len(a) == 1 for a in letters) else " "
        out = []
        for n in range(size_bound + 1):
            for word in itertools.product(letters, repeat=n):
                if eval_formula(string_to_structure(word, letters), phi, guard=guard):
                    out.append(sep.join(word))
        return sorted(out, key=lambda w: (len(w.split()) if sep else len(w), w))
    if kind == "tree":
        ranks = dict(alphabet.terminals) if isinstance(alphabet, RankedAlphabet) else dict(alphabet)
        n = max(ranks.values(), default=0)
        trees = enumerate_trees(ranks, size_bound)
        if len(trees) > max_candidates:
            raise BoundTooLarge(f"{len(trees)} candidate trees (limit {max_candidates})")
        return [t for t in trees if eval_formula(term_to_structure(t, n, ranks), phi, guard=guard)]
    raise ValueError(f"kind must be 'word' or 'tree', not {kind!r}")


# -- definable transductions ------------------------------------------------


@dataclass(frozen=True)
class Interpretation:
    """I = (A, A_Omega(x), A_<i(x, y), A_Pa(x)).

    ``ranks`` optionally declares target ranks; undeclared labels must at
    least be used with one consistent successor count.
    """

    domain_sentence: Formula
    domain_formula: Formula
    successor_formulas: Mapping[int, Formula]
    label_formulas: Mapping[str, Formula]
    ranks: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if free_variables(self.domain_sentence):
            raise UnboundVariable("domain sentence must be closed")
        if not free_variables(self.domain_formula) <= {"x"}:
            raise UnboundVariable("domain formula may only mention x free")
        for i, f in self.successor_formulas.items():
            if not free_variables(f) <= {"x", "y"}:
                raise UnboundVariable(f"successor formula {i} may only mention x, y free")
        for a, f in self.label_formulas.items():
            if not free_variables(f) <= {"x"}:
                raise UnboundVariable(f"label formula {a} may only mention x free")


@dataclass(frozen=True)
class TransductionResult:
    term: Tree
    addresses: Mapping[object, Address]  # input element -> output address


def transduce(I: Interpretation, t: Tree, *, guard: bool = True) -> TransductionResult:
    """def_I(t) together with the input-node to output-address correspondence."""
    M = term_to_structure(t)
    if not eval_formula(M, I.domain_sentence, guard=guard):
        raise DomainSentenceFails(str(t))
    D = [u for u in M.domain if eval_formula(M, I.domain_formula, {"x": u}, guard=guard)]
    if not D:
        raise EmptyDomain(str(t))
    label: dict = {}
    for u in D:
        hits = [a for a, f in I.label_formulas.items() if eval_formula(M, f, {"x": u}, guard=guard)]
        if len(hits) != 1:
            raise LabelClash(f"node {u} has labels {hits}")
        label[u] = hits[0]
    kids: dict = {u: {} for u in D}
    parent: dict = {}
    for i in sorted(I.successor_formulas):
        f = I.successor_formulas[i]
        for u in D:
            for v in D:
                if eval_formula(M, f, {"x": u, "y": v}, guard=guard):
                    if i in kids[u]:
                        raise NotATreeDomain(f"node {u} has two {i}-successors")
                    if v in parent:
                        raise NotATreeDomain(f"node {v} has two parents")
                    kids[u][i] = v
                    parent[v] = u
    roots = [u for u in D if u not in parent]
    if len(roots) != 1:
        raise NotATreeDomain(f"{len(roots)} roots")
    for u in D:
        idx = sorted(kids[u])
        if idx != list(range(1, len(idx) + 1)):
            raise NotATreeDomain(f"node {u} has successor indices {idx}")
    used_rank: dict[str, int] = dict(I.ranks)
    for u in D:
        a, r = label[u], len(kids[u])
        if used_rank.setdefault(a, r) != r:
            raise RankMismatch(f"{a} has rank {used_rank[a]} but node {u} has {r} successors")
    addresses: dict = {}

    def build(u, addr, depth):
        if depth > len(D):
            raise NotATreeDomain("successor relation has a cycle")
        addresses[u] = addr
        return Term(label[u], [build(kids[u][i], addr + (i - 1,), depth + 1) for i in sorted(kids[u])])

    out = build(roots[0], (), 0)
    if len(addresses) != len(D):
        raise NotATreeDomain("successor relation is not connected")
    return TransductionResult(out, addresses)


def apply_interpretation(I: Interpretation, t: Tree, *, guard: bool = True) -> Tree:
    return transduce(I, t, guard=guard).term


def identity_interpretation(alphabet: Union[RankedAlphabet, Mapping[str, int]]) -> Interpretation:
    ranks = dict(alphabet.terminals) if isinstance(alphabet, RankedAlphabet) else dict(alphabet)
    n = max(ranks.values(), default=0)
    return Interpretation(
        TRUE,
        TRUE,
        {i: Rel(f"<_{i}", "x", "y") for i in range(1, n + 1)},
        {a: Label(a, "x") for a in ranks},
        ranks,
    )


_SECTION = re.compile(r"^(domain-sentence|domain|succ\s+(\d+)|label\s+([^\s:/]+)(?:/(\d+))?)\s*:", re.M)


def parse_interpretation(text: str, vocabulary: Optional[Vocabulary] = None) -> Interpretation:
    """Read sections ``domain-sentence:``, ``domain:``, ``succ i:``, ``label a:`` (or ``label a/r:``).

    Each section holds one formula, possibly over several lines; ``#`` starts a comment.
    A missing ``domain-sentence`` or ``domain`` section defaults to ``true``.
    """
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    heads = list(_SECTION.finditer(body))
    if not heads:
        raise FormulaSyntaxError("no sections found", 1, 1)
    if body[: heads[0].start()].strip():
        raise _err(body, 0, "text before the first section")
    sentence, domain = TRUE, TRUE
    succ: dict[int, Formula] = {}
    labels: dict[str, Formula] = {}
    ranks: dict[str, int] = {}
    for h, nxt in zip(heads, heads[1:] + [None]):
        chunk = body[h.end() : nxt.start() if nxt else len(body)]
        try:
            f = parse_formula(chunk, vocabulary)
        except FormulaSyntaxError as exc:
            line = body.count("\n", 0, h.end()) + exc.line
            raise FormulaSyntaxError(str(exc).split(": ", 1)[-1], line, exc.column) from exc
        key = h.group(1)
        if key == "domain-sentence":
            sentence = f
        elif key == "domain":
            domain = f
        elif h.group(2):
            succ[int(h.group(2))] = f
        else:
            labels[h.group(3)] = f
            if h.group(4):
                ranks[h.group(3)] = int(h.group(4))
    return Interpretation(sentence, domain, succ, labels, ranks)


# -- desk-scale definability ------------------------------------------------


@dataclass(frozen=True)
class DefinabilityReport:
    only_grammar: tuple
    only_formula: tuple
    grammar_exhausted: bool = False

    @property
    def agree(self) -> bool:
        return not self.only_grammar and not self.only_formula


def check_definability_equiv(
    G: Cftg,
    phi: Formula,
    bounds: Bounds,
    *,
    kind: str = "tree",
    size_bound: Optional[int] = None,
    letters: Optional[Sequence[str]] = None,
    empty: Iterable[str] = (),
) -> DefinabilityReport:
    """Compare L(G) with Mod(phi) on small structures.

    ``kind="tree"`` compares trees with at most ``size_bound`` nodes
    (default ``bounds.max_nodes``). ``kind="word"`` compares the yields of
    L(G) of length at most ``size_bound`` with the word models of ``phi``
    over ``letters``.
    """
    if not is_regular(G):
        from .errors import NotRegular

        raise NotRegular("definability check needs a regular grammar")
    trees = enumerate_regular(G, bounds)
    if kind == "tree":
        size = bounds.max_nodes if size_bound is None else size_bound
        mine = {t for t in trees if t.size <= size}
        theirs = set(models_of(phi, G.alphabet.terminal_alphabet(), "tree", size))
        key = canonical_key
    elif kind == "word":
        if letters is None:
            raise ValueError("word comparison needs the letters")
        size = size_bound if size_bound is not None else 10
        sep = "" if all(len(a) == 1 for a in letters) else " "
        mine = set()
        for t in trees:
            w = yield_of(t, empty, sep=sep)
            if (len(w.split()) if sep else len(w)) <= size:
                mine.add(w)
        theirs = set(models_of(phi, letters, "word", size))
        key = lambda w: (len(w), w)  # noqa: E731
    else:
        raise ValueError(f"kind must be 'word' or 'tree', not {kind!r}")
    return DefinabilityReport(
        tuple(sorted(mine - theirs, key=key)),
        tuple(sorted(theirs - mine, key=key)),
        trees.exhausted,
    )
