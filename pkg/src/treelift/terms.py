"""Ranked trees with variables, substitution, yields, tree domains and relational structures."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .alphabets import VARIABLE_RE, RankedAlphabet
from .errors import (
    ArityMismatch,
    NonTerminalLeaf,
    ParseError,
    RankMismatch,
    TermSyntaxError,
    UnknownLetter,
    UnknownSymbol,
    VariableOutOfRange,
)

__all__ = [
    "Term",
    "Var",
    "Tree",
    "Address",
    "Structure",
    "parse_term",
    "substitute",
    "yield_of",
    "addresses_of",
    "subtree_at",
    "replace_at",
    "validate_tree_domain",
    "format_address",
    "parse_address",
    "term_to_structure",
    "string_to_structure",
    "parse_structure",
    "variables_of",
    "canonical_key",
    "Lexer",
    "tokenize_word",
]


class Term:
    """A node ``label(children...)``; constants have no children.

    Immutable and hashable; the hash and node count are computed once.
    """

    __slots__ = ("label", "children", "_hash", "size")

    def __init__(self, label: str, children: Iterable["Tree"] = ()):
        children = tuple(children)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "_hash", hash((label, children)))
        object.__setattr__(self, "size", 1 + sum(c.size for c in children))

    def __setattr__(self, key, value):
        raise AttributeError("Term is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term) or self._hash != other._hash:
            return False
        return self.label == other.label and self.children == other.children

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Term({str(self)!r})"

    def __str__(self):
        if not self.children:
            return self.label
        return f"{self.label}({','.join(str(c) for c in self.children)})"

    @property
    def rank(self) -> int:
        return len(self.children)

    def is_ground(self) -> bool:
        return all(isinstance(c, Term) and c.is_ground() for c in self.children)

    def labels(self) -> Iterator[str]:
        yield self.label
        for c in self.children:
            if isinstance(c, Term):
                yield from c.labels()


class Var:
    """The variable ``x_i`` (1-based)."""

    __slots__ = ("index",)
    size = 1
    children = ()

    def __init__(self, index: int):
        if index < 1:
            raise VariableOutOfRange(f"x{index}")
        object.__setattr__(self, "index", index)

    def __setattr__(self, key, value):
        raise AttributeError("Var is immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and other.index == self.index

    def __hash__(self):
        return hash(("$x", self.index))

    def __repr__(self):
        return f"Var({self.index})"

    def __str__(self):
        return f"x{self.index}"

    def is_ground(self) -> bool:
        return False

    def labels(self):
        return iter(())


Tree = Union[Term, Var]
Address = tuple  # child indices, 0-based


def canonical_key(t: Tree) -> tuple[int, str]:
    """Sort key giving the canonical output order: node count, then text."""
    return (t.size, str(t))


def variables_of(t: Tree) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out: set[int] = set()
    for c in t.children:
        out |= variables_of(c)
    return out


# -- text syntax ------------------------------------------------------------

_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r\n]+)
      | (?P<punct>[(),])
      | (?P<name>[^\s(),|#{}:/]+(?:\{\d+,\d+\})?)
    """,
    re.VERBOSE,
)


class Lexer:
    """Tokenizer shared by the term, derived-term and grammar readers."""

    def __init__(self, text: str, line: int = 1, column: int = 1, error=TermSyntaxError):
        self.text = text
        self.pos = 0
        self.line0 = line
        self.col0 = column
        self.error = error
        self._skip()

    def location(self, pos: Optional[int] = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        before = self.text[:pos]
        nl = before.count("\n")
        if nl:
            return self.line0 + nl, pos - before.rfind("\n")
        return self.line0, self.col0 + pos

    def fail(self, message: str, pos: Optional[int] = None, error=None):
        line, col = self.location(pos)
        error = error or self.error
        if issubclass(error, ParseError):
            raise error(message, line, col)
        raise error(f"{line}:{col}: {message}")

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> Optional[str]:
        if self.at_end():
            return None
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            return self.text[self.pos]
        return m.group(0)

    def next(self) -> tuple[str, int]:
        if self.at_end():
            self.fail("unexpected end of input")
        m = _TOKEN.match(self.text, self.pos)
        if not m or m.lastgroup == "ws":
            self.fail(f"unexpected character {self.text[self.pos]!r}")
        start = self.pos
        self.pos = m.end()
        self._skip()
        return m.group(0), start

    def expect(self, tok: str):
        got, start = self.next()
        if got != tok:
            self.fail(f"expected {tok!r}, found {got!r}", start)

    def name(self) -> tuple[str, int]:
        tok, start = self.next()
        if tok in "(),":
            self.fail(f"expected a symbol, found {tok!r}", start)
        return tok, start

    def finish(self):
        if not self.at_end():
            self.fail(f"trailing input {self.text[self.pos:]!r}")


def _read_tree(lx: Lexer, alphabet: Optional[RankedAlphabet], k: Optional[int]) -> Tree:
    name, start = lx.name()
    m = VARIABLE_RE.match(name)
    if m and (alphabet is None or name not in alphabet):
        i = int(m.group(1))
        if k is not None and i > k:
            lx.fail(f"variable {name} not in X_{k}", start, VariableOutOfRange)
        if lx.peek() == "(":
            lx.fail(f"variable {name} cannot take arguments", start, RankMismatch)
        return Var(i)
    children: list[Tree] = []
    if lx.peek() == "(":
        lx.next()
        children.append(_read_tree(lx, alphabet, k))
        while lx.peek() == ",":
            lx.next()
            children.append(_read_tree(lx, alphabet, k))
        lx.expect(")")
    if alphabet is not None:
        if name not in alphabet:
            lx.fail(f"unknown symbol {name!r}", start, UnknownSymbol)
        rank = alphabet.rank(name)
        if rank != len(children):
            lx.fail(f"{name} has rank {rank} but {len(children)} arguments", start, RankMismatch)
    return Term(name, children)


def parse_term(
    text: str,
    alphabet: Optional[RankedAlphabet] = None,
    k: Optional[int] = 0,
    *,
    line: int = 1,
    column: int = 1,
) -> Tree:
    """Read ``name``, ``name(t1,...,tn)`` or ``xN``.

    With an alphabet every symbol is checked for existence and rank; ``k``
    bounds the variable indices (``None`` allows any).
    """
    lx = Lexer(text, line, column)
    t = _read_tree(lx, alphabet, k)
    lx.finish()
    return t


# -- substitution and yield -------------------------------------------------


def substitute(t: Tree, args: Sequence[Tree], m: Optional[int] = None) -> Tree:
    """t[args[0], ..., args[m-1]]: replace every x_i by ``args[i-1]``.

    ``m`` defaults to ``len(args)``; raises :class:`ArityMismatch` if the
    lengths differ or ``t`` mentions a variable beyond them.
    """
    args = tuple(args)
    if m is not None and m != len(args):
        raise ArityMismatch(f"expected {m} arguments, got {len(args)}")

    def go(u: Tree) -> Tree:
        if isinstance(u, Var):
            if u.index > len(args):
                raise ArityMismatch(f"x{u.index} but only {len(args)} arguments")
            return args[u.index - 1]
        if not u.children:
            return u
        return Term(u.label, [go(c) for c in u.children])

    return go(t)


def yield_of(
    t: Tree,
    empty: Iterable[str] = (),
    alphabet: Optional[RankedAlphabet] = None,
    *,
    unary: str = "prefix",
    sep: str = "",
) -> str:
    """String value of a terminal tree.

    Constants contribute their label (nothing if listed in ``empty``) and
    symbols of rank >= 2 concatenate their children. Unary symbols are read as
    left concatenation (``a(t)`` -> ``"a" + yield(t)``), the usual string
    reading of monadic trees; pass ``unary="drop"`` for the plain frontier.
    """
    empty = frozenset(empty)
    parts: list[str] = []

    def go(u: Tree):
        if isinstance(u, Var):
            raise NonTerminalLeaf(f"variable {u} in yield")
        if alphabet is not None and alphabet.is_nonterminal(u.label):
            raise NonTerminalLeaf(f"nonterminal {u.label} in yield")
        if not u.children:
            if u.label not in empty:
                parts.append(u.label)
            return
        if len(u.children) == 1 and unary == "prefix":
            parts.append(u.label)
        for c in u.children:
            go(c)

    go(t)
    return sep.join(parts)


# -- addresses --------------------------------------------------------------


def addresses_of(t: Tree) -> list[Address]:
    """dom(t) in preorder."""
    out: list[Address] = []

    def go(u: Tree, addr: Address):
        out.append(addr)
        for i, c in enumerate(u.children):
            go(c, addr + (i,))

    go(t, ())
    return out


def subtree_at(t: Tree, addr: Address) -> Tree:
    for i in addr:
        t = t.children[i]
    return t


def replace_at(t: Tree, addr: Address, new: Tree) -> Tree:
    if not addr:
        return new
    i = addr[0]
    kids = list(t.children)
    kids[i] = replace_at(kids[i], addr[1:], new)
    return Term(t.label, kids)


def validate_tree_domain(D: Iterable[Address], max_branch: Optional[int] = None) -> bool:
    D = set(map(tuple, D))
    if not D:
        return False
    for u in D:
        if u and u[:-1] not in D:
            return False
        if u and u[-1] > 0 and u[:-1] + (u[-1] - 1,) not in D:
            return False
        if max_branch is not None and any(i >= max_branch or i < 0 for i in u):
            return False
    return () in D


def format_address(addr: Address) -> str:
    """1-based printing: root is ``ε``, first child of the root is ``1``."""
    if not addr:
        return "ε"
    if all(i < 9 for i in addr):
        return "".join(str(i + 1) for i in addr)
    # dotted once an index needs two digits; a lone component keeps a trailing dot
    return ".".join(str(i + 1) for i in addr) + ("." if len(addr) == 1 else "")


def parse_address(text: str) -> Address:
    text = text.strip()
    if text in ("ε", "e", ""):
        return ()
    parts = [p for p in text.split(".") if p] if "." in text else list(text)
    return tuple(int(p) - 1 for p in parts)


# -- relational structures --------------------------------------------------


@dataclass(frozen=True)
class Structure:
    """Finite relational structure: domain, named binary relations, named unary predicates.

    Word models use the relation ``<``; tree models use ``<_1`` ... ``<_n``.
    Predicates are keyed by the bare label (``P_a`` is ``unary["a"]``).
    """

    domain: tuple
    binary: Mapping[str, frozenset] = field(default_factory=dict)
    unary: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        dom = set(self.domain)
        for name, pairs in self.binary.items():
            for a, b in pairs:
                if a not in dom or b not in dom:
                    raise ValueError(f"relation {name} leaves the domain: {(a, b)}")
        for name, elems in self.unary.items():
            if not set(elems) <= dom:
                raise ValueError(f"predicate {name} leaves the domain")

    def relation(self, name: str) -> frozenset:
        return self.binary.get(name, frozenset())

    def predicate(self, name: str) -> frozenset:
        return self.unary.get(name, frozenset())

    def dump(self, fmt=None) -> str:
        """Line-based text form, one line for the domain and each relation/predicate."""
        fmt = fmt or (format_address if self.domain and isinstance(self.domain[0], tuple) else str)
        order = {e: i for i, e in enumerate(self.domain)}
        lines = ["domain: " + " ".join(fmt(e) for e in self.domain)]
        for name in sorted(self.binary):
            pairs = sorted(self.binary[name], key=lambda p: (order[p[0]], order[p[1]]))
            lines.append(f"binary {name}: " + " ".join(f"({fmt(a)},{fmt(b)})" for a, b in pairs))
        for name in sorted(self.unary):
            elems = sorted(self.unary[name], key=order.__getitem__)
            lines.append(f"unary {name}: " + " ".join(fmt(e) for e in elems))
        return "\n".join(line.rstrip() for line in lines) + "\n"


def parse_structure(text: str) -> Structure:
    """Inverse of :meth:`Structure.dump`; elements are kept as strings."""
    domain: list[str] = []
    binary: dict[str, frozenset] = {}
    unary: dict[str, frozenset] = {}
    seen_domain = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise TermSyntaxError("expected 'section: ...'", lineno, 1)
        head = head.strip()
        if head == "domain":
            domain = body.split()
            seen_domain = True
        elif head.startswith("binary "):
            pairs = re.findall(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)", body)
            binary[head[7:].strip()] = frozenset(pairs)
        elif head.startswith("unary "):
            unary[head[6:].strip()] = frozenset(body.split())
        else:
            raise TermSyntaxError(f"unknown section {head!r}", lineno, 1)
    if not seen_domain:
        raise TermSyntaxError("missing domain line", 1, 1)
    try:
        return Structure(tuple(domain), binary, unary)
    except ValueError as exc:
        raise TermSyntaxError(str(exc)) from exc


def term_to_structure(
    t: Tree,
    max_rank: Optional[int] = None,
    labels: Iterable[str] = (),
) -> Structure:
    """Labeled tree model of a variable-free tree.

    Elements are 0-based address tuples. Successor relations ``<_1..<_n`` are
    present for ``n = max_rank`` (default: the largest rank occurring in ``t``)
    and a predicate exists for every label of ``t`` plus any in ``labels``.
    """
    if not t.is_ground():
        raise NonTerminalLeaf("tree models need variable-free trees")
    domain = addresses_of(t)
    n = max_rank if max_rank is not None else max((len(subtree_at(t, a).children) for a in domain), default=0)
    succ: dict[str, set] = {f"<_{i}": set() for i in range(1, n + 1)}
    preds: dict[str, set] = {a: set() for a in labels}
    for addr in domain:
        node = subtree_at(t, addr)
        preds.setdefault(node.label, set()).add(addr)
        for i in range(len(node.children)):
            succ.setdefault(f"<_{i + 1}", set()).add((addr, addr + (i,)))
    return Structure(
        tuple(domain),
        {k: frozenset(v) for k, v in succ.items()},
        {k: frozenset(v) for k, v in preds.items()},
    )


def tokenize_word(u: Union[str, Sequence[str]]) -> tuple[str, ...]:
    """Whitespace-separated tokens if ``u`` contains whitespace, else characters."""
    if not isinstance(u, str):
        return tuple(u)
    if any(ch.isspace() for ch in u):
        return tuple(u.split())
    return tuple(u)


def string_to_structure(u: Union[str, Sequence[str]], alphabet: Iterable[str]) -> Structure:
    """Word model: positions 1..|u|, the strict order ``<`` and one predicate per letter."""
    letters = tuple(dict.fromkeys(alphabet))
    word = tokenize_word(u)
    for tok in word:
        if tok not in letters:
            raise UnknownLetter(tok)
    domain = tuple(range(1, len(word) + 1))
    order = frozenset((i, j) for i in domain for j in domain if i < j)
    preds = {a: frozenset(i for i, tok in zip(domain, word) if tok == a) for a in letters}
    return Structure(domain, {"<": order}, preds)
