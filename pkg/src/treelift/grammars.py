"""Context-free tree grammars, inside-out derivation and bounded language enumeration."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from .alphabets import RankedAlphabet
from .errors import GrammarSyntaxError, NotFound, NotRegular, TreeliftError
from .terms import (
    Address,
    Term,
    Tree,
    Var,
    canonical_key,
    format_address,
    parse_term,
    replace_at,
    substitute,
    variables_of,
    yield_of,
)

__all__ = [
    "Production",
    "Cftg",
    "Diagnostic",
    "DerivationStep",
    "Bounds",
    "Enumeration",
    "validate_grammar",
    "is_regular",
    "is_terminal_tree",
    "io_successors",
    "leftmost_successors",
    "enumerate_io",
    "enumerate_regular",
    "yield_language",
    "derivation_trace",
    "parse_grammar",
    "load_grammar",
    "format_grammar",
]


@dataclass(frozen=True)
class Production:
    lhs: str
    rank: int
    rhs: Tree

    def __str__(self):
        return f"{self.head()} -> {self.rhs}"

    def head(self) -> str:
        if not self.rank:
            return self.lhs
        return f"{self.lhs}({','.join(f'x{i}' for i in range(1, self.rank + 1))})"


@dataclass(frozen=True)
class Cftg:
    """G = <Sigma, F, S, P>; ``alphabet`` holds both Sigma and F.

    ``sorts`` is only set on grammars produced by lifting: it records the
    derived sort of every rank-0 symbol that stands for a lifted operator.
    """

    alphabet: RankedAlphabet
    start: str
    productions: tuple[Production, ...]
    sorts: Optional[Mapping[str, int]] = None

    def __post_init__(self):
        object.__setattr__(self, "productions", tuple(self.productions))
        if self.sorts is not None:
            object.__setattr__(self, "sorts", dict(self.sorts))

    @property
    def terminals(self) -> Mapping[str, int]:
        return self.alphabet.terminals

    @property
    def nonterminals(self) -> Mapping[str, int]:
        return self.alphabet.nonterminals

    def productions_for(self, name: str) -> list[tuple[int, Production]]:
        return [(i, p) for i, p in enumerate(self.productions) if p.lhs == name]

    def __hash__(self):
        return hash((self.alphabet, self.start, self.productions))


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class DerivationStep:
    production: int
    address: Address
    before: Tree
    after: Tree

    def __str__(self):
        return f"{self.before} => {self.after}  [p{self.production + 1} at {format_address(self.address)}]"


@dataclass(frozen=True)
class Bounds:
    """Cut-offs for enumeration. ``None`` means unbounded on that axis."""

    max_steps: Optional[int] = 6
    max_nodes: Optional[int] = 60

    def __post_init__(self):
        for v in (self.max_steps, self.max_nodes):
            if v is not None and v < 0:
                raise ValueError("bounds must be >= 0")

    def __le__(self, other: "Bounds") -> bool:
        def le(a, b):
            return b is None or (a is not None and a <= b)

        return le(self.max_steps, other.max_steps) and le(self.max_nodes, other.max_nodes)


@dataclass(frozen=True)
class Enumeration:
    """Result of a bounded enumeration, in canonical order.

    ``exhausted`` is set when the cut-off was hit with work left over, so the
    items may be a strict subset of the language.
    """

    items: tuple
    exhausted: bool = False

    def __iter__(self) -> Iterator:
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __contains__(self, item):
        return item in set(self.items)

    def as_set(self) -> frozenset:
        return frozenset(self.items)


# -- well-formedness --------------------------------------------------------


def _check_tree(t: Tree, alphabet: RankedAlphabet, m: int, where: str, out: list[Diagnostic]):
    if isinstance(t, Var):
        if t.index > m:
            out.append(Diagnostic("VariableOutOfRange", f"{where}: x{t.index} with only {m} parameters"))
        return
    if t.label not in alphabet:
        out.append(Diagnostic("UnknownSymbol", f"{where}: {t.label}"))
    elif alphabet.rank(t.label) != len(t.children):
        out.append(
            Diagnostic(
                "RankMismatch",
                f"{where}: {t.label} has rank {alphabet.rank(t.label)} but {len(t.children)} arguments",
            )
        )
    for c in t.children:
        _check_tree(c, alphabet, m, where, out)


def validate_grammar(G: Cftg) -> list[Diagnostic]:
    """All well-formedness problems of ``G``; empty means the grammar is sound."""
    out: list[Diagnostic] = []
    if G.start not in G.nonterminals:
        out.append(Diagnostic("StartNotNonterminal", f"start symbol {G.start} is not a nonterminal"))
    elif G.nonterminals[G.start] != 0:
        out.append(Diagnostic("StartRank", f"start symbol {G.start} has rank {G.nonterminals[G.start]}"))
    for i, p in enumerate(G.productions, 1):
        where = f"production {i} ({p.head()})"
        if p.lhs not in G.nonterminals:
            out.append(Diagnostic("UnknownLhs", f"{where}: {p.lhs} is not a nonterminal"))
        elif G.nonterminals[p.lhs] != p.rank:
            out.append(Diagnostic("RankMismatch", f"{where}: {p.lhs} has rank {G.nonterminals[p.lhs]}"))
        _check_tree(p.rhs, G.alphabet, p.rank, where, out)
    return out


def is_regular(G: Cftg) -> bool:
    return all(r == 0 for r in G.nonterminals.values())


def is_terminal_tree(t: Tree, G: Cftg) -> bool:
    """True iff ``t`` has no variables and no nonterminals."""
    if isinstance(t, Var) or t.label in G.nonterminals:
        return False
    return all(is_terminal_tree(c, G) for c in t.children)


# -- derivation steps -------------------------------------------------------


def _redexes(t: Tree, G: Cftg) -> tuple[bool, list[Address]]:
    """(t is terminal, addresses of IO-eligible nonterminal occurrences in preorder)."""
    found: list[Address] = []

    def go(u: Tree, addr: Address) -> bool:
        if isinstance(u, Var):
            return False
        terminal = True
        mark = len(found)
        for i, c in enumerate(u.children):
            terminal &= go(c, addr + (i,))
        if u.label in G.nonterminals:
            if terminal:
                found.insert(mark, addr)
            return False
        return terminal

    return go(t, ()), found


def _rewrite(G: Cftg, t: Tree, addr: Address) -> list[DerivationStep]:
    node = t
    for i in addr:
        node = node.children[i]
    steps = []
    for idx, p in G.productions_for(node.label):
        if p.rank != len(node.children):
            continue
        body = substitute(p.rhs, node.children)
        steps.append(DerivationStep(idx, addr, t, replace_at(t, addr, body)))
    return steps


def io_successors(G: Cftg, t: Tree) -> list[DerivationStep]:
    """Every inside-out step from ``t``: a nonterminal whose arguments are all terminal trees."""
    _, sites = _redexes(t, G)
    out: list[DerivationStep] = []
    for addr in sites:
        out.extend(_rewrite(G, t, addr))
    return out


def leftmost_successors(G: Cftg, t: Tree) -> list[DerivationStep]:
    """Steps rewriting only the leftmost nonterminal leaf (regular grammars)."""
    _, sites = _redexes(t, G)
    return _rewrite(G, t, sites[0]) if sites else []


# -- enumeration ------------------------------------------------------------

Successors = Callable[[Cftg, Tree], list]


def _search(
    G: Cftg,
    bounds: Bounds,
    successors: Successors,
    target: Optional[Tree] = None,
):
    start = Term(G.start)
    seen = {start}
    parent: dict[Tree, DerivationStep] = {}
    frontier = [start]
    results: set[Tree] = set()
    exhausted = False
    depth = 0
    if target == start:
        return results, exhausted, parent
    while frontier:
        if bounds.max_steps is not None and depth >= bounds.max_steps:
            exhausted = True
            break
        depth += 1
        nxt: list[Tree] = []
        for t in frontier:
            for step in successors(G, t):
                u = step.after
                if bounds.max_nodes is not None and u.size > bounds.max_nodes:
                    exhausted = True
                    continue
                if u in seen:
                    continue
                seen.add(u)
                if target is not None:
                    parent[u] = step
                    if u == target:
                        return results, exhausted, parent
                if is_terminal_tree(u, G):
                    results.add(u)
                else:
                    nxt.append(u)
        frontier = nxt
    return results, exhausted, parent


def enumerate_io(G: Cftg, bounds: Bounds = Bounds()) -> Enumeration:
    """Terminal trees derivable from the start symbol by IO steps within ``bounds``.

    Breadth-first over sentential forms, deduplicated. A tree counts if some
    derivation reaches it in at most ``max_steps`` steps with every sentential
    form along the way of at most ``max_nodes`` nodes.
    """
    results, exhausted, _ = _search(G, bounds, io_successors)
    return Enumeration(tuple(sorted(results, key=canonical_key)), exhausted)


def enumerate_regular(G: Cftg, bounds: Bounds = Bounds()) -> Enumeration:
    """Language of a regular grammar, generated by leftmost derivations.

    Derivation modes coincide for rank-0 nonterminals, so this agrees with
    :func:`enumerate_io` at equal bounds while visiting far fewer forms.
    """
    if not is_regular(G):
        raise NotRegular(f"nonterminals of positive rank: {[n for n, r in G.nonterminals.items() if r]}")
    results, exhausted, _ = _search(G, bounds, leftmost_successors)
    return Enumeration(tuple(sorted(results, key=canonical_key)), exhausted)


def yield_language(
    G: Cftg,
    bounds: Bounds = Bounds(),
    empty: Iterable[str] = (),
    *,
    unary: str = "prefix",
) -> Enumeration:
    """Yields of ``enumerate_io(G, bounds)``, deduplicated, ordered by (length, text)."""
    trees = enumerate_io(G, bounds)
    empty = frozenset(empty)
    words = {yield_of(t, empty, unary=unary) for t in trees}
    return Enumeration(tuple(sorted(words, key=lambda w: (len(w), w))), trees.exhausted)


def derivation_trace(G: Cftg, target: Tree, bounds: Bounds = Bounds()) -> list[DerivationStep]:
    """A shortest IO derivation ``S => ... => target``; raises :class:`NotFound`."""
    start = Term(G.start)
    if target == start:
        return []
    _, _, parent = _search(G, bounds, io_successors, target=target)
    if target not in parent:
        raise NotFound(f"{target} not derivable within {bounds}")
    steps = []
    u = target
    while u != start:
        step = parent[u]
        steps.append(step)
        u = step.before
    return steps[::-1]


# -- grammar files ----------------------------------------------------------


def _parse_symbols(body: str, lineno: int, col: int) -> dict[str, int]:
    out: dict[str, int] = {}
    for tok in body.split():
        name, sep, rank = tok.rpartition("/")
        if not sep or not name or not rank.isdigit():
            raise GrammarSyntaxError(f"expected name/rank, found {tok!r}", lineno, col + body.find(tok))
        if name in out:
            raise GrammarSyntaxError(f"duplicate symbol {name!r}", lineno, col + body.find(tok))
        out[name] = int(rank)
    return out


def _parse_head(text: str, lineno: int, col: int) -> tuple[str, int]:
    text = text.strip()
    if "(" not in text:
        return text, 0
    name, _, rest = text.partition("(")
    if not rest.endswith(")"):
        raise GrammarSyntaxError(f"malformed left-hand side {text!r}", lineno, col)
    params = [p.strip() for p in rest[:-1].split(",")]
    expected = [f"x{i}" for i in range(1, len(params) + 1)]
    if params != expected:
        raise GrammarSyntaxError(f"parameters must be {','.join(expected)}", lineno, col)
    return name.strip(), len(params)


def parse_grammar(text: str) -> Cftg:
    """Read the line-based grammar format.

    ::

        # comment
        terminals: cat/2 a/0 b/0 c/0
        nonterminals: S/0 F/3
        start: S
        S -> F(a,b,c)
        F(x1,x2,x3) -> F(cat(x1,a),cat(x2,b),cat(x3,c))
                     | cat(cat(x1,x2),x3)

    Right-hand sides are read without rank checks; call
    :func:`validate_grammar` for diagnostics.
    """
    terminals: Optional[dict] = None
    nonterminals: Optional[dict] = None
    sorts: Optional[dict] = None
    start: Optional[str] = None
    prods: list[Production] = []
    current: Optional[tuple[str, int]] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        key, sep, body = stripped.partition(":")
        if sep and key in ("terminals", "nonterminals", "start", "sorts") and "->" not in stripped:
            col = indent + len(key) + 2
            if key == "terminals":
                terminals = _parse_symbols(body, lineno, col)
            elif key == "nonterminals":
                nonterminals = _parse_symbols(body, lineno, col)
            elif key == "sorts":
                sorts = {}
                for tok in body.split():
                    n, _, s = tok.rpartition(":")
                    if not n or not s.isdigit():
                        raise GrammarSyntaxError(f"expected name:sort, found {tok!r}", lineno, col)
                    sorts[n] = int(s)
            else:
                start = body.strip()
            continue
        if stripped.startswith("|"):
            if current is None:
                raise GrammarSyntaxError("continuation without a production", lineno, indent + 1)
            alts_text, offset = stripped[1:], indent + 2
        else:
            lhs, arrow, rest = stripped.partition("->")
            if not arrow:
                raise GrammarSyntaxError("expected 'lhs -> rhs'", lineno, indent + 1)
            current = _parse_head(lhs, lineno, indent + 1)
            alts_text, offset = rest, indent + len(lhs) + 3
        pos = 0
        for alt in alts_text.split("|"):
            if not alt.strip():
                raise GrammarSyntaxError("empty alternative", lineno, offset + pos)
            lead = len(alt) - len(alt.lstrip())
            try:
                rhs = parse_term(alt.strip(), None, None, line=lineno, column=offset + pos + lead)
            except TreeliftError as exc:
                if isinstance(exc, GrammarSyntaxError):
                    raise
                line, col = getattr(exc, "line", lineno), getattr(exc, "column", offset + pos)
                raise GrammarSyntaxError(str(exc).split(": ", 1)[-1], line, col) from exc
            prods.append(Production(current[0], current[1], rhs))
            pos += len(alt) + 1
    if terminals is None or nonterminals is None:
        raise GrammarSyntaxError("missing terminals: or nonterminals: line", 1, 1)
    if start is None:
        raise GrammarSyntaxError("missing start: line", 1, 1)
    clash = set(terminals) & set(nonterminals)
    if clash:
        raise GrammarSyntaxError(f"symbols both terminal and nonterminal: {sorted(clash)}", 1, 1)
    return Cftg(RankedAlphabet(terminals, nonterminals), start, tuple(prods), sorts)


def load_grammar(path) -> Cftg:
    return parse_grammar(Path(path).read_text(encoding="utf-8"))


def format_grammar(G: Cftg) -> str:
    lines = [
        "terminals: " + " ".join(f"{n}/{r}" for n, r in G.terminals.items()),
        "nonterminals: " + " ".join(f"{n}/{r}" for n, r in G.nonterminals.items()),
    ]
    if G.sorts:
        lines.append("sorts: " + " ".join(f"{n}:{s}" for n, s in G.sorts.items()))
    lines.append(f"start: {G.start}")
    grouped: dict[tuple[str, int], list[Production]] = {}
    for p in G.productions:
        grouped.setdefault((p.lhs, p.rank), []).append(p)
    for prods in grouped.values():
        lines.append(f"{prods[0].head()} -> " + " | ".join(str(p.rhs) for p in prods))
    return "\n".join(lines) + "\n"
