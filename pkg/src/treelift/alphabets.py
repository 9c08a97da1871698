"""Ranked alphabets and the schematic derived alphabet D(Sigma).

Sorts of derived symbols are natural numbers: the sort ``n`` stands for the
type of an ``n``-ary operation over the single base sort.
"""
from __future__ import annotations

import enum
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

from .errors import DuplicateName, EmptyName, UnknownSymbol

__all__ = [
    "Kind",
    "RankedSymbol",
    "RankedAlphabet",
    "make_alphabet",
    "Lifted",
    "Projection",
    "Substitution",
    "DerivedSymbol",
    "DerivedAlphabet",
    "derived_member",
    "derived_sort",
    "substitution_name",
    "projection_name",
    "VARIABLE_RE",
]

VARIABLE_RE = re.compile(r"x([1-9][0-9]*)\Z")


class Kind(enum.Enum):
    TERMINAL = "T"
    NONTERMINAL = "N"

    @classmethod
    def coerce(cls, value: Union["Kind", str]) -> "Kind":
        if isinstance(value, Kind):
            return value
        v = str(value).strip().upper()
        if v in ("T", "TERMINAL"):
            return cls.TERMINAL
        if v in ("N", "NONTERMINAL"):
            return cls.NONTERMINAL
        raise ValueError(f"unknown symbol kind {value!r}")


@dataclass(frozen=True, order=True)
class RankedSymbol:
    name: str
    rank: int

    def __post_init__(self):
        if not self.name:
            raise EmptyName("symbol name must be nonempty")
        if self.rank < 0:
            raise ValueError(f"negative rank for {self.name!r}")

    def __str__(self):
        return f"{self.name}/{self.rank}"


@dataclass(frozen=True)
class RankedAlphabet:
    """Terminals and nonterminals, each a name -> rank mapping.

    Use :func:`make_alphabet` to build one with validation.
    """

    terminals: Mapping[str, int] = field(default_factory=dict)
    nonterminals: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        # freeze the mappings so the alphabet is a value
        object.__setattr__(self, "terminals", dict(self.terminals))
        object.__setattr__(self, "nonterminals", dict(self.nonterminals))
        clash = set(self.terminals) & set(self.nonterminals)
        if clash:
            raise DuplicateName(f"names both terminal and nonterminal: {sorted(clash)}")

    def __contains__(self, name: object) -> bool:
        return name in self.terminals or name in self.nonterminals

    def __iter__(self) -> Iterator[RankedSymbol]:
        for name, rank in self.terminals.items():
            yield RankedSymbol(name, rank)
        for name, rank in self.nonterminals.items():
            yield RankedSymbol(name, rank)

    def __len__(self):
        return len(self.terminals) + len(self.nonterminals)

    def __hash__(self):
        return hash((tuple(sorted(self.terminals.items())), tuple(sorted(self.nonterminals.items()))))

    def rank(self, name: str) -> int:
        if name in self.terminals:
            return self.terminals[name]
        if name in self.nonterminals:
            return self.nonterminals[name]
        raise UnknownSymbol(name)

    def kind(self, name: str) -> Kind:
        if name in self.terminals:
            return Kind.TERMINAL
        if name in self.nonterminals:
            return Kind.NONTERMINAL
        raise UnknownSymbol(name)

    def is_terminal(self, name: str) -> bool:
        return name in self.terminals

    def is_nonterminal(self, name: str) -> bool:
        return name in self.nonterminals

    @property
    def max_rank(self) -> int:
        return max((s.rank for s in self), default=0)

    def terminal_alphabet(self) -> "RankedAlphabet":
        return RankedAlphabet(self.terminals, {})

    def union(self, other: "RankedAlphabet") -> "RankedAlphabet":
        terms = dict(self.terminals)
        nts = dict(self.nonterminals)
        for name, rank in other.terminals.items():
            if terms.get(name, rank) != rank:
                raise DuplicateName(f"{name} with ranks {terms[name]} and {rank}")
            terms[name] = rank
        for name, rank in other.nonterminals.items():
            if nts.get(name, rank) != rank:
                raise DuplicateName(f"{name} with ranks {nts[name]} and {rank}")
            nts[name] = rank
        return RankedAlphabet(terms, nts)

    def __str__(self):
        ts = " ".join(f"{n}/{r}" for n, r in self.terminals.items())
        ns = " ".join(f"{n}/{r}" for n, r in self.nonterminals.items())
        return f"terminals: {ts}\nnonterminals: {ns}"


def make_alphabet(entries: Iterable[tuple]) -> RankedAlphabet:
    """Build a validated alphabet from ``(name, rank, kind)`` triples.

    ``kind`` is ``"T"``/``"N"`` or a :class:`Kind`. Raises :class:`DuplicateName`
    when a name occurs twice (whatever the rank) and :class:`EmptyName` for "".
    """
    entries = list(entries)
    if not entries:
        raise ValueError("alphabet needs at least one entry")
    terminals: dict[str, int] = {}
    nonterminals: dict[str, int] = {}
    for name, rank, kind in entries:
        if not name:
            raise EmptyName("symbol name must be nonempty")
        if name in terminals or name in nonterminals:
            raise DuplicateName(name)
        if VARIABLE_RE.match(name):
            raise DuplicateName(f"{name} collides with variable syntax")
        sym = RankedSymbol(name, int(rank))
        if Kind.coerce(kind) is Kind.TERMINAL:
            terminals[sym.name] = sym.rank
        else:
            nonterminals[sym.name] = sym.rank
    if terminals and not any(r == 0 for r in terminals.values()):
        warnings.warn("no terminal constant: the terminal tree language is empty", stacklevel=2)
    return RankedAlphabet(terminals, nonterminals)


# -- derived alphabet -------------------------------------------------------


@dataclass(frozen=True, order=True)
class Lifted:
    """A base symbol of rank ``n`` demoted to a constant of sort ``n``."""

    base: str
    n: int


@dataclass(frozen=True, order=True)
class Projection:
    """pi_i^n, a constant of sort n (1-based index)."""

    i: int
    n: int


@dataclass(frozen=True, order=True)
class Substitution:
    """S_{n,k}: a head of sort n followed by n arguments of sort k; result sort k."""

    n: int
    k: int

    @property
    def arity(self) -> int:
        return self.n + 1


DerivedSymbol = Union[Lifted, Projection, Substitution]


def substitution_name(n: int, k: int) -> str:
    return f"S{{{n},{k}}}"


def projection_name(i: int, n: int) -> str:
    return f"pi{{{i},{n}}}"


@dataclass(frozen=True)
class DerivedAlphabet:
    """D(base), never materialised: membership is decided by :func:`derived_member`."""

    base: RankedAlphabet

    def __contains__(self, sym: object) -> bool:
        return derived_member(self, sym)


def derived_member(D: DerivedAlphabet, sym: object) -> bool:
    if isinstance(sym, Lifted):
        return sym.base in D.base and D.base.rank(sym.base) == sym.n
    if isinstance(sym, Projection):
        return 1 <= sym.i <= sym.n
    if isinstance(sym, Substitution):
        return sym.n >= 0 and sym.k >= 0
    return False


def derived_sort(sym: DerivedSymbol) -> tuple[tuple[int, ...], int]:
    """``(argument sorts, result sort)`` of a derived symbol."""
    if isinstance(sym, (Lifted, Projection)):
        return (), sym.n
    if isinstance(sym, Substitution):
        return (sym.n,) + (sym.k,) * sym.n, sym.k
    raise TypeError(f"not a derived symbol: {sym!r}")
