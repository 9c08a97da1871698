"""Random trees and derived terms for property checks and the lemma-check command."""
from __future__ import annotations

import random
from typing import Optional

from .alphabets import Lifted, Projection, RankedAlphabet, Substitution
from .errors import SortError
from .lifting import DerivedNonterminal, DerivedTerm
from .terms import Term, Tree, Var

__all__ = ["random_term", "random_derived_term"]


def random_term(
    alphabet: RankedAlphabet,
    k: int,
    max_nodes: int,
    rng: random.Random,
    *,
    nonterminals: bool = True,
) -> Tree:
    """A random tree in T(Sigma u F, X_k) with at most ``max_nodes`` nodes (roughly).

    Leaves are drawn from the constants and x1..xk. The node budget is split
    among children, so the result never exceeds ``max_nodes`` unless the
    alphabet forces a larger minimum.
    """
    symbols = dict(alphabet.terminals)
    if nonterminals:
        symbols.update(alphabet.nonterminals)
    leaves: list = [Term(n) for n, r in symbols.items() if r == 0] + [Var(i) for i in range(1, k + 1)]
    inner = [(n, r) for n, r in symbols.items() if r > 0]
    if not leaves:
        raise SortError("no constants and no variables: no finite trees")

    def go(budget: int) -> Tree:
        fitting = [(n, r) for n, r in inner if r < budget]
        if budget <= 1 or not fitting or rng.random() < 0.3:
            return rng.choice(leaves)
        name, r = rng.choice(fitting)
        rest = budget - 1
        shares = [rest // r] * r
        for i in range(rest % r):
            shares[i] += 1
        return Term(name, [go(s) for s in shares])

    return go(max(1, max_nodes))


def random_derived_term(
    alphabet: RankedAlphabet,
    sort: int,
    max_depth: int,
    rng: random.Random,
    *,
    nonterminals: bool = True,
    max_head_sort: Optional[int] = None,
) -> DerivedTerm:
    """A random well-sorted derived term of the given sort.

    Leaves of sort s are lifted symbols of rank s, projections pi_i^s and
    (optionally) nonterminals of rank s. Inner nodes are S{n,s} with n drawn
    from the ranks present in the alphabet, capped at ``max_head_sort``.
    """
    ranks = dict(alphabet.terminals)
    nts = dict(alphabet.nonterminals) if nonterminals else {}
    cap = max_head_sort if max_head_sort is not None else max([*ranks.values(), *nts.values(), 0])
    head_sorts = sorted({r for r in [*ranks.values(), *nts.values()] if r <= cap} | {0})

    def leaves(s: int) -> list:
        out: list = [Lifted(n, s) for n, r in ranks.items() if r == s]
        out += [Projection(i, s) for i in range(1, s + 1)]
        out += [DerivedNonterminal(n, s) for n, r in nts.items() if r == s]
        return out

    def go(s: int, depth: int) -> DerivedTerm:
        options = leaves(s)
        if options and (depth <= 0 or rng.random() < 0.35):
            return DerivedTerm(rng.choice(options))
        if depth <= -3:
            raise SortError(f"cannot close a derived term of sort {s}")
        n = rng.choice(head_sorts)
        head = go(n, depth - 1)
        return DerivedTerm(Substitution(n, s), [head] + [go(s, depth - 1) for _ in range(n)])

    return go(sort, max_depth)
