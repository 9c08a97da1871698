"""Command-line front end: ``treelift <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (its name goes to stderr)
and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from .alphabets import RankedAlphabet
from .errors import TreeliftError
from .grammars import (
    Bounds,
    enumerate_io,
    enumerate_regular,
    format_grammar,
    load_grammar,
    validate_grammar,
)
from .lifting import beta, check_diagram, from_ranked, lift_grammar, lift_term, parse_derived
from .mso import eval_formula, models_of, parse_formula, parse_interpretation, transduce
from .sampling import random_derived_term, random_term
from .terms import (
    format_address,
    parse_structure,
    parse_term,
    string_to_structure,
    term_to_structure,
    tokenize_word,
    yield_of,
)

EMPTY_WORD = "ε"


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _grammar(path: str):
    _read(path)
    return load_grammar(path)


def _word(w: str) -> str:
    return w if w else EMPTY_WORD


def _ranked_list(text: str) -> dict[str, int]:
    out = {}
    for tok in filter(None, (t.strip() for t in text.replace(",", " ").split())):
        name, sep, rank = tok.rpartition("/")
        if not sep or not rank.isdigit():
            raise UsageError(f"expected name/rank in --alphabet, found {tok!r}")
        out[name] = int(rank)
    return out


# -- subcommands ------------------------------------------------------------


def cmd_validate(args, out) -> int:
    problems = validate_grammar(_grammar(args.grammar))
    for d in problems:
        print(d, file=out)
    if not problems:
        print("ok", file=out)
    return 1 if problems else 0


def cmd_enumerate(args, out) -> int:
    G = _grammar(args.grammar)
    bounds = Bounds(args.max_steps, args.max_nodes)
    result = enumerate_io(G, bounds) if args.mode == "io" else enumerate_regular(G, bounds)
    if args.yield_:
        empty = frozenset(filter(None, args.empty.split(","))) if args.empty else frozenset()
        words = {yield_of(t, empty) for t in result}
        for w in sorted(words, key=lambda w: (len(w), w)):
            print(_word(w), file=out)
    else:
        for t in result:
            print(t, file=out)
    if result.exhausted:
        print("# bounds exhausted: the list may be incomplete", file=sys.stderr)
    return 0


def cmd_lift(args, out) -> int:
    print(format_grammar(lift_grammar(_grammar(args.grammar))), end="", file=out)
    return 0


def cmd_beta(args, out) -> int:
    alphabet = _grammar(args.grammar).alphabet if args.grammar else None
    d = parse_derived(_read(args.file).strip(), alphabet)
    print(beta(d, nonterminals=args.extended), file=out)
    return 0


def cmd_lift_term(args, out) -> int:
    alphabet = _grammar(args.grammar).alphabet if args.grammar else None
    t = parse_term(args.term, alphabet, args.k)
    print(lift_term(t, args.k, alphabet), file=out)
    return 0


def cmd_trace(args, out) -> int:
    from .grammars import derivation_trace

    G = _grammar(args.grammar)
    target = parse_term(args.target, G.alphabet, 0)
    steps = derivation_trace(G, target, Bounds(args.max_steps, args.max_nodes))
    print(f"0  {G.start}", file=out)
    for i, s in enumerate(steps, 1):
        p = G.productions[s.production]
        print(f"{i}  {s.after}  [{p} at {format_address(s.address)}]", file=out)
    return 0


def lemma_check(G, samples: int, seed: int, max_steps: int = 5) -> dict[str, tuple[int, int]]:
    """Run the three lifting suites; returns ``{suite: (passed, total)}``."""
    rng = random.Random(seed)
    ok = 0
    for _ in range(samples):
        k = rng.randint(0, 4)
        t = random_term(G.alphabet, k, 30, rng)
        ok += beta(lift_term(t, k, G.alphabet), nonterminals=True) == t
    identity = (ok, samples)

    ok = 0
    top = max(G.alphabet.max_rank, 1)
    for _ in range(samples):
        p = rng.choice(G.productions)
        d = random_derived_term(G.alphabet, rng.randint(0, top), 4, rng)
        ok += check_diagram(p, d, G.alphabet)
    diagram = (ok, samples)

    bounds = Bounds(max_steps, None)
    L = lift_grammar(G)
    lifted = {
        beta(from_ranked(d, L.sorts, G.nonterminals)) for d in enumerate_regular(L, bounds)
    }
    direct = enumerate_io(G, bounds).as_set()
    union = lifted | direct
    language = (len(lifted & direct), len(union))
    return {"identity": identity, "diagram": diagram, "language": language}


def cmd_lemma_check(args, out) -> int:
    G = _grammar(args.grammar)
    res = lemma_check(G, args.samples, args.seed, args.max_steps)
    parts = []
    for name, (ok, total) in res.items():
        parts.append(f"{name}: {ok}/{total} {'pass' if ok == total else 'FAIL'}")
    print("; ".join(parts), file=out)
    return 0 if all(ok == total for ok, total in res.values()) else 1


def cmd_mso_eval(args, out) -> int:
    given = [args.word is not None, args.tree is not None]
    if sum(given) > 1:
        raise UsageError("give at most one of --word and --tree")
    if any(given):
        if len(args.files) != 1:
            raise UsageError("with --word or --tree give only the formula file")
        formula_file = args.files[0]
        if args.word is not None:
            M = string_to_structure(args.word, tokenize_word(args.word))
        else:
            M = term_to_structure(parse_term(args.tree))
    else:
        if len(args.files) != 2:
            raise UsageError("expected a structure file and a formula file")
        M = parse_structure(_read(args.files[0]))
        formula_file = args.files[1]
    phi = parse_formula(_read(formula_file))
    print("true" if eval_formula(M, phi, guard=not args.no_guard) else "false", file=out)
    return 0


def cmd_mso_models(args, out) -> int:
    phi = parse_formula(_read(args.formula))
    if args.kind == "word":
        letters = [a for a in args.alphabet.replace(",", " ").split() if a]
        for w in models_of(phi, letters, "word", args.bound, guard=not args.no_guard):
            print(_word(w), file=out)
    else:
        ranks = _ranked_list(args.alphabet)
        for t in models_of(phi, RankedAlphabet(ranks, {}), "tree", args.bound, guard=not args.no_guard):
            print(t, file=out)
    return 0


def cmd_transduce(args, out) -> int:
    I = parse_interpretation(_read(args.interpretation))
    print(transduce(I, parse_term(args.term), guard=not args.no_guard).term, file=out)
    return 0


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="treelift", description="Context-free tree grammar workbench.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a grammar file")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("enumerate", help="list the bounded tree language (or its yields)")
    p.add_argument("grammar")
    p.add_argument("--mode", choices=["io", "regular"], default="io")
    p.add_argument("--max-steps", type=int, default=6)
    p.add_argument("--max-nodes", type=int, default=60)
    p.add_argument("--yield", dest="yield_", action="store_true", help="print yields instead of trees")
    p.add_argument("--empty", default="", help="comma-separated constants that stand for the empty word")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("lift", help="print the derived regular grammar")
    p.add_argument("grammar")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("beta", help="evaluate a derived term read from a file")
    p.add_argument("file")
    p.add_argument("--grammar", help="grammar supplying symbol ranks")
    p.add_argument("--extended", action="store_true", help="map nonterminal leaves F:m to F(x1..xm)")
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("lift-term", help="LIFT_k of a term")
    p.add_argument("term")
    p.add_argument("-k", type=int, default=0)
    p.add_argument("--grammar", help="grammar supplying symbol ranks")
    p.set_defaults(func=cmd_lift_term)

    p = sub.add_parser("trace", help="shortest IO derivation of a target tree")
    p.add_argument("grammar")
    p.add_argument("target")
    p.add_argument("--max-steps", type=int, default=6)
    p.add_argument("--max-nodes", type=int, default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("lemma-check", help="identity, diagram and language-correspondence suites")
    p.add_argument("grammar")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=5)
    p.set_defaults(func=cmd_lemma_check)

    mso = sub.add_parser("mso", help="MSO evaluation and model listing")
    msub = mso.add_subparsers(dest="mso_command", required=True)
    p = msub.add_parser("eval", help="print true or false")
    p.add_argument("files", nargs="+", metavar="FILE", help="[structure-file] formula-file")
    p.add_argument("--word")
    p.add_argument("--tree")
    p.add_argument("--no-guard", action="store_true")
    p.set_defaults(func=cmd_mso_eval)
    p = msub.add_parser("models", help="list the models up to a size bound")
    p.add_argument("formula")
    p.add_argument("--kind", choices=["word", "tree"], default="word")
    p.add_argument("--alphabet", required=True, help="letters (words) or name/rank pairs (trees)")
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--no-guard", action="store_true")
    p.set_defaults(func=cmd_mso_models)

    p = sub.add_parser("transduce", help="apply an MSO interpretation to a term")
    p.add_argument("interpretation")
    p.add_argument("term")
    p.add_argument("--no-guard", action="store_true")
    p.set_defaults(func=cmd_transduce)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except TreeliftError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
