"""Context-free tree grammars, their lifting to regular grammars over derived
alphabets, and a brute-force MSO toolkit for small models."""
from .alphabets import (
    DerivedAlphabet,
    Kind,
    Lifted,
    Projection,
    RankedAlphabet,
    RankedSymbol,
    Substitution,
    derived_member,
    derived_sort,
    make_alphabet,
)
from .errors import TreeliftError
from .grammars import (
    Bounds,
    Cftg,
    Enumeration,
    Production,
    derivation_trace,
    enumerate_io,
    enumerate_regular,
    format_grammar,
    is_regular,
    load_grammar,
    parse_grammar,
    validate_grammar,
    yield_language,
)
from .lifting import (
    DerivedNonterminal,
    DerivedTerm,
    HomFamily,
    apply_derived_hom,
    beta,
    check_diagram,
    from_ranked,
    hom_apply,
    lift_grammar,
    lift_term,
    parse_derived,
    production_hom,
    to_ranked,
)
from .mso import (
    Interpretation,
    check_definability_equiv,
    eval_formula,
    models_of,
    parse_formula,
    parse_interpretation,
    transduce,
)
from .terms import (
    Structure,
    Term,
    Var,
    parse_term,
    string_to_structure,
    substitute,
    term_to_structure,
    yield_of,
)

__version__ = "0.1.0"

_SUBMODULES = {"alphabets", "cli", "errors", "grammars", "lifting", "mso", "sampling", "terms"}
__all__ = [name for name in dir() if not name.startswith("_") and name not in _SUBMODULES]
