"""Exception hierarchy. The class name doubles as the error name printed by the CLI."""


class TreeliftError(Exception):
    """Base class for every domain error raised by the package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class DuplicateName(TreeliftError):
    pass


class EmptyName(TreeliftError):
    pass


class UnknownSymbol(TreeliftError):
    pass


class RankMismatch(TreeliftError):
    pass


class VariableOutOfRange(TreeliftError):
    pass


class ArityMismatch(TreeliftError):
    pass


class NonTerminalLeaf(TreeliftError):
    pass


class UnknownLetter(TreeliftError):
    pass


class NotRegular(TreeliftError):
    pass


class NotFound(TreeliftError):
    pass


class SortError(TreeliftError):
    pass


class UnevaluatedNonterminal(TreeliftError):
    pass


class ParseError(TreeliftError):
    """Syntax error in term, grammar, formula or structure text."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class TermSyntaxError(ParseError):
    pass


class GrammarSyntaxError(ParseError):
    pass


class FormulaSyntaxError(ParseError):
    @property
    def code(self) -> str:
        return "SyntaxError"


class UnknownRelation(TreeliftError):
    pass


class UnboundVariable(TreeliftError):
    pass


class BoundTooLarge(TreeliftError):
    pass


class DomainSentenceFails(TreeliftError):
    pass


class EmptyDomain(TreeliftError):
    pass


class NotATreeDomain(TreeliftError):
    pass


class LabelClash(TreeliftError):
    pass
