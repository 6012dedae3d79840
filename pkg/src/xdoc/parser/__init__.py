"""Chart parser with feature agreement, partial covers and lexicon learning."""

from ..features import unify
from .chart import (
    Chart,
    Edge,
    LexiconCandidate,
    ParseOptions,
    ParseResult,
    TokenInput,
    complete_parses,
    derive_lexicon_updates,
    parse,
    partial_cover,
)
from .document import parse_document, parse_sentence
from .grammar import (
    Constituent,
    DuplicateRuleId,
    Grammar,
    GrammarFormatError,
    GrammarModule,
    GrammarRule,
    default_grammar,
    load_grammar,
    parse_module,
    parse_rule,
)

__all__ = [
    "Chart", "Constituent", "DuplicateRuleId", "Edge", "Grammar", "GrammarFormatError",
    "GrammarModule", "GrammarRule", "LexiconCandidate", "ParseOptions", "ParseResult",
    "TokenInput", "complete_parses", "default_grammar", "derive_lexicon_updates",
    "load_grammar", "parse", "parse_document", "parse_module", "parse_rule",
    "parse_sentence", "partial_cover", "unify",
]
