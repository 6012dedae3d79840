"""Parsing stage: tagged sentences in, inline syntax trees out."""

from __future__ import annotations

import copy
from typing import List, Optional, Sequence, Tuple

from .. import features as F
from ..annotation import AnnotatedDocument, Element, TextSpan, text_content
from ..postag import token_readings
from ..structure import SENTENCE, iter_units
from .chart import UNKNOWN, Edge, ParseOptions, ParseResult, TokenInput, parse
from .grammar import Grammar

# token attributes that describe the unparsed lattice and are dropped in trees
_LATTICE_ATTRS = ("ALT", "MORPH")

COMPLETE = "complete"
PARTIAL = "partial"


def sentence_tokens(sentence: Element) -> Tuple[List[TokenInput], List[Element], List[str], str]:
    """Tokens of a sentence, their elements, whitespace before each, trailing space."""
    tokens: List[TokenInput] = []
    elems: List[Element] = []
    spaces: List[str] = []
    pending = ""
    for kind, value in iter_units(sentence.children):
        if kind == "ws":
            pending += value
            continue
        elem = value if kind == "elem" else Element(UNKNOWN, [], [TextSpan(value)])
        tokens.append(TokenInput(text_content(elem), tuple(token_readings(elem)), elem.get("SRC")))
        elems.append(elem)
        spaces.append(pending)
        pending = ""
    return tokens, elems, spaces, pending


def _dims(edge: Edge, dims: Sequence[str]) -> List[Tuple[str, str]]:
    proj = F.project(edge.final)
    return [(d, F.format_dimension(proj[d], d)) for d in dims]


def edge_to_element(edge: Edge, grammar: Grammar, elems: Sequence[Element],
                    spaces: Sequence[str]) -> Element:
    if edge.is_token:
        source = elems[edge.token]
        if not source.is_leaf:
            return copy.deepcopy(source)
        attrs = [(k, v) for k, v in source.attrs if k not in _LATTICE_ATTRS]
        if edge.assumed:
            attrs.append(("AS", edge.assumed))
        keys = {k for k, _ in attrs}
        attrs += [(k, v) for k, v in _dims(edge, edge.display) if k not in keys]
        return Element(edge.category, attrs, copy.deepcopy(source.children))
    rule = grammar.rule(edge.rule)
    attrs = []
    for item in rule.output:
        if item[0] == "const":
            attrs.append((item[1], item[2]))
        elif item[0] == "rule":
            attrs.append(("RULE", rule.id))
        else:
            attrs += _dims(edge, (item[1],))
    keys = {k for k, _ in attrs}
    attrs += [(k, v) for k, v in _dims(edge, edge.display) if k not in keys]
    children = []
    for index, d in enumerate(edge.daughters):
        if index and spaces[d.start]:
            children.append(TextSpan(spaces[d.start]))
        children.append(edge_to_element(d, grammar, elems, spaces))
    return Element(edge.category, attrs, children)


def parse_sentence(sentence: Element, grammar: Grammar,
                   opts: Optional[ParseOptions] = None) -> Tuple[Element, ParseResult]:
    tokens, elems, spaces, trailing = sentence_tokens(sentence)
    result = parse(tokens, grammar, opts)
    out = Element(sentence.name, list(sentence.attrs))
    if not tokens:
        out.children = copy.deepcopy(sentence.children)
        return out, result
    if spaces[0]:
        out.children.append(TextSpan(spaces[0]))
    if result.complete:
        fragments = [result.complete[0]]
        out.set("PARSE", COMPLETE)
    else:
        fragments = result.partial_cover[0] if result.partial_cover else []
        out.set("PARSE", PARTIAL)
    for index, frag in enumerate(fragments):
        if index and spaces[frag.start]:
            out.children.append(TextSpan(spaces[frag.start]))
        if frag.is_token:
            out.children.append(copy.deepcopy(elems[frag.token]))
        else:
            out.children.append(edge_to_element(frag, grammar, elems, spaces))
    if trailing:
        out.children.append(TextSpan(trailing))
    return out, result


def parse_document(doc: AnnotatedDocument, grammar: Grammar,
                   opts: Optional[ParseOptions] = None,
                   results: Optional[List[ParseResult]] = None) -> AnnotatedDocument:
    """Replace each sentence's tokens by its preferred parse or partial cover.

    ``results``, when given, receives the raw parse result of every sentence.
    """
    opts = opts or ParseOptions(max_parses=64, max_covers=1)
    root = copy.deepcopy(doc.root)
    sentences = [i for i, c in enumerate(root.children)
                 if isinstance(c, Element) and c.name == SENTENCE]
    if not sentences:
        root, result = parse_sentence(root, grammar, opts)
        if results is not None:
            results.append(result)
        return AnnotatedDocument(root)
    for i in sentences:
        root.children[i], result = parse_sentence(root.children[i], grammar, opts)
        if results is not None:
            results.append(result)
    return AnnotatedDocument(root)
