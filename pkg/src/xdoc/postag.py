"""Part-of-speech tagging: lexicon first, string heuristics second, XXX last.

The tagger never disambiguates.  A token with several readings keeps all of
them: the element name is the first class and ``ALT`` lists the others.
Agreement features travel in a ``MORPH`` attribute (``POS:triples;...``,
classes with fully open features omitted) so the parser needs no lexicon.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from . import features as F
from .annotation import AnnotatedDocument, Element, TextSpan, iter_leaves
from .features import ALL, TripleSet
from .morph import Lexicon, MorphAnalysis, POS_CLASSES, analyze
from .structure import SENTENCE, _Children, iter_units

UNKNOWN = "XXX"

# order in which several readings of one token are listed
CLASS_ORDER = ("DETD", "DETI", "PRP", "N", "V", "ADJ", "ADV", "KONJ", "PERSPRON",
               "RELPRON", "POSSPRON", "DEMPRON", "PART", "NR")


class HeuristicFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"heuristics line {line}: {reason}")


@dataclass(frozen=True)
class TokenContext:
    text: str
    index: int
    prev: Optional[str]
    next: Optional[str]

    @property
    def initial(self) -> bool:
        return self.index == 0


@dataclass
class Heuristic:
    name: str
    predicate: Callable[[TokenContext], bool]
    pos: str
    features: Union[TripleSet, Sequence[Tuple[str, TripleSet]]] = ALL
    source: str = ""

    def applies(self, ctx: TokenContext) -> bool:
        return self.predicate(ctx)

    def features_for(self, token: str) -> TripleSet:
        if isinstance(self.features, frozenset):
            return self.features
        for suffix, ts in sorted(self.features, key=lambda p: -len(p[0])):
            if token.endswith(suffix):
                return ts
        return ALL


# -- predicate language -------------------------------------------------------------
#
#   clause ('&' clause)*     clause := ['!'] test
#   cap | lower | initial | digits | suffix:a|b | prefix:a|b
#   minlen:N | regex:RE | prev:POS|POS | next:POS|POS


def _clause(text: str) -> Callable[[TokenContext], bool]:
    negate = text.startswith("!")
    if negate:
        text = text[1:].strip()
    name, _, arg = text.partition(":")
    options = arg.split("|") if arg else []
    if name == "cap":
        test = lambda c: c.text[:1].isupper()
    elif name == "lower":
        test = lambda c: c.text[:1].islower()
    elif name == "initial":
        test = lambda c: c.initial
    elif name == "digits":
        test = lambda c: c.text.isdigit()
    elif name == "suffix" and options:
        test = lambda c: any(c.text.endswith(s) and len(c.text) > len(s) for s in options)
    elif name == "prefix" and options:
        test = lambda c: any(c.text.startswith(s) for s in options)
    elif name == "minlen" and arg.isdigit():
        n = int(arg)
        test = lambda c: len(c.text) >= n
    elif name == "regex" and arg:
        rx = re.compile(arg)
        test = lambda c: rx.fullmatch(c.text) is not None
    elif name == "prev" and options:
        test = lambda c: c.prev in options
    elif name == "next" and options:
        test = lambda c: c.next in options
    else:
        raise ValueError(f"unknown predicate clause {text!r}")
    return (lambda c: not test(c)) if negate else test


def compile_predicate(text: str) -> Callable[[TokenContext], bool]:
    clauses = [_clause(part.strip()) for part in text.split("&") if part.strip()]
    if not clauses:
        raise ValueError("empty predicate")
    return lambda c: all(test(c) for test in clauses)


def _parse_heuristic_features(text: str):
    text = text.strip()
    if not text.startswith("-"):
        return F.parse_triples(text)
    pairs = []
    for item in text.split():
        suffix, sep, feats = item[1:].partition(":")
        if not sep:
            raise ValueError(f"bad suffix feature item {item!r}")
        pairs.append((suffix, F.parse_triples(feats)))
    return tuple(pairs)


def load_heuristics(paths) -> List[Heuristic]:
    """Read ``NAME<TAB>predicate<TAB>POS<TAB>features`` lines from one or more files."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    result: List[Heuristic] = []
    names = set()
    for path in paths:
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise HeuristicFormatError(lineno, "expected NAME, predicate, POS, features")
            name, pred, pos, feats = (c.strip() for c in cols)
            if name in names:
                raise HeuristicFormatError(lineno, f"duplicate heuristic {name!r}")
            if pos not in POS_CLASSES:
                raise HeuristicFormatError(lineno, f"unknown POS {pos!r}")
            try:
                heuristic = Heuristic(name, compile_predicate(pred), pos,
                                      _parse_heuristic_features(feats), pred)
            except (ValueError, re.error) as exc:
                raise HeuristicFormatError(lineno, str(exc)) from None
            names.add(name)
            result.append(heuristic)
    return result


def default_heuristics() -> List[Heuristic]:
    from .resources import resource_path

    return load_heuristics(resource_path("seed.heur"))


# -- MORPH attribute -----------------------------------------------------------------


def format_morph(readings: Sequence[Tuple[str, TripleSet]]) -> str:
    return ";".join(f"{pos}:{F.format_triples(ts)}" for pos, ts in readings if ts != ALL)


def parse_morph(text: Optional[str]) -> Dict[str, TripleSet]:
    result: Dict[str, TripleSet] = {}
    if not text:
        return result
    for item in text.split(";"):
        pos, _, feats = item.partition(":")
        result[pos] = F.parse_triples(feats)
    return result


def token_readings(elem: Element) -> List[Tuple[str, TripleSet]]:
    """``(class, triples)`` readings encoded on a tagged token element."""
    morph = parse_morph(elem.get("MORPH"))
    classes = [elem.name]
    alt = elem.get("ALT")
    if alt:
        classes += alt.split(",")
    return [(c, morph.get(c, ALL)) for c in classes]


# -- tagging -----------------------------------------------------------------------


def _class_rank(pos: str) -> int:
    return CLASS_ORDER.index(pos) if pos in CLASS_ORDER else len(CLASS_ORDER)


def _lexicon_element(word: str, analyses: Sequence[MorphAnalysis]) -> Element:
    merged: Dict[str, TripleSet] = {}
    for a in analyses:
        merged[a.pos] = merged.get(a.pos, frozenset()) | a.features
    classes = sorted(merged, key=lambda p: (_class_rank(p), p))
    attrs = []
    if len(classes) > 1:
        attrs.append(("ALT", ",".join(classes[1:])))
    morph = format_morph([(c, merged[c]) for c in classes])
    if morph:
        attrs.append(("MORPH", morph))
    return Element(classes[0], attrs, [TextSpan(word)])


def _tag_container(container: Element, lex: Lexicon, heuristics: Sequence[Heuristic]) -> None:
    units = list(iter_units(container.children))
    tokens = [u for u in units if u[0] != "ws"]
    analyses = [analyze(v, lex, initial=(i == 0)) if k == "word" else None
                for i, (k, v) in enumerate(tokens)]
    # neighbour classes as seen after the lexicon pass
    first_pass = []
    for (kind, value), found in zip(tokens, analyses):
        if kind == "elem":
            first_pass.append(value.name)
        elif found:
            first_pass.append(min((a.pos for a in found), key=lambda p: (_class_rank(p), p)))
        else:
            first_pass.append(UNKNOWN)
    out = _Children()
    index = 0
    for kind, value in units:
        if kind == "ws":
            out.text(value)
            continue
        if kind == "elem":
            out.element(value)
        else:
            found = analyses[index]
            if found:
                out.element(_lexicon_element(value, found))
            else:
                ctx = TokenContext(
                    value, index,
                    first_pass[index - 1] if index > 0 else None,
                    first_pass[index + 1] if index + 1 < len(first_pass) else None,
                )
                out.element(_heuristic_element(value, ctx, heuristics))
        index += 1
    container.children = out.nodes


def _heuristic_element(word: str, ctx: TokenContext, heuristics: Sequence[Heuristic]) -> Element:
    for h in heuristics:
        if h.applies(ctx):
            attrs = [("SRC", h.name)]
            morph = format_morph([(h.pos, h.features_for(word))])
            if morph:
                attrs.append(("MORPH", morph))
            return Element(h.pos, attrs, [TextSpan(word)])
    return Element(UNKNOWN, [], [TextSpan(word)])


def tag_document(doc: AnnotatedDocument, lex: Lexicon,
                 heuristics: Sequence[Heuristic] = ()) -> AnnotatedDocument:
    root = copy.deepcopy(doc.root)
    sentences = [c for c in root.children if isinstance(c, Element) and c.name == SENTENCE]
    for container in sentences or [root]:
        _tag_container(container, lex, heuristics)
    return AnnotatedDocument(root)


@dataclass(frozen=True)
class CoverageStats:
    total: int
    lexicon: int
    heuristic: int
    unknown: int

    @property
    def unknown_ratio(self) -> float:
        return self.unknown / self.total if self.total else 0.0


def coverage_report(doc: AnnotatedDocument) -> CoverageStats:
    """Token counts by classification source; XXX ratio indicates lexical coverage."""
    total = lexicon = heuristic = unknown = 0
    for leaf in iter_leaves(doc.root):
        total += 1
        if leaf.name == UNKNOWN:
            unknown += 1
        elif leaf.get("SRC"):
            heuristic += 1
        elif leaf.name in POS_CLASSES:
            lexicon += 1
    return CoverageStats(total, lexicon, heuristic, unknown)
