"""Structure detection: input normalization, tokenization and sentence splitting.

The period is the hard case.  It can end a sentence, belong to an
abbreviation (``z.B.``, ``Dr.``), sit inside a number (``3.14``) or inside a
domain token recognized by a pattern.  Tokens are recognized at each position
in priority order:

1. token patterns (longest match, declaration order breaks ties)
2. abbreviation lexicon entries, tagged ``ABBR``
3. numbers containing a period, tagged ``NUMBER``
4. maximal alphanumeric runs (hyphens between alphanumerics stay inside)
5. any other single character, tagged ``IP``

Plain words stay as bare text; whitespace between tokens collapses to a
single space so no characters other than whitespace are lost.
"""

from __future__ import annotations

import copy
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from .annotation import AnnotatedDocument, Element, Node, TextSpan, is_valid_name

DEFAULT_TERMINALS = frozenset({".", "!", "?", ":"})
SENTENCE = "S"
ROOT = "DOC"

# longest extent a single pattern match may cover
MAX_PATTERN_LENGTH = 256

_GROUP_RE = re.compile(r"\(\?<([^>=!][^>]*)>")
_WORD_RE = re.compile(r"\w+(?:-\w+)*")
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)+")
_SPACE_RE = re.compile(r"\s+")


class InvalidEncoding(ValueError):
    pass


class PatternFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"pattern file line {line}: {reason}")


@dataclass(frozen=True)
class AttributeRule:
    attribute: str
    group: str
    table: Optional[Mapping[str, str]] = None


@dataclass
class TokenPattern:
    """A named finite-state matcher.

    ``source`` uses Python regex syntax, except that named groups are written
    ``(?<TAG>...)`` with any tag name (``MAT-ID`` included); each matched group
    becomes a nested child element of the token.
    """

    name: str
    source: str
    attributes: Sequence[AttributeRule] = ()

    def __post_init__(self):
        if not is_valid_name(self.name):
            raise ValueError(f"invalid pattern name {self.name!r}")
        self.group_tags: Dict[str, str] = {}

        def rename(m):
            tag = m.group(1)
            if not is_valid_name(tag):
                raise ValueError(f"invalid group tag {tag!r}")
            key = f"g{len(self.group_tags)}"
            self.group_tags[key] = tag
            return f"(?P<{key}>"

        self.regex = re.compile(_GROUP_RE.sub(rename, self.source))


@dataclass
class StructureConfig:
    sentence_terminals: FrozenSet[str] = DEFAULT_TERMINALS
    patterns: List[TokenPattern] = field(default_factory=list)
    abbreviations: FrozenSet[str] = frozenset()

    def __post_init__(self):
        self.abbreviations = frozenset(self.abbreviations)
        bad = [a for a in self.abbreviations if "." not in a]
        if bad:
            raise ValueError(f"abbreviations must contain '.': {sorted(bad)}")
        self._max_abbrev = max((len(a) for a in self.abbreviations), default=0)


# -- resources ---------------------------------------------------------------------


def load_abbreviations(path: Union[str, Path]) -> FrozenSet[str]:
    entries = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "." not in line:
            raise PatternFormatError(lineno, f"abbreviation {line!r} has no period")
        entries.add(line)
    return frozenset(entries)


def load_patterns(path: Union[str, Path]) -> List[TokenPattern]:
    """Read ``NAME<TAB>regex[<TAB>attribute rules]`` lines and ``%table`` lines.

    Attribute rules are space separated ``Attr=GROUP`` or ``Attr=GROUP:TABLE``;
    a table maps matched group text to the attribute value.
    """
    tables: Dict[str, Dict[str, str]] = {}
    patterns = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if cols[0] == "%table":
            if len(cols) < 2:
                raise PatternFormatError(lineno, "table without a name")
            entries = {}
            for item in cols[2:]:
                if "=" not in item:
                    raise PatternFormatError(lineno, f"bad table entry {item!r}")
                key, value = item.split("=", 1)
                entries[key] = value
            tables[cols[1]] = entries
            continue
        if len(cols) not in (2, 3):
            raise PatternFormatError(lineno, "expected NAME<TAB>regex[<TAB>attributes]")
        rules = []
        if len(cols) == 3:
            for item in cols[2].split():
                m = re.fullmatch(r"([^=]+)=([^:]+)(?::(.+))?", item)
                if not m:
                    raise PatternFormatError(lineno, f"bad attribute rule {item!r}")
                table = None
                if m.group(3):
                    if m.group(3) not in tables:
                        raise PatternFormatError(lineno, f"unknown table {m.group(3)!r}")
                    table = tables[m.group(3)]
                rules.append(AttributeRule(m.group(1), m.group(2), table))
        try:
            patterns.append(TokenPattern(cols[0], cols[1], rules))
        except (ValueError, re.error) as exc:
            raise PatternFormatError(lineno, str(exc)) from None
    return patterns


def load_charmap(path: Union[str, Path]) -> Dict[str, str]:
    mapping = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        src, _, dst = line.partition("\t")
        mapping[src] = dst
    return mapping


# -- normalization -------------------------------------------------------------


def normalize_input(raw: bytes, char_map: Optional[Mapping[str, str]] = None) -> str:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidEncoding(f"input is not UTF-8 at byte {exc.start}") from None
    text = text.lstrip("﻿").replace("\r\n", "\n")
    text = "".join(
        ch for ch in text if ch in "\n\t" or unicodedata.category(ch) != "Cc"
    )
    if char_map:
        # longer keys first so multi-character sequences win
        keys = sorted(char_map, key=len, reverse=True)
        text = re.sub("|".join(map(re.escape, keys)), lambda m: char_map[m.group()], text)
    return text


# -- tokenization --------------------------------------------------------------------


class _Children:
    """Accumulates child nodes, merging adjacent text."""

    def __init__(self):
        self.nodes: List[Node] = []

    def text(self, s: str):
        if not s:
            return
        if self.nodes and isinstance(self.nodes[-1], TextSpan):
            self.nodes[-1] = TextSpan(self.nodes[-1].text + s)
        else:
            self.nodes.append(TextSpan(s))

    def element(self, e: Element):
        self.nodes.append(e)


def _boundary_ok(text: str, end: int) -> bool:
    if end >= len(text) or end == 0:
        return True
    return not (text[end].isalnum() and text[end - 1].isalnum())


def _longest_pattern(text: str, pos: int, patterns: Sequence[TokenPattern]):
    best = None
    limit = min(len(text), pos + MAX_PATTERN_LENGTH)
    for pattern in patterns:
        if pattern.regex.match(text, pos) is None:
            continue
        for end in range(limit, pos, -1):
            if best is not None and end - pos <= best[1].end() - pos:
                break
            m = pattern.regex.fullmatch(text, pos, end)
            if m and _boundary_ok(text, end):
                best = (pattern, m)
                break
    return best


def _basic_tokens(text: str, out: _Children):
    """Words as bare text, other characters as IP, whitespace as one space."""
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos = _SPACE_RE.match(text, pos).end()
            out.text(" ")
            continue
        m = _WORD_RE.match(text, pos)
        if m:
            out.text(m.group())
            pos = m.end()
        else:
            out.element(Element("IP", [], [TextSpan(ch)]))
            pos += 1


def _build_group(tag: str, text: str, start: int, end: int, groups) -> Element:
    """Element for ``text[start:end]`` whose direct subgroups are ``groups``."""
    out = _Children()
    cursor = start
    i = 0
    while i < len(groups):
        key, gs, ge = groups[i]
        nested = []
        j = i + 1
        while j < len(groups) and groups[j][1] < ge:
            nested.append(groups[j])
            j += 1
        _basic_tokens(text[cursor:gs], out)
        out.element(_build_group(key, text, gs, ge, nested))
        cursor = ge
        i = j
    if cursor == start and not groups:
        out.text(_SPACE_RE.sub(" ", text[start:end]))
    else:
        _basic_tokens(text[cursor:end], out)
    return Element(tag, [], out.nodes)


def _pattern_element(pattern: TokenPattern, m: re.Match, text: str) -> Element:
    spans = []
    for key, tag in pattern.group_tags.items():
        gs, ge = m.span(key)
        if gs >= 0 and ge > gs:
            spans.append((tag, gs, ge))
    spans.sort(key=lambda s: (s[1], -s[2]))
    elem = _build_group(pattern.name, text, m.start(), m.end(), spans)
    captured: Dict[str, str] = {}
    for key, tag in pattern.group_tags.items():
        if m.group(key) and tag not in captured:
            captured[tag] = m.group(key)
    for rule in pattern.attributes:
        value = captured.get(rule.group)
        if value is None:
            continue
        if rule.table is not None:
            value = rule.table.get(value)
            if value is None:
                continue
        elem.set(rule.attribute, value)
    return elem


def tokenize(text: str, config: StructureConfig) -> AnnotatedDocument:
    out = _Children()
    pos = 0
    n = len(text)
    abbrevs = config.abbreviations
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos = _SPACE_RE.match(text, pos).end()
            out.text(" ")
            continue
        found = _longest_pattern(text, pos, config.patterns)
        if found:
            pattern, m = found
            out.element(_pattern_element(pattern, m, text))
            pos = m.end()
            continue
        abbrev = None
        for length in range(min(config._max_abbrev, n - pos), 0, -1):
            if text[pos:pos + length] in abbrevs and _boundary_ok(text, pos + length):
                abbrev = text[pos:pos + length]
                break
        if abbrev:
            out.element(Element("ABBR", [], [TextSpan(abbrev)]))
            pos += len(abbrev)
            continue
        m = _NUMBER_RE.match(text, pos)
        if m and _boundary_ok(text, m.end()):
            out.element(Element("NUMBER", [], [TextSpan(m.group())]))
            pos = m.end()
            continue
        m = _WORD_RE.match(text, pos)
        if m:
            out.text(m.group())
            pos = m.end()
            continue
        out.element(Element("IP", [], [TextSpan(ch)]))
        pos += 1
    return AnnotatedDocument(Element(ROOT, [], out.nodes))


# -- sentence detection ---------------------------------------------------------------


def iter_units(children: Sequence[Node]):
    """Split a child list into ``(kind, value)`` units: ``ws``, ``word`` or ``elem``."""
    for child in children:
        if isinstance(child, Element):
            yield "elem", child
            continue
        for m in re.finditer(r"\s+|\S+", child.text):
            piece = m.group()
            yield ("ws" if piece.isspace() else "word"), piece


def detect_sentences(doc: AnnotatedDocument, config: StructureConfig) -> AnnotatedDocument:
    root = doc.root
    if any(isinstance(c, Element) and c.name == SENTENCE for c in root.children):
        return doc
    root = copy.deepcopy(root)
    outer = _Children()
    current: Optional[_Children] = None
    pending_ws = ""

    def close(complete: bool):
        nonlocal current
        attrs = [] if complete else [("COMPLETE", "no")]
        outer.element(Element(SENTENCE, attrs, current.nodes))
        current = None

    for kind, value in iter_units(root.children):
        if kind == "ws":
            pending_ws = value
            continue
        if current is None:
            outer.text(pending_ws)
            current = _Children()
        else:
            current.text(pending_ws)
        pending_ws = ""
        if kind == "word":
            current.text(value)
            continue
        current.element(value)
        if value.name == "IP" and value.is_leaf and \
                "".join(c.text for c in value.children) in config.sentence_terminals:
            value.set("SENT", "end")
            close(True)
    if current is not None:
        close(False)
    outer.text(pending_ws)
    root.children = outer.nodes
    return AnnotatedDocument(root)


def structure(text: str, config: StructureConfig) -> AnnotatedDocument:
    """Tokenize and sentence-split normalized text."""
    return detect_sentences(tokenize(text, config), config)


def default_config(colon_terminal: bool = True) -> StructureConfig:
    from .resources import resource_path

    terminals = DEFAULT_TERMINALS if colon_terminal else DEFAULT_TERMINALS - {":"}
    return StructureConfig(
        sentence_terminals=terminals,
        patterns=load_patterns(resource_path("casting.pat")),
        abbreviations=load_abbreviations(resource_path("abbrev.txt")),
    )
