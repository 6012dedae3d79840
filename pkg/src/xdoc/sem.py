"""Semantic tagging, case-frame slot filling and structural interpretation.

Semantic lexicon format, one reading per line (tab separated)::

    surface  category  type  desc  frame-spec

``category`` is CONCEPT, PROPERTY or RELWORD.  ``frame-spec`` is empty or
``REL:form,form[:semtype];REL:...`` with forms written ``N(gen, fak)`` or
``P(akk, fak, durch)``.

Structural rules, one per line::

    has-color: CONCEPT[organ] PROPERTY[color] "." -> has-color(1, 2)

Pattern items are a semantic category with optional ``[type]``, a quoted
literal token, or a POS/structure tag such as ``IP``.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from . import features as F
from .annotation import AnnotatedDocument, Element, TextSpan, text_content
from .structure import SENTENCE, _Children, iter_units

CONCEPT = "CONCEPT"
PROPERTY = "PROPERTY"
RELWORD = "RELWORD"
SEM_CATEGORIES = (CONCEPT, PROPERTY, RELWORD)
UNMATCHED = "XXX"
CONTAINER = "CONCEPTS"
REL = "REL"

# POS classes a semantic category is compatible with, when POS is known
_POS_COMPAT = {
    CONCEPT: {"N"},
    PROPERTY: {"ADJ", "ADV"},
    RELWORD: {"V", "N", "PRP", "ADJ"},
}
_POS_TAGS = {"N", "V", "ADJ", "ADV", "PRP", "DETD", "DETI", "KONJ", "PART", "NR",
             "RELPRON", "PERSPRON", "POSSPRON", "DEMPRON"}
_SKIP = {CONTAINER, REL}


class FormSyntaxError(ValueError):
    pass


class SemLexFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"semantic lexicon line {line}: {reason}")


class RuleFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"structural rules line {line}: {reason}")


# -- forms and frames -----------------------------------------------------------------

CASE_NAMES = ("nom", "gen", "dat", "akk")
_FORM_RE = re.compile(
    r"\s*([NP])\(\s*(nom|gen|dat|akk)\s*,\s*(fak|obl)\s*(?:,\s*([^\s,()]+)\s*)?\)\s*\Z"
)


@dataclass(frozen=True)
class FormConstraint:
    kind: str  # N or P
    case: str  # nom gen dat akk
    obligation: str  # fak or obl
    preposition: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("N", "P"):
            raise FormSyntaxError(f"phrase kind must be N or P, got {self.kind!r}")
        if self.case not in CASE_NAMES:
            raise FormSyntaxError(f"unknown case {self.case!r}")
        if self.obligation not in ("fak", "obl"):
            raise FormSyntaxError(f"obligation must be fak or obl, got {self.obligation!r}")
        if (self.kind == "P") != bool(self.preposition):
            raise FormSyntaxError("a preposition is required for P forms and only for them")

    @property
    def obligatory(self) -> bool:
        return self.obligation == "obl"

    def __str__(self):
        if self.kind == "P":
            return f"P({self.case}, {self.obligation}, {self.preposition})"
        return f"N({self.case}, {self.obligation})"


def parse_form(text: str) -> FormConstraint:
    m = _FORM_RE.match(text)
    if not m:
        raise FormSyntaxError(f"bad form {text!r}")
    return FormConstraint(*m.groups())


def format_form(form: FormConstraint) -> str:
    return str(form)


@dataclass(frozen=True)
class Slot:
    relation: str
    forms: Tuple[FormConstraint, ...]
    sem_type: Optional[str] = None

    @property
    def obligatory(self) -> bool:
        return any(f.obligatory for f in self.forms)

    def form_text(self) -> str:
        return " ".join(map(str, self.forms))


@dataclass(frozen=True)
class CaseFrame:
    slots: Tuple[Slot, ...] = ()


@dataclass(frozen=True)
class SemEntry:
    surface: str
    category: str
    type: str
    desc: str = ""
    frame: Optional[CaseFrame] = None

    @property
    def label(self) -> str:
        return f"{self.category}:{self.type}"


@dataclass
class SemLexicon:
    entries: List[SemEntry] = field(default_factory=list)

    def __post_init__(self):
        self._index: Dict[str, List[SemEntry]] = {}
        for e in self.entries:
            self._index.setdefault(e.surface, []).append(e)

    def lookup(self, token: str) -> List[SemEntry]:
        found = self._index.get(token)
        if found is None and token[:1].isupper():
            found = self._index.get(token[:1].lower() + token[1:])
        return list(found or ())

    def __len__(self):
        return len(self.entries)


def _split_top(text: str, sep: str) -> List[str]:
    """Split on ``sep`` outside parentheses."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def parse_frame(spec: str) -> CaseFrame:
    slots = []
    for item in _split_top(spec, ";"):
        item = item.strip()
        if not item:
            continue
        relation, sep, rest = item.partition(":")
        if not sep or not relation.strip():
            raise FormSyntaxError(f"bad slot {item!r}")
        pieces = _split_top(rest, ":")
        if len(pieces) > 2:
            raise FormSyntaxError(f"bad slot {item!r}")
        forms = tuple(parse_form(f) for f in _split_top(pieces[0], ",") if f.strip())
        if not forms:
            raise FormSyntaxError(f"slot {relation} has no forms")
        sem_type = pieces[1].strip() if len(pieces) == 2 and pieces[1].strip() else None
        slots.append(Slot(relation.strip(), forms, sem_type))
    return CaseFrame(tuple(slots))


def format_frame(frame: CaseFrame) -> str:
    items = []
    for s in frame.slots:
        text = f"{s.relation}:{','.join(map(str, s.forms))}"
        if s.sem_type:
            text += f":{s.sem_type}"
        items.append(text)
    return ";".join(items)


def load_semlex(paths) -> SemLexicon:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    entries = []
    for path in paths:
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 3 or len(cols) > 5:
                raise SemLexFormatError(lineno, "expected surface, category, type[, desc[, frame]]")
            cols += [""] * (5 - len(cols))
            surface, category, sem_type, desc, spec = (c.strip() for c in cols)
            if category not in SEM_CATEGORIES:
                raise SemLexFormatError(lineno, f"unknown category {category!r}")
            try:
                frame = parse_frame(spec) if spec else None
            except FormSyntaxError as exc:
                raise SemLexFormatError(lineno, str(exc)) from None
            entries.append(SemEntry(surface, category, sem_type, desc, frame))
    return SemLexicon(entries)


def default_semlex() -> SemLexicon:
    from .resources import resource_path

    return load_semlex(resource_path("seed.sem"))


# -- semantic tagging ------------------------------------------------------------------


def _pos_classes(elem: Optional[Element]) -> set:
    if elem is None:
        return set()
    classes = {elem.name}
    if elem.get("ALT"):
        classes |= set(elem.get("ALT").split(","))
    return classes & _POS_TAGS


def _readings(token: str, elem: Optional[Element], semlex: SemLexicon) -> List[SemEntry]:
    found = semlex.lookup(token)
    pos = _pos_classes(elem)
    if pos:
        found = [e for e in found if _POS_COMPAT[e.category] & pos]
    return found


def _sem_attrs(readings: Sequence[SemEntry]) -> List[Tuple[str, str]]:
    attrs = [("TYPE", readings[0].type)]
    rest = list(dict.fromkeys(e.label for e in readings[1:] if e.label != readings[0].label))
    if rest:
        attrs.append(("ALT", ",".join(rest)))
    return attrs


def is_sem_wrapper(elem: Element) -> bool:
    if elem.name in SEM_CATEGORIES:
        return True
    return elem.name == UNMATCHED and any(isinstance(c, Element) for c in elem.children)


def _tag_children(children, semlex: SemLexicon, flat: bool):
    out = _Children()
    for kind, value in iter_units(children):
        if kind == "ws":
            out.text(value)
        elif kind == "word":
            out.element(_tag_token(value, None, semlex, flat))
        elif value.name in _SKIP or is_sem_wrapper(value):
            out.element(value)
        elif value.is_leaf and value.children:
            out.element(_tag_token(text_content(value), value, semlex, flat))
        else:
            value.children = _tag_children(value.children, semlex, flat)
            out.element(value)
    return out.nodes


def _tag_token(text: str, elem: Optional[Element], semlex: SemLexicon, flat: bool) -> Element:
    readings = _readings(text, elem, semlex)
    name = readings[0].category if readings else UNMATCHED
    attrs = _sem_attrs(readings) if readings else []
    if flat or elem is None:
        return Element(name, attrs, [TextSpan(text)])
    return Element(name, attrs, [elem])


def sem_tag(doc: AnnotatedDocument, semlex: SemLexicon, flat: bool = False) -> AnnotatedDocument:
    """Mark every token with its semantic readings.

    By default each token element is wrapped in a CONCEPT/PROPERTY/RELWORD/XXX
    element so POS and syntax stay intact; ``flat`` replaces the token instead.
    """
    root = copy.deepcopy(doc.root)
    root.children = _tag_children(root.children, semlex, flat)
    return AnnotatedDocument(root)


# -- units: token-level view of a tagged sentence ----------------------------------------


@dataclass
class SemUnit:
    text: str
    category: str  # semantic category or XXX
    types: Tuple[str, ...]  # all readings as CATEGORY:type labels
    pos: Optional[str]  # POS or structure tag of the underlying token
    wrapper: Optional[Element]


def _units(node: Element) -> List[SemUnit]:
    units = []
    for child in node.children:
        if isinstance(child, TextSpan):
            units += [SemUnit(w, UNMATCHED, (), None, None) for w in child.text.split()]
        elif child.name in _SKIP:
            continue
        elif is_sem_wrapper(child):
            inner = child.elements()
            labels = _wrapper_labels(child)
            units.append(SemUnit(_token_text(child), child.name, labels,
                                 inner[0].name if inner else None, child))
        elif child.is_leaf:
            if child.children:
                units.append(SemUnit(_token_text(child), UNMATCHED, (), child.name, None))
        else:
            units.extend(_units(child))
    return units


def _wrapper_labels(elem: Element) -> Tuple[str, ...]:
    if elem.name not in SEM_CATEGORIES:
        return ()
    labels = [f"{elem.name}:{elem.get('TYPE', '')}"]
    if elem.get("ALT"):
        labels += elem.get("ALT").split(",")
    return tuple(labels)


def sentence_elements(root: Element) -> List[Element]:
    found = [c for c in root.children if isinstance(c, Element) and c.name == SENTENCE]
    return found or [root]


# -- case frames -------------------------------------------------------------------------


@dataclass(frozen=True)
class Phrase:
    """A candidate slot filler: an NP (kind N) or a PP reduced to preposition + core NP."""

    kind: str
    cases: frozenset
    preposition: Optional[str]
    text: str
    node: Element

    def concept_types(self) -> set:
        types = set()
        for elem in self.node.iter():
            if elem.name == CONCEPT:
                types |= {lab.split(":", 1)[1] for lab in _wrapper_labels(elem)
                          if lab.startswith(CONCEPT + ":")}
                break
        return types


@dataclass(frozen=True)
class RelationInstance:
    relation: str
    holder: str
    filler: str
    form: Optional[FormConstraint] = None
    sentence: int = 0
    concept_type: Optional[str] = None


def _cases(elem: Element) -> frozenset:
    value = elem.get("CAS")
    if value is None:
        return frozenset(F.CASES)
    try:
        return frozenset(F.parse_dimension(value, "CAS"))
    except F.FeatureSyntaxError:
        return frozenset(F.CASES)


def _phrase_text(elem: Element) -> str:
    return " ".join(text_content(elem).split())


def _token_text(elem: Element) -> str:
    return " ".join(text_content(elem).split())


def chunk_phrases(elem: Element) -> List[Phrase]:
    """Split a phrase into slot-sized chunks by peeling off right-attached PPs."""
    kids = elem.elements()
    if elem.name == "NP" and len(kids) == 2 and kids[0].name == "NP" and kids[1].name == "PP":
        return chunk_phrases(kids[0]) + chunk_phrases(kids[1])
    if elem.name == "PP":
        objects = [k for k in kids if k.name in ("NP", "PP")]
        prep = kids[0] if kids else None
        if prep is None or not objects:
            return []
        inner = chunk_phrases(objects[0])
        if not inner:
            return []
        head = inner[0]
        prep_text = _token_text(prep)
        text = f"{prep_text} {head.text}"
        return [Phrase("P", _cases(elem), prep_text.lower(), text, head.node)] + inner[1:]
    if elem.name == "NP":
        return [Phrase("N", _cases(elem), None, _phrase_text(elem), elem)]
    return []


def form_matches(form: FormConstraint, phrase: Phrase) -> bool:
    if form.kind != phrase.kind:
        return False
    if form.case.upper() not in phrase.cases:
        return False
    return form.kind == "N" or phrase.preposition == form.preposition.lower()


def slot_accepts(slot: Slot, phrase: Phrase) -> Optional[FormConstraint]:
    if slot.sem_type and slot.sem_type not in phrase.concept_types():
        return None
    for form in slot.forms:
        if form_matches(form, phrase):
            return form
    return None


def assign_slots(frame: CaseFrame, phrases: Sequence[Phrase]):
    """Greedy: each slot, in frame order, takes the first unused matching phrase."""
    used = set()
    filled = []
    for slot in frame.slots:
        for index, phrase in enumerate(phrases):
            if index in used:
                continue
            form = slot_accepts(slot, phrase)
            if form is not None:
                used.add(index)
                filled.append((slot, phrase, form))
                break
    return filled


def _parents(root: Element) -> Dict[int, Element]:
    parents = {}
    for elem in root.iter():
        for child in elem.elements():
            parents[id(child)] = elem
    return parents


def _candidate_phrases(wrapper: Element, sentence: Element, parents) -> List[Phrase]:
    """Phrases after the concept within its maximal projection, then later fragments."""
    node = wrapper
    phrases: List[Phrase] = []
    while True:
        parent = parents.get(id(node))
        if parent is None or parent is sentence or parent.name not in ("NP",):
            break
        kids = parent.elements()
        position = next(i for i, k in enumerate(kids) if k is node)
        if parent.get("TYPE") == "COMPLEX" and position != 0:
            break
        if parent.get("TYPE") == "COMPLEX":
            for sister in kids[position + 1:]:
                phrases += chunk_phrases(sister)
        node = parent
    if parents.get(id(node)) is sentence:
        kids = sentence.elements()
        position = next(i for i, k in enumerate(kids) if k is node)
        for later in kids[position + 1:]:
            phrases += chunk_phrases(later)
    return phrases


def _frame_readings(wrapper: Element, semlex: SemLexicon) -> List[SemEntry]:
    labels = set(_wrapper_labels(wrapper))
    word = _token_text(wrapper)
    return [e for e in semlex.lookup(word) if e.label in labels]


def analyze_frames(doc: AnnotatedDocument, semlex: SemLexicon):
    """``(sentence, wrapper, entry, fillers)`` for each surviving frame-bearing reading."""
    results = []
    for s_index, sentence in enumerate(sentence_elements(doc.root)):
        parents = _parents(sentence)
        for wrapper in list(sentence.iter(CONCEPT)):
            if wrapper is sentence or any(p.name == CONTAINER for p in _ancestors(wrapper, parents)):
                continue
            readings = _frame_readings(wrapper, semlex)
            if not any(e.frame for e in readings):
                continue
            phrases = _candidate_phrases(wrapper, sentence, parents)
            for entry in readings:
                if entry.frame is None:
                    continue
                filled = assign_slots(entry.frame, phrases)
                got = {slot.relation for slot, _, _ in filled}
                if all(s.relation in got for s in entry.frame.slots if s.obligatory):
                    results.append((s_index, sentence, wrapper, entry, filled))
    return results


def _ancestors(elem: Element, parents) -> Iterable[Element]:
    while id(elem) in parents:
        elem = parents[id(elem)]
        yield elem


def frame_instances(doc: AnnotatedDocument, semlex: SemLexicon) -> List[RelationInstance]:
    out = []
    for s_index, _, wrapper, entry, filled in analyze_frames(doc, semlex):
        for slot, phrase, form in filled:
            out.append(RelationInstance(slot.relation, _token_text(wrapper), phrase.text, form,
                                        s_index, entry.type))
    return out


def _concept_element(word: str, entry: SemEntry, filled, ex7_style: bool) -> Element:
    concept = Element(CONCEPT, [("TYPE", entry.type)], [
        Element("WORD", [], [TextSpan(word)]),
        Element("DESC", [], [TextSpan(entry.desc)] if entry.desc else []),
    ])
    if not filled:
        return concept
    slots = Element("SLOTS")
    if ex7_style:
        group = Element("RELATION")
        for slot, phrase, _ in filled:
            group.children.append(
                Element(slot.relation, [("FORM", slot.form_text())], [TextSpan(phrase.text)])
            )
        slots.children.append(group)
    else:
        for slot, phrase, _ in filled:
            slots.children.append(Element("RELATION", [("TYPE", slot.relation)], [
                Element("ASSIGN_TO", [], [TextSpan(word)]),
                Element("FORM", [], [TextSpan(slot.form_text())]),
                Element("CONTENT", [], [TextSpan(phrase.text)]),
            ]))
    concept.children.append(slots)
    return concept


def fill_frames(doc: AnnotatedDocument, semlex: SemLexicon, ex7_style: bool = False) -> AnnotatedDocument:
    """Append a CONCEPTS block with filled case frames to each sentence.

    Concept wrappers whose frame readings are all unsatisfiable keep their tag;
    otherwise their TYPE/ALT are narrowed to the surviving readings.
    """
    doc = AnnotatedDocument(copy.deepcopy(doc.root))
    analysed = analyze_frames(doc, semlex)
    by_sentence: Dict[int, List[Element]] = {}
    survivors: Dict[int, Tuple[Element, List[SemEntry]]] = {}
    for s_index, sentence, wrapper, entry, filled in analysed:
        word = _token_text(wrapper)
        by_sentence.setdefault(id(sentence), [sentence, []])[1].append(
            _concept_element(word, entry, filled, ex7_style)
        )
        survivors.setdefault(id(wrapper), (wrapper, []))[1].append(entry)
    for wrapper, entries in survivors.values():
        labels = _wrapper_labels(wrapper)
        kept = [e for e in semlex.lookup(_token_text(wrapper))
                if e in entries or (e.frame is None and e.label in labels)]
        for key in ("TYPE", "ALT"):
            wrapper.remove(key)
        wrapper.attrs[:0] = _sem_attrs(kept)
    for sentence, concepts in by_sentence.values():
        sentence.children.append(Element(CONTAINER, [], concepts))
    return doc


# -- structural interpretation ------------------------------------------------------------


@dataclass(frozen=True)
class PatternItem:
    kind: str  # "sem", "literal" or "tag"
    value: str
    type: Optional[str] = None

    def matches(self, unit: SemUnit) -> bool:
        if self.kind == "literal":
            return unit.text == self.value
        if self.kind == "tag":
            return unit.pos == self.value or unit.category == self.value
        for label in unit.types:
            category, _, sem_type = label.partition(":")
            if category == self.value and (self.type is None or sem_type == self.type):
                return True
        return False


@dataclass(frozen=True)
class StructuralRule:
    name: str
    pattern: Tuple[PatternItem, ...]
    relation: str
    args: Tuple[int, ...]


_ITEM_RE = re.compile(r'"([^"]+)"|([A-Za-z][\w-]*)(?:\[([^\]]+)\])?')
_RULE_LINE_RE = re.compile(r"\s*([\w-]+)\s*:\s*(.+?)\s*->\s*([\w-]+)\s*\(([^)]*)\)\s*$")


def parse_structural_rule(line: str) -> StructuralRule:
    m = _RULE_LINE_RE.match(line)
    if not m:
        raise ValueError("expected 'NAME: pattern -> relation(i, j)'")
    name, pattern_text, relation, arg_text = m.groups()
    items = []
    pos = 0
    while pos < len(pattern_text):
        if pattern_text[pos].isspace():
            pos += 1
            continue
        im = _ITEM_RE.match(pattern_text, pos)
        if not im:
            raise ValueError(f"bad pattern item at {pattern_text[pos:]!r}")
        literal, tag, sem_type = im.groups()
        if literal is not None:
            items.append(PatternItem("literal", literal))
        elif tag in SEM_CATEGORIES or tag == UNMATCHED and sem_type:
            items.append(PatternItem("sem", tag, sem_type))
        else:
            if sem_type:
                raise ValueError(f"only semantic categories take a type: {im.group()!r}")
            items.append(PatternItem("tag", tag))
        pos = im.end()
    try:
        args = tuple(int(a) for a in arg_text.split(",") if a.strip())
    except ValueError:
        raise ValueError(f"arguments must be item numbers: {arg_text!r}") from None
    if not args or any(a < 1 or a > len(items) for a in args):
        raise ValueError("argument numbers must refer to pattern items")
    return StructuralRule(name, tuple(items), relation, args)


def load_structural_rules(paths) -> List[StructuralRule]:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    rules = []
    for path in paths:
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                rules.append(parse_structural_rule(line))
            except ValueError as exc:
                raise RuleFormatError(lineno, str(exc)) from None
    return rules


def default_structural_rules() -> List[StructuralRule]:
    from .resources import resource_path

    return load_structural_rules(resource_path("autopsy.rules"))


def _match_sentence(units: Sequence[SemUnit], rule: StructuralRule):
    k = len(rule.pattern)
    i = 0
    while i + k <= len(units):
        window = units[i:i + k]
        if all(item.matches(u) for item, u in zip(rule.pattern, window)):
            yield window
            i += k
        else:
            i += 1


def interpret_structure(doc: AnnotatedDocument, rules: Sequence[StructuralRule]) -> List[RelationInstance]:
    out = []
    for s_index, sentence in enumerate(sentence_elements(doc.root)):
        units = _units(sentence)
        for rule in rules:
            for window in _match_sentence(units, rule):
                args = [window[a - 1].text for a in rule.args]
                holder = args[0]
                filler = args[1] if len(args) > 1 else ""
                out.append(RelationInstance(rule.relation, holder, filler, None, s_index))
    return out


def annotate_relations(doc: AnnotatedDocument, rules: Sequence[StructuralRule]) -> AnnotatedDocument:
    """Append a ``<REL NAME ARG1 ARG2/>`` element to each sentence per structural match."""
    root = copy.deepcopy(doc.root)
    result = AnnotatedDocument(root)
    sentences = sentence_elements(root)
    for s_index, sentence in enumerate(sentences):
        units = _units(sentence)
        for rule in rules:
            for window in _match_sentence(units, rule):
                attrs = [("NAME", rule.relation)]
                attrs += [(f"ARG{n}", window[a - 1].text) for n, a in enumerate(rule.args, 1)]
                sentence.children.append(Element(REL, attrs))
    return result
