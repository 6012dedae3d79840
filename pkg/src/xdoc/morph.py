"""Morphosyntactic analysis and generation for German.

Closed-class words and irregular forms are listed per surface form.
Open-class roots (N, V, ADJ) are coded once together with an inflection
paradigm; the paradigm's suffix table drives both analysis and generation.

Lexicon file format (tab separated, ``#`` starts a comment)::

    %paradigm  ID  POS  KEY=SUFFIXES ...
    surface-or-root  POS  paradigm-or-'-'  features-or-'_'  [key=value ...]

Paradigm keys are feature items (``NOM|AKK.SG.*``), ``PRED`` for the
uninflected adjective, or verb form labels (``1SG``, ``INF``, ...).  Suffix
alternatives are separated by ``/`` and ``0`` is the empty suffix.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from . import features as F
from .features import ALL, FeatureBundle, TripleSet

OPEN_CLASSES = frozenset({"N", "V", "ADJ"})
POS_CLASSES = OPEN_CLASSES | frozenset({
    "DETD", "DETI", "PRP", "RELPRON", "PERSPRON", "POSSPRON", "DEMPRON",
    "KONJ", "ADV", "PART", "NR",
})
VERB_FORMS = ("INF", "1SG", "2SG", "3SG", "1PL", "2PL", "3PL")
PREDICATIVE = "PRED"

LEXICON = "LEXICON"


class LexiconFormatError(ValueError):
    def __init__(self, line: int, reason: str, path: Optional[str] = None):
        self.line = line
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"lexicon {where}: {reason}")


class UnknownParadigm(KeyError):
    pass


@dataclass(frozen=True)
class Paradigm:
    id: str
    pos: str
    # (admissible triples, form label or None, suffix)
    cells: Tuple[Tuple[TripleSet, Optional[str], str], ...]

    def suffixes(self) -> Set[str]:
        return {suffix for _, _, suffix in self.cells}


@dataclass(frozen=True)
class LexEntry:
    root: str
    pos: str
    paradigm: Optional[str] = None
    fixed_features: TripleSet = ALL
    extra: Tuple[Tuple[str, str], ...] = ()

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return dict(self.extra).get(key, default)

    @property
    def lemma(self) -> str:
        return self.get("lemma") or self.root


@dataclass(frozen=True)
class MorphAnalysis:
    pos: str
    features: TripleSet
    lemma: str
    source: str = LEXICON
    forms: FrozenSet[str] = frozenset()

    @property
    def bundle(self) -> FeatureBundle:
        return FeatureBundle.from_triples(self.features)


@dataclass
class Lexicon:
    entries: List[LexEntry] = field(default_factory=list)
    paradigms: Dict[str, Paradigm] = field(default_factory=dict)

    def __post_init__(self):
        self._forms: Dict[str, List[LexEntry]] = defaultdict(list)
        self._roots: Dict[str, List[LexEntry]] = defaultdict(list)
        self._suffixes: Set[str] = set()
        entries, self.entries = self.entries, []
        for p in self.paradigms.values():
            self._suffixes |= p.suffixes()
        for entry in entries:
            self.add(entry)

    def add(self, entry: LexEntry) -> None:
        self.entries.append(entry)
        if entry.paradigm is None:
            self._forms[entry.root].append(entry)
        else:
            self._roots[entry.root].append(entry)

    def add_paradigm(self, paradigm: Paradigm) -> None:
        self.paradigms[paradigm.id] = paradigm
        self._suffixes |= paradigm.suffixes()

    def open_class_entries(self) -> List[LexEntry]:
        return [e for e in self.entries if e.paradigm is not None]

    def __len__(self):
        return len(self.entries)


# -- loading ---------------------------------------------------------------------


def _parse_paradigm(cols: Sequence[str], lineno: int, path) -> Paradigm:
    if len(cols) < 4:
        raise LexiconFormatError(lineno, "paradigm needs ID, POS and cells", path)
    pid, pos = cols[1], cols[2]
    if pos not in OPEN_CLASSES:
        raise LexiconFormatError(lineno, f"paradigm POS must be open-class, got {pos!r}", path)
    cells = []
    for item in cols[3:]:
        if "=" not in item:
            raise LexiconFormatError(lineno, f"bad paradigm cell {item!r}", path)
        key, suffixes = item.split("=", 1)
        label = None
        if pos == "V":
            if key not in VERB_FORMS:
                raise LexiconFormatError(lineno, f"unknown verb form {key!r}", path)
            label, ts = key, ALL
        elif key == PREDICATIVE and pos == "ADJ":
            label, ts = PREDICATIVE, ALL
        else:
            try:
                ts = F.parse_triples(key)
            except F.FeatureSyntaxError as exc:
                raise LexiconFormatError(lineno, str(exc), path) from None
        for suffix in suffixes.split("/"):
            cells.append((ts, label, "" if suffix == "0" else suffix))
    if pos == "V":
        missing = set(VERB_FORMS) - {label for _, label, _ in cells}
        if missing:
            raise LexiconFormatError(lineno, f"paradigm {pid} lacks forms {sorted(missing)}", path)
    else:
        covered = frozenset().union(*(ts for ts, label, _ in cells if label is None))
        if covered != ALL:
            raise LexiconFormatError(
                lineno, f"paradigm {pid} does not cover {F.format_triples(ALL - covered)}", path
            )
    return Paradigm(pid, pos, tuple(cells))


def _parse_entry(cols: Sequence[str], lineno: int, path) -> LexEntry:
    if len(cols) < 4:
        raise LexiconFormatError(lineno, "expected surface, POS, paradigm, features", path)
    surface, pos, paradigm, feats = cols[:4]
    if pos not in POS_CLASSES:
        raise LexiconFormatError(lineno, f"unknown POS {pos!r}", path)
    if paradigm != "-" and pos not in OPEN_CLASSES:
        raise LexiconFormatError(lineno, f"closed-class {pos} cannot have a paradigm", path)
    extra = []
    for item in cols[4:]:
        if "=" not in item:
            raise LexiconFormatError(lineno, f"bad key=value item {item!r}", path)
        key, value = item.split("=", 1)
        extra.append((key, value))
    try:
        fixed = F.parse_triples(feats)
        gov = dict(extra).get("gov")
        if gov:
            fixed = F.restrict(fixed, "CAS", F.parse_dimension(gov, "CAS"))
    except F.FeatureSyntaxError as exc:
        raise LexiconFormatError(lineno, str(exc), path) from None
    return LexEntry(surface, pos, None if paradigm == "-" else paradigm, fixed, tuple(extra))


def load_lexicon(paths: Union[str, Path, Iterable[Union[str, Path]]]) -> Lexicon:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    paradigms: Dict[str, Paradigm] = {}
    entries: List[Tuple[LexEntry, int, str]] = []
    for path in paths:
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0]
            if not line.strip():
                continue
            cols = [c.strip() for c in line.split("\t")]
            cols = [c for c in cols if c]
            if cols[0] == "%paradigm":
                p = _parse_paradigm(cols, lineno, str(path))
                paradigms[p.id] = p
            else:
                entries.append((_parse_entry(cols, lineno, str(path)), lineno, str(path)))
    for entry, lineno, path in entries:
        if entry.paradigm is not None:
            p = paradigms.get(entry.paradigm)
            if p is None:
                raise LexiconFormatError(lineno, f"unknown paradigm {entry.paradigm!r}", path)
            if p.pos != entry.pos:
                raise LexiconFormatError(lineno, f"paradigm {p.id} is for {p.pos}", path)
    return Lexicon([e for e, _, _ in entries], paradigms)


def format_entry(entry: LexEntry) -> str:
    cols = [entry.root, entry.pos, entry.paradigm or "-", F.format_triples(entry.fixed_features)]
    cols += [f"{k}={v}" for k, v in entry.extra]
    return "\t".join(cols)


# -- analysis and generation ---------------------------------------------------------


def _analyze_exact(token: str, lex: Lexicon) -> Set[MorphAnalysis]:
    found: Dict[Tuple[str, str, FrozenSet[str]], TripleSet] = {}

    def add(pos, lemma, ts, forms=frozenset()):
        key = (pos, lemma, forms)
        found[key] = found.get(key, frozenset()) | ts

    for entry in lex._forms.get(token, ()):
        forms = frozenset(entry.get("form", "").split("|")) - {""}
        add(entry.pos, entry.lemma, entry.fixed_features, forms)
    for suffix in lex._suffixes:
        if suffix and not token.endswith(suffix):
            continue
        root = token[: len(token) - len(suffix)] if suffix else token
        if not root:
            continue
        for entry in lex._roots.get(root, ()):
            paradigm = lex.paradigms.get(entry.paradigm)
            if paradigm is None:
                continue
            cells = [(ts, label) for ts, label, s in paradigm.cells if s == suffix]
            if not cells:
                continue
            ts = frozenset().union(*(t for t, _ in cells)) & entry.fixed_features
            if not ts:
                continue
            forms = frozenset(label for _, label in cells if label) if paradigm.pos == "V" else frozenset()
            add(entry.pos, entry.lemma, ts, forms)
    return {MorphAnalysis(pos, ts, lemma, LEXICON, forms) for (pos, lemma, forms), ts in found.items()}


def analyze(token: str, lex: Lexicon, initial: bool = False) -> Set[MorphAnalysis]:
    """All readings of ``token``; sentence-initial tokens are also tried lowercased."""
    result = _analyze_exact(token, lex)
    if initial and token[:1].isupper():
        result |= _analyze_exact(token[:1].lower() + token[1:], lex)
    return result


def inflect(
    entry: LexEntry,
    features: Union[FeatureBundle, TripleSet] = ALL,
    lex: Optional[Lexicon] = None,
    forms: Optional[Iterable[str]] = None,
) -> Set[str]:
    """Surface forms of ``entry`` compatible with the (possibly partial) features."""
    if entry.paradigm is None:
        raise UnknownParadigm(f"{entry.root} has no paradigm")
    paradigm = lex.paradigms.get(entry.paradigm) if lex is not None else None
    if paradigm is None:
        raise UnknownParadigm(entry.paradigm)
    wanted = features.triples() if isinstance(features, FeatureBundle) else features
    labels = set(forms) if forms is not None else None
    result = set()
    for ts, label, suffix in paradigm.cells:
        if labels is not None and label not in labels:
            continue
        if ts & entry.fixed_features & wanted:
            result.add(entry.root + suffix)
    return result


def default_lexicon() -> Lexicon:
    from .resources import resource_path

    return load_lexicon(resource_path("seed.lex"))
