"""Lexicon and ontology induction from telegraphic findings ("Harnblase leer.")."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .annotation import AnnotatedDocument, Element, TextSpan, text_content
from .features import ALL
from .morph import LexEntry, format_entry
from .structure import SENTENCE

UNKNOWN = "XXX"
DEFAULT_THRESHOLD = 0.5
_SKIP = ("CONCEPTS", "REL")


@dataclass(frozen=True)
class Finding:
    noun: str
    adjective: str
    sentence: str  # "<document index>:<sentence index>"


@dataclass(frozen=True)
class ConceptCandidate:
    name: str
    values: FrozenSet[str]
    frequency: int = 1


@dataclass(frozen=True)
class Cluster:
    id: int
    members: Tuple[str, ...]
    shared: FrozenSet[str]


@dataclass(frozen=True)
class InducedOntology:
    clusters: Tuple[Cluster, ...]

    def partition(self) -> List[FrozenSet[str]]:
        return [frozenset(c.members) for c in self.clusters]


@dataclass(frozen=True)
class _Token:
    text: str
    classes: FrozenSet[str]


def sentence_tokens(sentence: Element) -> List[_Token]:
    """Leaf tokens of a sentence at any nesting depth; bare words count as unknown."""
    out: List[_Token] = []
    for child in sentence.children:
        if isinstance(child, TextSpan):
            out += [_Token(w, frozenset({UNKNOWN})) for w in child.text.split()]
        elif child.name in _SKIP:
            continue
        elif child.is_leaf:
            if child.children:
                classes = {child.name}
                if child.get("ALT"):
                    classes |= set(child.get("ALT").split(","))
                out.append(_Token(text_content(child), frozenset(classes)))
        else:
            out += sentence_tokens(child)
    return out


def _noun_slot(tok: _Token) -> bool:
    return "N" in tok.classes or (UNKNOWN in tok.classes and tok.text[:1].isupper())


def _adjective_slot(tok: _Token) -> bool:
    return "ADJ" in tok.classes or (UNKNOWN in tok.classes and tok.text[:1].islower())


def _sentences(doc: AnnotatedDocument) -> List[Element]:
    found = [c for c in doc.root.children if isinstance(c, Element) and c.name == SENTENCE]
    return found or [doc.root]


def detect_findings(corpus: Sequence[AnnotatedDocument]) -> List[Finding]:
    """Sentences that are exactly noun, adjective, full stop."""
    findings = []
    for d_index, doc in enumerate(corpus):
        for s_index, sentence in enumerate(_sentences(doc)):
            toks = sentence_tokens(sentence)
            if len(toks) != 3:
                continue
            noun, adj, stop = toks
            if _noun_slot(noun) and _adjective_slot(adj) and "IP" in stop.classes and stop.text == ".":
                findings.append(Finding(noun.text, adj.text, f"{d_index}:{s_index}"))
    return findings


def induce_lexicon(findings: Iterable[Finding]) -> List[LexEntry]:
    """One underspecified N or ADJ candidate per distinct word, with its frequency."""
    nouns: Counter = Counter()
    adjectives: Counter = Counter()
    for f in findings:
        nouns[f.noun] += 1
        adjectives[f.adjective] += 1
    entries = []
    for pos, counts in (("N", nouns), ("ADJ", adjectives)):
        for word in sorted(counts):
            extra = (("candidate", "bootstrap"), ("freq", str(counts[word])))
            entries.append(LexEntry(word, pos, None, ALL, extra))
    return entries


def format_candidates(entries: Iterable[LexEntry]) -> str:
    lines = ["# induced candidates; review before importing"]
    lines += [format_entry(e) for e in entries]
    return "\n".join(lines) + "\n"


def concept_candidates(findings: Iterable[Finding]) -> List[ConceptCandidate]:
    values: Dict[str, set] = {}
    freq: Counter = Counter()
    for f in findings:
        values.setdefault(f.noun, set()).add(f.adjective)
        freq[f.noun] += 1
    return [ConceptCandidate(n, frozenset(values[n]), freq[n]) for n in sorted(values)]


def jaccard(a: FrozenSet[str], b: FrozenSet[str]) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 1.0


def cluster_concepts(candidates: Iterable[ConceptCandidate],
                     threshold: float = DEFAULT_THRESHOLD) -> InducedOntology:
    """Greedy agglomerative clustering on Jaccard similarity of value sets.

    The most similar pair of clusters is merged while its similarity reaches
    the threshold; ties go to the lexicographically smallest pair, so the
    result does not depend on input order.
    """
    threshold = min(max(threshold, 0.0), 1.0)
    merged: Dict[str, set] = {}
    for c in candidates:
        merged.setdefault(c.name, set()).update(c.values)
    # each cluster: (sorted member names, {member: values})
    clusters = [((name,), {name: frozenset(vals)}) for name, vals in sorted(merged.items())]

    def union(cluster):
        return frozenset().union(*cluster[1].values())

    while len(clusters) > 1:
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                sim = jaccard(union(clusters[i]), union(clusters[j]))
                key = (-sim, clusters[i][0], clusters[j][0])
                if best is None or key < best[0]:
                    best = (key, i, j)
        (neg_sim, _, _), i, j = best
        if -neg_sim < threshold:
            break
        a, b = clusters[i], clusters[j]
        joined = (tuple(sorted(a[0] + b[0])), {**a[1], **b[1]})
        clusters = [c for k, c in enumerate(clusters) if k not in (i, j)] + [joined]
        clusters.sort(key=lambda c: c[0])
    clusters.sort(key=lambda c: c[0])
    return InducedOntology(tuple(
        Cluster(n, members, frozenset.intersection(*values.values()))
        for n, (members, values) in enumerate(clusters, 1)
    ))


def format_ontology(ontology: InducedOntology) -> str:
    lines = [f"{c.id}\t{','.join(c.members)}\t{','.join(sorted(c.shared))}"
             for c in ontology.clusters]
    return "".join(line + "\n" for line in lines)


def parse_ontology(text: str) -> InducedOntology:
    clusters = []
    for line in text.splitlines():
        if not line.strip():
            continue
        cid, members, shared = (line.split("\t") + ["", ""])[:3]
        clusters.append(Cluster(int(cid), tuple(m for m in members.split(",") if m),
                                frozenset(s for s in shared.split(",") if s)))
    return InducedOntology(tuple(clusters))


@dataclass
class BootstrapResult:
    findings: List[Finding]
    lexicon: List[LexEntry]
    ontology: InducedOntology


def bootstrap(corpus: Sequence[AnnotatedDocument],
              threshold: Optional[float] = None) -> BootstrapResult:
    findings = detect_findings(corpus)
    ontology = cluster_concepts(concept_candidates(findings),
                                DEFAULT_THRESHOLD if threshold is None else threshold)
    return BootstrapResult(findings, induce_lexicon(findings), ontology)
