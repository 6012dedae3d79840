"""Bottom-up chart parsing over tagged token lattices.

The chart is a packed forest: one node per (category, span, features), each
node holding every derivation that produced it.  Complete parses are the
root-category nodes spanning the input; when there are none, the input is
tiled with the fewest chart nodes instead.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .. import features as F
from ..features import ALL, TripleSet
from .grammar import Constituent, Grammar, GrammarRule

UNKNOWN = "XXX"


@dataclass(frozen=True)
class TokenInput:
    text: str
    readings: Tuple[Tuple[str, TripleSet], ...]
    source: Optional[str] = None  # heuristic that produced the tag, if any

    @classmethod
    def simple(cls, text: str, *classes: str) -> "TokenInput":
        return cls(text, tuple((c, ALL) for c in (classes or (UNKNOWN,))))


@dataclass(frozen=True)
class Edge:
    start: int
    end: int
    category: str
    features: TripleSet
    rule: Optional[str] = None
    daughters: Tuple["Edge", ...] = ()
    token: Optional[int] = None
    assumed: Optional[str] = None
    display: Tuple[str, ...] = ()
    # features after top-down narrowing by the enclosing tree
    resolved: Optional[TripleSet] = field(default=None, compare=False)

    @property
    def is_token(self) -> bool:
        return self.token is not None

    @property
    def final(self) -> TripleSet:
        return self.resolved if self.resolved is not None else self.features

    @property
    def assumptions(self) -> List[Tuple[int, str]]:
        if self.is_token:
            return [(self.token, self.assumed)] if self.assumed else []
        return [a for d in self.daughters for a in d.assumptions]

    def leaves(self) -> Iterator["Edge"]:
        if self.is_token:
            yield self
        for d in self.daughters:
            yield from d.leaves()

    def signature(self) -> tuple:
        """Structure plus bottom-up features; equal signatures mean equal trees."""
        return (
            self.category, self.start, self.end, tuple(sorted(self.features)),
            self.rule, self.token, self.assumed,
            tuple(d.signature() for d in self.daughters),
        )

    def cost(self) -> Tuple[int, int]:
        """(assumed unknown tokens, summed phrase span lengths); lower is preferred."""
        spans = sum(e.end - e.start for e in self.phrases())
        return (len(self.assumptions), spans)

    def phrases(self) -> Iterator["Edge"]:
        if not self.is_token:
            yield self
            for d in self.daughters:
                yield from d.phrases()

    def bracketed(self) -> str:
        if self.is_token:
            cat = f"{self.category}>{self.assumed}" if self.assumed else self.category
            return f"{cat}#{self.token}"
        inner = " ".join(d.bracketed() for d in self.daughters)
        return f"({self.category}:{self.rule} {inner})"


@dataclass
class ChartNode:
    category: str
    start: int
    end: int
    features: TripleSet
    token: Optional[int] = None
    # (rule, children); token leaves have the single derivation (None, ())
    derivations: List[Tuple[Optional[GrammarRule], Tuple["ChartNode", ...]]] = field(
        default_factory=list, repr=False
    )

    @property
    def key(self):
        return (self.category, self.start, self.end, self.features)

    @property
    def is_token(self) -> bool:
        return self.token is not None


@dataclass
class ParseOptions:
    max_parses: Optional[int] = None
    max_covers: Optional[int] = None


@dataclass
class ParseResult:
    tokens: Sequence[TokenInput]
    complete: List[Edge]
    partial_cover: List[List[Edge]]
    chart: "Chart"


def matches(c: Constituent, node: ChartNode) -> bool:
    if node.category == c.category:
        return True
    return c.accepts_unknown and node.is_token and node.category == UNKNOWN


class Chart:
    def __init__(self, tokens: Sequence[TokenInput], grammar: Grammar):
        self.tokens = list(tokens)
        self.grammar = grammar
        self.n = len(self.tokens)
        self.nodes: Dict[tuple, ChartNode] = {}
        self.spans: Dict[Tuple[int, int], List[ChartNode]] = {}
        self._seen = set()
        self._best: Dict[tuple, tuple] = {}
        rules = grammar.rules
        self._unary = [r for r in rules if len(r.rhs) == 1]
        self._nary = [r for r in rules if len(r.rhs) > 1]
        self._fill()

    # -- construction ------------------------------------------------------------

    def _add(self, cat, start, end, feats, rule, children, token=None) -> Tuple[ChartNode, bool]:
        key = (cat, start, end, feats)
        node = self.nodes.get(key)
        created = node is None
        if created:
            node = ChartNode(cat, start, end, feats, token)
            self.nodes[key] = node
            self.spans.setdefault((start, end), []).append(node)
        elif token is not None and node.token is None:
            node.token = token
        dkey = (key, rule.id if rule else None, tuple(c.key for c in children))
        if dkey not in self._seen:
            self._seen.add(dkey)
            node.derivations.append((rule, tuple(children)))
        return node, created

    def _matching(self, c: Constituent, i: int, j: int) -> List[ChartNode]:
        return [nd for nd in self.spans.get((i, j), ()) if matches(c, nd) and nd.features & c.constraint]

    def _sequences(self, rule: GrammarRule, i: int, j: int):
        k = len(rule.rhs)
        out: List[List[ChartNode]] = []

        def rec(idx, pos, chosen):
            c = rule.rhs[idx]
            if idx == k - 1:
                for nd in self._matching(c, pos, j):
                    out.append(chosen + [nd])
                return
            for mid in range(pos + 1, j - (k - 1 - idx) + 1):
                for nd in self._matching(c, pos, mid):
                    rec(idx + 1, mid, chosen + [nd])

        rec(0, i, [])
        return out

    def _fill(self) -> None:
        for length in range(1, self.n + 1):
            for i in range(0, self.n - length + 1):
                j = i + length
                if length == 1:
                    for pos, feats in self.tokens[i].readings:
                        if feats:
                            self._add(pos, i, j, feats, None, (), token=i)
                for rule in self._nary:
                    if len(rule.rhs) > length:
                        continue
                    for seq in self._sequences(rule, i, j):
                        feats = rule.apply([nd.features for nd in seq])
                        if feats:
                            self._add(rule.lhs, i, j, feats, rule, seq)
                agenda = list(self.spans.get((i, j), ()))
                while agenda:
                    node = agenda.pop(0)
                    for rule in self._unary:
                        if not matches(rule.rhs[0], node):
                            continue
                        feats = rule.apply([node.features])
                        if feats:
                            new, created = self._add(rule.lhs, i, j, feats, rule, (node,))
                            if created:
                                agenda.append(new)

    # -- reading trees off the forest ---------------------------------------------

    def all_nodes(self) -> List[ChartNode]:
        return [nd for (i, j) in sorted(self.spans) for nd in self.spans[(i, j)]]

    def roots(self) -> List[ChartNode]:
        wanted = set(self.grammar.roots)
        return [nd for nd in self.spans.get((0, self.n), ()) if nd.category in wanted]

    @staticmethod
    def _slot_assumption(c: Optional[Constituent], child: ChartNode) -> Optional[str]:
        if c is not None and child.is_token and child.category == UNKNOWN and c.category != UNKNOWN:
            return c.category
        return None

    def _leaf(self, node: ChartNode, slot: Optional[Constituent]) -> Edge:
        return Edge(node.start, node.end, node.category, node.features, token=node.token,
                    assumed=self._slot_assumption(slot, node),
                    display=slot.display if slot else ())

    def _best_cost(self, node: ChartNode) -> tuple:
        if node.key in self._best:
            return self._best[node.key]
        best = None
        for index, (rule, children) in enumerate(node.derivations):
            if rule is None:
                cost = (0, 0)
            else:
                assumed = spans = 0
                for c, child in zip(rule.rhs, children):
                    ca, cs = self._best_cost(child)[0]
                    assumed += ca + (1 if self._slot_assumption(c, child) else 0)
                    spans += cs
                cost = (assumed, spans + node.end - node.start)
            if best is None or cost < best[0]:
                best = (cost, index)
        self._best[node.key] = best
        return best

    def best_tree(self, node: ChartNode, slot: Optional[Constituent] = None) -> Edge:
        _, index = self._best_cost(node)
        rule, children = node.derivations[index]
        if rule is None:
            return self._leaf(node, slot)
        daughters = tuple(self.best_tree(ch, c) for c, ch in zip(rule.rhs, children))
        return self._phrase(node, rule, daughters, slot)

    @staticmethod
    def _phrase(node, rule, daughters, slot) -> Edge:
        return Edge(node.start, node.end, node.category, node.features, rule.id, daughters,
                    display=slot.display if slot else ())

    def trees(self, node: ChartNode, slot: Optional[Constituent] = None) -> Iterator[Edge]:
        """Every tree packed into ``node`` (lazily; the count can be exponential)."""
        for rule, children in node.derivations:
            if rule is None:
                yield self._leaf(node, slot)
                continue
            for daughters in self._daughter_trees(rule, children, 0):
                yield self._phrase(node, rule, daughters, slot)

    def _daughter_trees(self, rule, children, idx) -> Iterator[Tuple[Edge, ...]]:
        if idx == len(children):
            yield ()
            return
        for head in self.trees(children[idx], rule.rhs[idx]):
            for rest in self._daughter_trees(rule, children, idx + 1):
                yield (head,) + rest

    def resolve(self, edge: Edge, final: Optional[TripleSet] = None) -> Edge:
        """Narrow daughter features top-down once the mother's value is known."""
        final = edge.features if final is None else final
        if edge.is_token:
            return dataclasses.replace(edge, resolved=final)
        rule = self.grammar.rule(edge.rule)
        narrowed = rule.resolve([d.features for d in edge.daughters], final)
        daughters = tuple(self.resolve(d, f) for d, f in zip(edge.daughters, narrowed))
        return dataclasses.replace(edge, daughters=daughters, resolved=final)


def _order_key(edge: Edge):
    return (edge.cost(), edge.bracketed())


def complete_parses(chart: Chart, max_parses: Optional[int] = None) -> List[Edge]:
    found: Dict[tuple, Edge] = {}
    for root in chart.roots():
        best = chart.best_tree(root)
        found.setdefault(best.signature(), best)
    budget = max_parses
    for root in chart.roots():
        for tree in chart.trees(root):
            if budget is not None and len(found) >= budget:
                break
            found.setdefault(tree.signature(), tree)
    ranked = sorted(found.values(), key=_order_key)
    if max_parses is not None:
        ranked = ranked[:max(max_parses, 1)]
    return [chart.resolve(t) for t in ranked]


def _fragment_key(chart: Chart, node: ChartNode):
    rule = chart.best_tree(node).rule or ""
    return (-(node.end - node.start), node.is_token, rule, node.category,
            F.format_triples(node.features))


def partial_cover(chart: Chart, n: Optional[int] = None,
                  limit: Optional[int] = None) -> List[List[Edge]]:
    """All tilings of the input with the fewest chart nodes, leftmost-longest first."""
    n = chart.n if n is None else n
    if n == 0:
        return [[]]
    starts: Dict[int, List[ChartNode]] = {}
    for node in chart.all_nodes():
        if node.end <= n:
            starts.setdefault(node.start, []).append(node)
    for i in starts:
        starts[i].sort(key=lambda nd: _fragment_key(chart, nd))
    inf = float("inf")
    rest = [inf] * (n + 1)
    rest[n] = 0
    for i in range(n - 1, -1, -1):
        for node in starts.get(i, ()):
            rest[i] = min(rest[i], 1 + rest[node.end])
    if rest[0] == inf:
        return []
    covers: List[List[Edge]] = []

    def walk(i, chosen):
        if limit is not None and len(covers) >= limit:
            return
        if i == n:
            covers.append([chart.resolve(chart.best_tree(nd)) for nd in chosen])
            return
        for node in starts.get(i, ()):
            if rest[i] == 1 + rest[node.end]:
                walk(node.end, chosen + [node])

    walk(0, [])
    return covers


def parse(tokens: Sequence[TokenInput], grammar: Grammar,
          opts: Optional[ParseOptions] = None) -> ParseResult:
    opts = opts or ParseOptions()
    chart = Chart(tokens, grammar)
    complete = complete_parses(chart, opts.max_parses)
    covers = [] if complete else partial_cover(chart, chart.n, opts.max_covers)
    return ParseResult(list(tokens), complete, covers, chart)


@dataclass(frozen=True)
class LexiconCandidate:
    token: str
    pos: str
    features: TripleSet
    source: str  # "AS" for an assumed class, else the heuristic name

    def as_tuple(self):
        return (self.token, self.pos, self.features)

    def to_line(self) -> str:
        return "\t".join([self.token, self.pos, "-", F.format_triples(self.features),
                          "candidate=parse", f"src={self.source}"])


def derive_lexicon_updates(result: ParseResult) -> List[LexiconCandidate]:
    """Candidate entries learned from the preferred complete parse; never committed."""
    if not result.complete:
        return []
    out: List[LexiconCandidate] = []
    for leaf in result.complete[0].leaves():
        tok = result.tokens[leaf.token]
        if leaf.assumed:
            cand = LexiconCandidate(tok.text, leaf.assumed, leaf.final, "AS")
        elif tok.source and len(leaf.final) == 1:
            cand = LexiconCandidate(tok.text, leaf.category, leaf.final, tok.source)
        else:
            continue
        if cand not in out:
            out.append(cand)
    return out
