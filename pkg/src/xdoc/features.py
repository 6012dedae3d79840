"""Case/number/gender agreement features.

Internally a feature value is a frozenset of ``(case, number, gender)``
triples; this represents forms like ``der`` (NOM SG MAS, GEN SG FEM, DAT SG
FEM, GEN PL *) faithfully.  Per-dimension :class:`FeatureBundle` views are used
for heuristics and for display only.

Text notation used in resource files and in the ``MORPH`` attribute::

    _                       all 24 triples
    NOM.SG.MAS              one triple
    NOM|AKK.SG.NTR          alternatives inside one dimension
    GEN.PL.*                wildcard dimension
    NOM.SG.MAS,GEN.PL.*     union of several items
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

CASES = ("NOM", "GEN", "DAT", "AKK")
NUMBERS = ("SG", "PL")
GENDERS = ("MAS", "FEM", "NTR")
DIMENSIONS = {"CAS": CASES, "NUM": NUMBERS, "GEN": GENDERS}
_DIM_INDEX = {"CAS": 0, "NUM": 1, "GEN": 2}

Triple = Tuple[str, str, str]
TripleSet = FrozenSet[Triple]

ALL: TripleSet = frozenset(product(CASES, NUMBERS, GENDERS))


class FeatureSyntaxError(ValueError):
    pass


def triples(cas: Iterable[str] = CASES, num: Iterable[str] = NUMBERS,
            gen: Iterable[str] = GENDERS) -> TripleSet:
    return frozenset(product(cas, num, gen))


def unify(a: TripleSet, b: TripleSet) -> Optional[TripleSet]:
    """Intersection of admissible triples; ``None`` signals failure."""
    result = a & b
    return result or None


def restrict(ts: TripleSet, dim: str, values: Iterable[str]) -> TripleSet:
    idx = _DIM_INDEX[dim]
    allowed = set(values)
    return frozenset(t for t in ts if t[idx] in allowed)


def project(ts: TripleSet) -> Dict[str, FrozenSet[str]]:
    return {dim: frozenset(t[i] for t in ts) for dim, i in _DIM_INDEX.items()}


def format_dimension(values: Iterable[str], dim: str) -> str:
    values = set(values)
    domain = DIMENSIONS[dim]
    if values >= set(domain) or not values:
        return "_"
    return "|".join(v for v in domain if v in values)


def parse_dimension(text: str, dim: str) -> FrozenSet[str]:
    domain = DIMENSIONS[dim]
    if text in ("_", "*"):
        return frozenset(domain)
    values = frozenset(text.split("|"))
    bad = values - set(domain)
    if bad:
        raise FeatureSyntaxError(f"unknown {dim} value(s) {sorted(bad)}")
    return values


@dataclass(frozen=True)
class FeatureBundle:
    """Per-dimension value sets; an absent constraint is the full domain."""

    cas: FrozenSet[str] = frozenset(CASES)
    num: FrozenSet[str] = frozenset(NUMBERS)
    gen: FrozenSet[str] = frozenset(GENDERS)

    def __post_init__(self):
        for dim, values in (("CAS", self.cas), ("NUM", self.num), ("GEN", self.gen)):
            if not values:
                raise ValueError(f"empty {dim} set is a unification failure, not a bundle")
            if not set(values) <= set(DIMENSIONS[dim]):
                raise ValueError(f"bad {dim} values {sorted(values)}")

    @classmethod
    def from_triples(cls, ts: TripleSet) -> "FeatureBundle":
        p = project(ts)
        return cls(p["CAS"], p["NUM"], p["GEN"])

    def triples(self) -> TripleSet:
        return triples(self.cas, self.num, self.gen)

    def attributes(self, order=("CAS", "NUM", "GEN")):
        values = {"CAS": self.cas, "NUM": self.num, "GEN": self.gen}
        return [(dim, format_dimension(values[dim], dim)) for dim in order]


def parse_triples(text: str) -> TripleSet:
    text = text.strip()
    if text == "_":
        return ALL
    result = set()
    for item in text.split(","):
        parts = item.strip().split(".")
        if len(parts) != 3:
            raise FeatureSyntaxError(f"feature item {item!r} is not CAS.NUM.GEN")
        result.update(product(parse_dimension(parts[0], "CAS"),
                              parse_dimension(parts[1], "NUM"),
                              parse_dimension(parts[2], "GEN")))
    if not result:
        raise FeatureSyntaxError("empty feature set")
    return frozenset(result)


def _fmt(values, dim):
    text = format_dimension(values, dim)
    return "*" if text == "_" else text


def format_triples(ts: TripleSet) -> str:
    """Compact, deterministic text form of a triple set (inverse of parse_triples)."""
    if ts == ALL:
        return "_"
    # factor into rectangles: first collect case sets per (num, gen) ...
    by_ng: Dict[Tuple[str, str], set] = {}
    for c, n, g in ts:
        by_ng.setdefault((n, g), set()).add(c)
    # ... then merge genders sharing (case set, num), then numbers sharing the rest
    by_cn: Dict[Tuple[FrozenSet[str], str], set] = {}
    for (n, g), cs in by_ng.items():
        by_cn.setdefault((frozenset(cs), n), set()).add(g)
    by_cg: Dict[Tuple[FrozenSet[str], FrozenSet[str]], set] = {}
    for (cs, n), gs in by_cn.items():
        by_cg.setdefault((cs, frozenset(gs)), set()).add(n)
    items = []
    for (cs, gs), ns in by_cg.items():
        items.append(
            (
                min(CASES.index(c) for c in cs),
                min(NUMBERS.index(n) for n in ns),
                min(GENDERS.index(g) for g in gs),
                f"{_fmt(cs, 'CAS')}.{_fmt(ns, 'NUM')}.{_fmt(gs, 'GEN')}",
            )
        )
    return ",".join(text for *_, text in sorted(items))
