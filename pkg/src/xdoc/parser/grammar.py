"""Feature-augmented context-free grammars organized in modules.

One file is one module.  Rule syntax::

    %module core
    %root NP PP
    NP2: NP[TYPE=FULL RULE CAS NUM GEN]@a -> DETD@a N@a
    NP3: NP[TYPE=FULL RULE CAS NUM GEN]@a -> DETI@a ADJ/XXX@a N@a
    NPC1: NP[TYPE=COMPLEX RULE GEN NUM CAS]@a -> NP@a NP[CAS=GEN]
    PP1: PP[CAS]@a -> PRP@a{CAS} NP@a

The bracket after the left-hand side lists the output attributes in order:
``KEY=VALUE`` constants, ``RULE`` for the rule id and ``CAS``/``NUM``/``GEN``
for projected agreement values.  On the right-hand side ``[...]`` holds
constant constraints, ``@g`` puts a constituent (or the left-hand side) into
agreement group ``g``, ``/XXX`` lets an unknown token fill the slot as an
assumed member of the category, and ``{CAS}`` lists features to display on a
token filling the slot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .. import features as F
from ..features import ALL, TripleSet

_RULE_RE = re.compile(r"\s*([\w.-]+)\s*:\s*(.*?)\s*->\s*(.*?)\s*$")
_LHS_RE = re.compile(r"([A-Za-z][\w.-]*)(?:\[([^\]]*)\])?(?:@(\w+))?$")
_CONST_RE = re.compile(
    r"([A-Za-z][\w.-]*?)(/XXX)?(?:\[([^\]]*)\])?(?:@(\w+))?(?:\{([^}]*)\})?(?=\s|$)"
)


class GrammarFormatError(ValueError):
    def __init__(self, reason: str, path: Optional[str] = None, line: Optional[int] = None):
        self.line = line
        where = f"{path or 'grammar'}:{line}: " if line else (f"{path}: " if path else "")
        super().__init__(where + reason)


class DuplicateRuleId(GrammarFormatError):
    pass


@dataclass(frozen=True)
class Constituent:
    category: str
    constraint: TripleSet = ALL
    group: Optional[str] = None
    accepts_unknown: bool = False
    display: Tuple[str, ...] = ()

    def __str__(self):
        text = self.category + ("/XXX" if self.accepts_unknown else "")
        if self.constraint != ALL:
            proj = F.project(self.constraint)
            items = [f"{d}={F.format_dimension(v, d)}" for d, v in proj.items()
                     if F.format_dimension(v, d) != "_"]
            text += "[" + " ".join(items) + "]"
        if self.group:
            text += "@" + self.group
        if self.display:
            text += "{" + " ".join(self.display) + "}"
        return text


@dataclass(frozen=True)
class GrammarRule:
    id: str
    lhs: str
    rhs: Tuple[Constituent, ...]
    lhs_group: Optional[str] = None
    # ("const", key, value) | ("rule",) | ("dim", CAS|NUM|GEN)
    output: Tuple[Tuple[str, ...], ...] = ()

    def __post_init__(self):
        if not self.rhs:
            raise GrammarFormatError(f"rule {self.id} has an empty right-hand side")
        counts: Dict[str, int] = {}
        for g in [self.lhs_group] + [c.group for c in self.rhs]:
            if g:
                counts[g] = counts.get(g, 0) + 1
        lonely = sorted(g for g, n in counts.items() if n < 2)
        if lonely:
            raise GrammarFormatError(
                f"rule {self.id}: agreement group(s) {lonely} name only one member"
            )

    def apply(self, daughters: Sequence[TripleSet]) -> Optional[TripleSet]:
        """Left-hand side features for these daughter features, or None on failure."""
        groups: Dict[str, TripleSet] = {}
        for c, feats in zip(self.rhs, daughters):
            eff = feats & c.constraint
            if not eff:
                return None
            if c.group:
                eff = groups.get(c.group, eff) & eff
                if not eff:
                    return None
                groups[c.group] = eff
        if self.lhs_group:
            return groups[self.lhs_group] if self.lhs_group in groups else ALL
        return ALL

    def resolve(self, daughters: Sequence[TripleSet], final: TripleSet) -> List[TripleSet]:
        """Daughter features narrowed by agreement once the mother's value is fixed."""
        groups: Dict[str, TripleSet] = {}
        for c, feats in zip(self.rhs, daughters):
            if c.group:
                groups[c.group] = groups.get(c.group, ALL) & feats & c.constraint
        if self.lhs_group in groups:
            groups[self.lhs_group] &= final
        result = []
        for c, feats in zip(self.rhs, daughters):
            eff = feats & c.constraint
            result.append(eff & groups[c.group] if c.group else eff)
        return result

    def __str__(self):
        items = []
        for item in self.output:
            if item[0] == "const":
                items.append(f"{item[1]}={item[2]}")
            elif item[0] == "rule":
                items.append("RULE")
            else:
                items.append(item[1])
        lhs = self.lhs + (f"[{' '.join(items)}]" if items else "")
        lhs += f"@{self.lhs_group}" if self.lhs_group else ""
        return f"{self.id}: {lhs} -> {' '.join(map(str, self.rhs))}"


@dataclass
class GrammarModule:
    name: str
    rules: List[GrammarRule] = field(default_factory=list)
    roots: Tuple[str, ...] = ()
    enabled: bool = True


@dataclass
class Grammar:
    modules: List[GrammarModule] = field(default_factory=list)

    def __post_init__(self):
        seen: Dict[str, str] = {}
        for module in self.modules:
            for rule in module.rules:
                if rule.id in seen:
                    raise DuplicateRuleId(
                        f"rule id {rule.id} defined in modules {seen[rule.id]} and {module.name}"
                    )
                seen[rule.id] = module.name
        _check_unary_cycles(self.rules)

    @property
    def rules(self) -> List[GrammarRule]:
        return [r for m in self.modules if m.enabled for r in m.rules]

    @property
    def roots(self) -> Tuple[str, ...]:
        declared = [c for m in self.modules if m.enabled for c in m.roots]
        if not declared:
            declared = [r.lhs for r in self.rules]
        return tuple(dict.fromkeys(declared))

    def rule(self, rule_id: str) -> GrammarRule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def with_module(self, module: GrammarModule) -> "Grammar":
        return Grammar(self.modules + [module])


def _check_unary_cycles(rules: Sequence[GrammarRule]) -> None:
    edges: Dict[str, set] = {}
    for r in rules:
        if len(r.rhs) == 1:
            edges.setdefault(r.rhs[0].category, set()).add(r.lhs)
    state: Dict[str, int] = {}

    def visit(cat, path):
        state[cat] = 1
        for nxt in sorted(edges.get(cat, ())):
            if state.get(nxt) == 1:
                raise GrammarFormatError(f"unary rule cycle through {' -> '.join(path + [nxt])}")
            if nxt not in state:
                visit(nxt, path + [nxt])
        state[cat] = 2

    for cat in sorted(edges):
        if cat not in state:
            visit(cat, [cat])


# -- parsing grammar text ------------------------------------------------------------


def _parse_constraints(text: str) -> TripleSet:
    ts = ALL
    for item in re.split(r"[\s,]+", text.strip()):
        if not item:
            continue
        dim, sep, values = item.partition("=")
        if not sep or dim not in F.DIMENSIONS:
            raise ValueError(f"bad constraint {item!r}")
        ts = F.restrict(ts, dim, F.parse_dimension(values, dim))
    return ts


def _parse_dims(text: str) -> Tuple[str, ...]:
    dims = tuple(d for d in re.split(r"[\s,]+", text.strip()) if d)
    for d in dims:
        if d not in F.DIMENSIONS:
            raise ValueError(f"unknown feature {d!r}")
    return dims


def parse_rule(line: str) -> GrammarRule:
    m = _RULE_RE.match(line)
    if not m:
        raise ValueError("expected 'ID: LHS -> C1 C2 ...'")
    rule_id, lhs_text, rhs_text = m.groups()
    lm = _LHS_RE.match(lhs_text)
    if not lm:
        raise ValueError(f"bad left-hand side {lhs_text!r}")
    lhs, items, lhs_group = lm.groups()
    output = []
    for item in (items or "").split():
        if "=" in item:
            key, value = item.split("=", 1)
            output.append(("const", key, value))
        elif item == "RULE":
            output.append(("rule",))
        elif item in F.DIMENSIONS:
            output.append(("dim", item))
        else:
            raise ValueError(f"bad output item {item!r}")
    rhs = []
    pos = 0
    rhs_text = rhs_text.strip()
    while pos < len(rhs_text):
        if rhs_text[pos].isspace():
            pos += 1
            continue
        cm = _CONST_RE.match(rhs_text, pos)
        if not cm or cm.end() == pos:
            raise ValueError(f"bad constituent at {rhs_text[pos:]!r}")
        cat, unknown, constraints, group, display = cm.groups()
        rhs.append(Constituent(
            cat,
            _parse_constraints(constraints) if constraints else ALL,
            group,
            bool(unknown),
            _parse_dims(display) if display else (),
        ))
        pos = cm.end()
    return GrammarRule(rule_id, lhs, tuple(rhs), lhs_group, tuple(output))


def parse_module(text: str, name: str = "grammar", path: Optional[str] = None) -> GrammarModule:
    module = GrammarModule(name)
    roots: List[str] = []
    ids = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("%module"):
            module.name = line.split(None, 1)[1].strip()
            continue
        if line.startswith("%root"):
            roots += line.split()[1:]
            continue
        if line.startswith("%"):
            raise GrammarFormatError(f"unknown directive {line.split()[0]}", path, lineno)
        try:
            rule = parse_rule(line)
        except ValueError as exc:
            raise GrammarFormatError(str(exc), path, lineno) from None
        if rule.id in ids:
            raise DuplicateRuleId(f"rule id {rule.id} defined twice", path, lineno)
        ids.add(rule.id)
        module.rules.append(rule)
    module.roots = tuple(roots)
    return module


def load_grammar(paths: Union[str, Path, Iterable[Union[str, Path]]],
                 disabled: Iterable[str] = ()) -> Grammar:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    off = set(disabled)
    modules = []
    for path in paths:
        path = Path(path)
        module = parse_module(path.read_text(encoding="utf-8"), path.stem, str(path))
        module.enabled = module.name not in off
        modules.append(module)
    return Grammar(modules)


def default_grammar(telegraphic: bool = True) -> Grammar:
    from ..resources import resource_path

    paths = [resource_path("core.gr")]
    if telegraphic:
        paths.append(resource_path("telegraphic.gr"))
    return load_grammar(paths)
