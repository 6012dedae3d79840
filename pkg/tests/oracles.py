"""Independent reference implementations used to check the real ones.

Nothing here calls into the chart parser; feature checks are re-derived from
the grammar rule fields directly.
"""

import itertools
import random

from xdoc import features as F
from xdoc.features import ALL
from xdoc.morph import analyze, inflect
from xdoc.parser import TokenInput
from xdoc.parser.grammar import Grammar, GrammarFormatError, parse_module

UNKNOWN = "XXX"
TOKEN_CLASSES = ("A", "B", "C", "D")
PHRASES = ("X", "Y", "Z")


class TooAmbiguous(Exception):
    pass


# -- unification ----------------------------------------------------------------------


def unify_by_enumeration(a, b):
    """Walk all 24 triples and keep those admitted by both sides."""
    keep = [t for t in itertools.product(F.CASES, F.NUMBERS, F.GENDERS) if t in a and t in b]
    return frozenset(keep) if keep else None


# -- morphology ------------------------------------------------------------------------


def duality_failures(lex):
    """Every (entry, feature combination, form) whose analysis misses the entry."""
    failures = []
    for entry in lex.open_class_entries():
        paradigm = lex.paradigms[entry.paradigm]
        requests = [({t}, None) for t in sorted(ALL)]
        requests += [(ALL, [label]) for label in sorted({c[1] for c in paradigm.cells if c[1]})]
        for feats, labels in requests:
            for surface in inflect(entry, frozenset(feats), lex, forms=labels):
                readings = analyze(surface, lex)
                ok = any(
                    a.lemma == entry.lemma and a.pos == entry.pos
                    and (a.features & frozenset(feats))
                    and (labels is None or entry.pos != "V" or set(labels) <= a.forms)
                    for a in readings
                )
                if not ok:
                    failures.append((entry.root, entry.pos, sorted(feats)[:1], labels, surface))
    return failures


# -- brute-force parsing ----------------------------------------------------------------


def _compositions(i, j, k):
    """All ways to cut [i, j) into k non-empty consecutive pieces."""
    if k == 1:
        yield [(i, j)]
        return
    for mid in range(i + 1, j - k + 2):
        for rest in _compositions(mid, j, k - 1):
            yield [(i, mid)] + rest


def _agree(rule, daughter_feats):
    groups = {}
    for c, feats in zip(rule.rhs, daughter_feats):
        eff = frozenset(t for t in feats if t in c.constraint)
        if not eff:
            return None
        if c.group is not None:
            if c.group in groups:
                eff = frozenset(t for t in groups[c.group] if t in eff)
                if not eff:
                    return None
            groups[c.group] = eff
    if rule.lhs_group is not None and rule.lhs_group in groups:
        return groups[rule.lhs_group]
    return F.ALL


def brute_force_parses(tokens, grammar, limit=20000):
    """Signatures of every tree over the whole input rooted in a root category."""
    rules = grammar.rules
    memo = {}

    def trees(cat, i, j, licensed):
        key = (cat, i, j, licensed)
        if key in memo:
            return memo[key]
        found = []
        if j == i + 1:
            for pos, feats in tokens[i].readings:
                if pos == cat:
                    found.append(((pos, i, j, tuple(sorted(feats)), None, i, None, ()), feats))
                elif licensed and pos == UNKNOWN:
                    found.append(((pos, i, j, tuple(sorted(feats)), None, i, cat, ()), feats))
        for rule in rules:
            if rule.lhs != cat or len(rule.rhs) > j - i:
                continue
            for pieces in _compositions(i, j, len(rule.rhs)):
                options = [trees(c.category, a, b, c.accepts_unknown and c.category != UNKNOWN)
                           for c, (a, b) in zip(rule.rhs, pieces)]
                for combo in itertools.product(*options):
                    feats = _agree(rule, [f for _, f in combo])
                    if feats is None:
                        continue
                    sig = (cat, i, j, tuple(sorted(feats)), rule.id, None, None,
                           tuple(s for s, _ in combo))
                    found.append((sig, feats))
                    if len(found) > limit:
                        raise TooAmbiguous()
        memo[key] = found
        return found

    n = len(tokens)
    result = set()
    for root in grammar.roots:
        for sig, _ in trees(root, 0, n, False):
            result.add(sig)
    return result


# -- exhaustive tiling --------------------------------------------------------------------


def all_tilings(spans, n):
    """Every tiling of [0, n) by chart nodes, as tuples of nodes."""
    by_start = {}
    for (i, j), nodes in spans.items():
        by_start.setdefault(i, []).extend(nodes)
    out = []

    def walk(i, chosen):
        if i == n:
            out.append(tuple(chosen))
            return
        for node in by_start.get(i, ()):
            walk(node.end, chosen + [node])

    walk(0, [])
    return out


# -- random instances ---------------------------------------------------------------------


def random_triples(rng):
    if rng.random() < 0.4:
        return F.ALL
    cas = rng.sample(F.CASES, rng.randint(1, 4))
    num = rng.sample(F.NUMBERS, rng.randint(1, 2))
    gen = rng.sample(F.GENDERS, rng.randint(1, 3))
    ts = F.triples(cas, num, gen)
    if rng.random() < 0.3:
        ts |= F.triples(rng.sample(F.CASES, 1), rng.sample(F.NUMBERS, 1), rng.sample(F.GENDERS, 1))
    return ts


def _constraint_text(rng):
    if rng.random() < 0.7:
        return ""
    dim = rng.choice(sorted(F.DIMENSIONS))
    domain = F.DIMENSIONS[dim]
    values = rng.sample(domain, rng.randint(1, len(domain)))
    return f"[{dim}={'|'.join(values)}]"


def random_rule_line(rng, index):
    lhs = rng.choice(PHRASES)
    k = rng.choice((1, 1, 2, 2, 2, 3))
    cats = [rng.choice(TOKEN_CLASSES + PHRASES) for _ in range(k)]
    in_group = [rng.random() < 0.5 for _ in range(k)]
    lhs_group = rng.random() < 0.5
    if sum(in_group) + lhs_group < 2:
        in_group = [False] * k
        lhs_group = False
    parts = []
    for cat, grouped in zip(cats, in_group):
        text = cat
        if cat in TOKEN_CLASSES and rng.random() < 0.25:
            text += "/XXX"
        text += _constraint_text(rng)
        if grouped:
            text += "@a"
        parts.append(text)
    head = f"{lhs}[RULE CAS NUM GEN]" + ("@a" if lhs_group else "")
    return f"R{index}: {head} -> {' '.join(parts)}"


def random_grammar(rng, max_rules=15):
    while True:
        count = rng.randint(1, max_rules)
        lines = [random_rule_line(rng, i) for i in range(count)]
        roots = rng.sample(PHRASES, rng.randint(1, len(PHRASES)))
        text = f"%root {' '.join(roots)}\n" + "\n".join(lines) + "\n"
        try:
            return Grammar([parse_module(text, "random")]), text
        except GrammarFormatError:
            continue  # unary cycle; draw again


def random_tokens(rng, max_len=8):
    n = rng.randint(1, max_len)
    tokens = []
    for i in range(n):
        classes = rng.sample(TOKEN_CLASSES + (UNKNOWN,), rng.randint(1, 2))
        readings = tuple((c, F.ALL if c == UNKNOWN else random_triples(rng)) for c in classes)
        tokens.append(TokenInput(f"t{i}", readings))
    return tokens


def sampled_tokens(rng, grammar, max_len=8):
    """Tokens read off a random top-down expansion, so most instances do parse."""
    by_lhs = {}
    for rule in grammar.rules:
        by_lhs.setdefault(rule.lhs, []).append(rule)

    def expand(cat, depth):
        if cat in TOKEN_CLASSES:
            return [cat]
        options = by_lhs.get(cat)
        if not options or depth > 6:
            return None
        rule = rng.choice(options)
        out = []
        for c in rule.rhs:
            part = expand(c.category, depth + 1)
            if part is None:
                return None
            if c.accepts_unknown and len(part) == 1 and rng.random() < 0.5:
                part = [UNKNOWN]
            out += part
        return out

    for _ in range(20):
        cats = expand(rng.choice(grammar.roots), 0)
        if cats and len(cats) <= max_len:
            break
    else:
        return random_tokens(rng, max_len)
    tokens = []
    for i, cat in enumerate(cats):
        readings = [(cat, F.ALL if cat == UNKNOWN or rng.random() < 0.5 else random_triples(rng))]
        if rng.random() < 0.3:
            other = rng.choice([c for c in TOKEN_CLASSES + (UNKNOWN,) if c != cat])
            readings.append((other, F.ALL if other == UNKNOWN else random_triples(rng)))
        tokens.append(TokenInput(f"t{i}", tuple(readings)))
    return tokens


def random_instance(seed):
    """(grammar, tokens) for one oracle comparison."""
    rng = random.Random(seed)
    grammar, _ = random_grammar(rng)
    tokens = sampled_tokens(rng, grammar) if rng.random() < 0.7 else random_tokens(rng)
    return grammar, tokens


def instance_rng(seed):
    return random.Random(seed)
