import re

import pytest
from hypothesis import given, settings, strategies as st

from xdoc.annotation import Element, TextSpan, iter_leaves, parse_xml, serialize_xml, text_content
from xdoc.sem import (
    CaseFrame, FormConstraint, FormSyntaxError, Phrase, RuleFormatError, SemLexFormatError,
    SemLexicon, Slot, annotate_relations, assign_slots, fill_frames, format_frame,
    frame_instances, interpret_structure, load_semlex, load_structural_rules, parse_form,
    parse_frame, sem_tag,
)

EXAMPLE7 = "Fertigen fester Koerper aus formlosem Stoff durch Schaffen des Zusammenhalts"


@pytest.fixture(scope="module")
def example7(parsed, semlex):
    return sem_tag(parsed(EXAMPLE7), semlex)


def test_parse_form_examples():
    assert parse_form("P(akk, fak, durch)") == FormConstraint("P", "akk", "fak", "durch")
    assert parse_form("N(gen, fak)") == FormConstraint("N", "gen", "fak")
    for bad in ("Q(x)", "N(gen)", "P(akk, fak)", "N(gen, fak, von)", "N(abl, fak)"):
        with pytest.raises(FormSyntaxError):
            parse_form(bad)


forms = st.one_of(
    st.builds(FormConstraint, st.just("N"), st.sampled_from(["nom", "gen", "dat", "akk"]),
              st.sampled_from(["fak", "obl"])),
    st.builds(FormConstraint, st.just("P"), st.sampled_from(["nom", "gen", "dat", "akk"]),
              st.sampled_from(["fak", "obl"]),
              st.text("abcdefghijklmnopqrstuvwxyzäöü", min_size=1, max_size=8)),
)


@settings(max_examples=300, deadline=None)
@given(forms)
def test_form_round_trip(form):
    assert parse_form(str(form)) == form


slots = st.builds(Slot, st.sampled_from(["RESULT", "SOURCE", "INSTRUMENT", "GOAL"]),
                  st.lists(forms, min_size=1, max_size=3).map(tuple),
                  st.sampled_from([None, "organ", "Prozess"]))


@settings(max_examples=200, deadline=None)
@given(st.lists(slots, max_size=4).map(tuple))
def test_frame_round_trip(frame_slots):
    frame = CaseFrame(frame_slots)
    assert parse_frame(format_frame(frame)) == frame


def test_example8_flat_tags(tagged, semlex):
    doc = sem_tag(tagged("Leber dunkelrot."), semlex, flat=True)
    s = doc.root.elements()[0]
    assert serialize_xml(s) == (
        '<S><CONCEPT TYPE="organ">Leber</CONCEPT> <PROPERTY TYPE="color">dunkelrot</PROPERTY>'
        '<XXX>.</XXX></S>'
    )


def test_wrap_mode_keeps_pos_and_is_idempotent(tagged, semlex):
    doc = sem_tag(tagged("Leber dunkelrot."), semlex)
    concept = doc.root.elements()[0].elements()[0]
    assert concept.name == "CONCEPT" and concept.elements()[0].name == "N"
    assert sem_tag(doc, semlex) == doc


def test_empty_semlex_gives_xxx(tagged):
    doc = sem_tag(tagged("Leber dunkelrot."), SemLexicon([]), flat=True)
    assert {e.name for e in iter_leaves(doc.root)} == {"XXX"}


def test_example7_frames(example7, semlex):
    found = {(r.holder, r.relation): r.filler for r in frame_instances(example7, semlex)}
    assert found[("Fertigen", "RESULT")] == "fester Koerper"
    assert found[("Fertigen", "SOURCE")] == "aus formlosem Stoff"
    assert found[("Fertigen", "INSTRUMENT")] == "durch Schaffen des Zusammenhalts"


def test_example7_dtd_and_ex7_shapes(example7, semlex):
    dtd = fill_frames(example7, semlex)
    concepts = next(dtd.root.iter("CONCEPTS"))
    fertigen = concepts.elements()[0]
    assert [e.name for e in fertigen.elements()] == ["WORD", "DESC", "SLOTS"]
    relation = fertigen.elements()[2].elements()[0]
    assert relation.get("TYPE") == "RESULT"
    assert [e.name for e in relation.elements()] == ["ASSIGN_TO", "FORM", "CONTENT"]
    assert text_content(relation.elements()[1]) == "N(gen, fak) P(akk, fak, von)"

    ex7 = fill_frames(example7, semlex, ex7_style=True)
    group = next(ex7.root.iter("RELATION"))
    assert [(e.name, e.get("FORM"), text_content(e)) for e in group.elements()] == [
        ("RESULT", "N(gen, fak) P(akk, fak, von)", "fester Koerper"),
        ("SOURCE", "P(dat, fak, aus)", "aus formlosem Stoff"),
        ("INSTRUMENT", "P(akk, fak, durch)", "durch Schaffen des Zusammenhalts"),
    ]
    assert parse_xml(serialize_xml(ex7)) == ex7


def test_concept_without_phrases_has_no_slots(parsed, semlex):
    doc = fill_frames(sem_tag(parsed("Fertigen."), semlex), semlex)
    concept = next(doc.root.iter("CONCEPTS")).elements()[0]
    assert [e.name for e in concept.elements()] == ["WORD", "DESC"]


def test_mit_not_assigned_to_durch_slot(parsed, semlex):
    doc = sem_tag(parsed("Fertigen mit Schaffen"), semlex)
    relations = {r.relation for r in frame_instances(doc, semlex) if r.holder == "Fertigen"}
    assert "INSTRUMENT" not in relations


def test_unsatisfiable_reading_dropped(tmp_path, parsed):
    path = tmp_path / "x.sem"
    path.write_text(
        "Fertigen\tCONCEPT\tProzess\tp\tINSTRUMENT:P(akk, obl, durch)\n"
        "Fertigen\tCONCEPT\tWerkstueck\tw\tSOURCE:P(dat, obl, aus)\n"
        "Stoff\tCONCEPT\tMaterial\tm\n"
    )
    semlex = load_semlex(path)
    doc = sem_tag(parsed("Fertigen aus Stoff"), semlex)
    concept = next(e for e in doc.root.iter("CONCEPT") if text_content(e) == "Fertigen")
    assert concept.get("ALT") == "CONCEPT:Werkstueck"
    filled = fill_frames(doc, semlex)
    inline = next(e for e in filled.root.iter("CONCEPT") if text_content(e) == "Fertigen")
    assert (inline.get("TYPE"), inline.get("ALT")) == ("Werkstueck", None)
    types = [c.get("TYPE") for c in next(filled.root.iter("CONCEPTS")).elements()]
    assert types == ["Werkstueck"]


def test_semlex_format_errors(tmp_path):
    path = tmp_path / "bad.sem"
    path.write_text("Leber\tTHING\torgan\n")
    with pytest.raises(SemLexFormatError):
        load_semlex(path)
    path.write_text("Leber\tCONCEPT\torgan\td\tRESULT:Q(x)\n")
    with pytest.raises(SemLexFormatError):
        load_semlex(path)


def test_has_color(tagged, semlex, structural_rules):
    doc = sem_tag(tagged("Leber dunkelrot."), semlex)
    rels = interpret_structure(doc, structural_rules)
    assert [(r.relation, r.holder, r.filler) for r in rels] == [("has-color", "Leber", "dunkelrot")]
    annotated = annotate_relations(doc, structural_rules)
    rel = next(annotated.root.iter("REL"))
    assert rel.attrs == [("NAME", "has-color"), ("ARG1", "Leber"), ("ARG2", "dunkelrot")]


def test_has_state_and_no_match(tagged, semlex, structural_rules):
    doc = sem_tag(tagged("Harnblase leer. Der Befund."), semlex)
    rels = interpret_structure(doc, structural_rules)
    assert [(r.relation, r.holder, r.filler, r.sentence) for r in rels] == [
        ("has-state", "Harnblase", "leer", 0)
    ]


def test_relations_follow_sentence_order(tagged, semlex, structural_rules):
    doc = sem_tag(tagged("Leber dunkelrot. Harnblase leer. Nierenoberflaeche glatt."), semlex)
    for rel in interpret_structure(doc, structural_rules):
        words = re.findall(r"\w+|[^\w\s]", text_content(doc.root.elements()[rel.sentence]))
        assert words.index(rel.holder) < words.index(rel.filler)


def test_rule_file_errors(tmp_path):
    path = tmp_path / "r.rules"
    path.write_text("bad: CONCEPT -> rel(1, 3)\n")
    with pytest.raises(RuleFormatError):
        load_structural_rules(path)


# slot soundness on synthetic phrases

phrases = st.builds(
    lambda kind, cases, prep, ctype: Phrase(
        kind, frozenset(cases), prep if kind == "P" else None, "x",
        Element("NP", [], [Element("CONCEPT", [("TYPE", ctype)], [TextSpan("x")])]),
    ),
    st.sampled_from(["N", "P"]),
    st.sets(st.sampled_from(["NOM", "GEN", "DAT", "AKK"]), min_size=1),
    st.sampled_from(["durch", "mit", "aus", "von"]),
    st.sampled_from(["organ", "Prozess", "Material"]),
)


@settings(max_examples=500, deadline=None)
@given(st.lists(slots, max_size=4).map(tuple), st.lists(phrases, max_size=5))
def test_slot_soundness(frame_slots, candidates):
    filled = assign_slots(CaseFrame(frame_slots), candidates)
    used = [id(p) for _, p, _ in filled]
    assert len(used) == len(set(used))
    for slot, phrase, form in filled:
        assert form in slot.forms
        assert form.kind == phrase.kind
        assert form.case.upper() in phrase.cases
        if form.kind == "P":
            assert form.preposition == phrase.preposition
        if slot.sem_type:
            assert slot.sem_type in phrase.concept_types()
