import pytest

from xdoc import features as F
from xdoc.features import ALL
from xdoc.morph import (
    LexEntry, LexiconFormatError, UnknownParadigm, analyze, inflect, load_lexicon,
)

from oracles import duality_failures


def test_generation_analysis_duality(lexicon):
    assert lexicon.open_class_entries()
    assert duality_failures(lexicon) == []


def test_der_is_determiner_or_relative_pronoun(lexicon):
    readings = {a.pos: a.features for a in analyze("der", lexicon)}
    assert set(readings) == {"DETD", "RELPRON"}
    expected = F.triples(["NOM"], ["SG"], ["MAS"]) | F.triples(["GEN", "DAT"], ["SG"], ["FEM"]) \
        | F.triples(["GEN"], ["PL"])
    assert readings["DETD"] == expected


def test_liebe_is_verb_or_adjective(lexicon):
    readings = analyze("liebe", lexicon)
    assert {a.pos for a in readings} == {"V", "ADJ"}
    verb = next(a for a in readings if a.pos == "V")
    assert verb.lemma == "lieben" and "1SG" in verb.forms


def test_uncoded_token(lexicon):
    assert analyze("Blutanhaftungen", lexicon) == set()


def test_examples_tokens_load(lexicon):
    for word in ("der", "kein", "in", "an", "durch", "des"):
        assert analyze(word, lexicon), word


def test_sentence_initial_lowercase_fallback(lexicon):
    assert analyze("Die", lexicon) == set()
    assert {a.pos for a in analyze("Die", lexicon, initial=True)} == {"DETD", "RELPRON"}


def test_analyze_deterministic(lexicon):
    assert analyze("Koerpers", lexicon) == analyze("Koerpers", lexicon)


def test_inflect_plural_and_full_table(lexicon):
    frau = next(e for e in lexicon.entries if e.root == "Frau")
    assert inflect(frau, F.triples(num=["PL"]), lexicon) == {"Frauen"}
    assert inflect(frau, ALL, lexicon) == {"Frau", "Frauen"}


def test_unknown_paradigm(lexicon):
    with pytest.raises(UnknownParadigm):
        inflect(LexEntry("Foo", "N", "NOPE"), ALL, lexicon)
    with pytest.raises(UnknownParadigm):
        inflect(LexEntry("und", "KONJ"), ALL, lexicon)


def test_empty_lexicon(tmp_path):
    path = tmp_path / "empty.lex"
    path.write_text("")
    assert len(load_lexicon(path)) == 0


@pytest.mark.parametrize("line", [
    "foo\tBLAH\t-\t_",
    "foo\tN\tMISSING\t_",
    "foo\tDETD\tN-S-E\t_",
    "foo\tN",
    "foo\tN\t-\tNOM.SG",
    "%paradigm\tP\tN\tNOM.SG.*=0",
])
def test_format_errors(tmp_path, line):
    path = tmp_path / "bad.lex"
    path.write_text(line + "\n")
    with pytest.raises(LexiconFormatError):
        load_lexicon(path)


def test_prepositions_govern_case(lexicon):
    [durch] = analyze("durch", lexicon)
    assert F.project(durch.features)["CAS"] == {"AKK"}
