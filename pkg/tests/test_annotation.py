import pytest
from hypothesis import given, settings, strategies as st

from xdoc.annotation import (
    AnnotatedDocument, Element, MalformedXml, TextSpan, merge_text, parse_xml,
    serialize_xml, text_content, wrap_span,
)

NAMES = st.sampled_from(["S", "N", "NP", "PP", "IP", "ABBR", "MAT-ID", "x.y", "a_b", "Q1"])
# XML 1.0 character range minus surrogates; exercises escaping and non-ASCII
CHARS = st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00￾￿",
                      min_codepoint=1).filter(lambda c: c in "\t\n\r" or ord(c) >= 0x20)
TEXT = st.text(CHARS | st.sampled_from(list("<>&\"' \n\r\t")), min_size=1, max_size=12)


@st.composite
def elements(draw, depth=0):
    name = draw(NAMES)
    keys = draw(st.lists(NAMES, max_size=3, unique=True))
    attrs = [(k, draw(st.text(CHARS | st.sampled_from(list('<>&"\n\t\r')), max_size=6)))
             for k in keys]
    children = []
    if depth < 3:
        for _ in range(draw(st.integers(0, 4))):
            if draw(st.booleans()):
                children.append(TextSpan(draw(TEXT)))
            else:
                children.append(draw(elements(depth + 1)))
    return Element(name, attrs, merge_text(children))


documents = elements().map(AnnotatedDocument)


@settings(max_examples=1000, deadline=None)
@given(documents)
def test_round_trip(doc):
    assert parse_xml(serialize_xml(doc)) == doc


@settings(max_examples=200, deadline=None)
@given(documents)
def test_round_trip_with_declaration(doc):
    assert parse_xml(serialize_xml(doc, declaration=True).encode("utf-8")) == doc


@settings(max_examples=300, deadline=None)
@given(documents, st.data())
def test_wrap_span_keeps_text(doc, data):
    parents = [e for e in doc.root.iter() if e.children]
    if not parents:
        return
    parent = data.draw(st.sampled_from(parents))
    before = text_content(doc)
    start = data.draw(st.integers(0, len(parent.children) - 1))
    end = data.draw(st.integers(start, len(parent.children) - 1))
    count = len(parent.children)
    wrapper = wrap_span(parent, start, end, "W")
    assert text_content(doc) == before
    assert parent.children[start] is wrapper
    assert len(parent.children) == count - (end - start)
    assert parse_xml(serialize_xml(doc)).root is not None


def test_minimal_element():
    doc = parse_xml(b"<N>Leber</N>")
    assert doc.root == Element("N", [], [TextSpan("Leber")])
    assert text_content(doc.root) == "Leber"


def test_example_fragment_interleaves_text():
    doc = parse_xml("<S>Anwesend<IP>:</IP> <ABBR>Univ.-Prof.</ABBR> <ABBR>Dr.</ABBR></S>")
    kinds = [type(c).__name__ for c in doc.root.children]
    assert kinds == ["TextSpan", "Element", "TextSpan", "Element", "TextSpan", "Element"]
    assert [e.name for e in doc.root.elements()] == ["IP", "ABBR", "ABBR"]


def test_serialize_escapes_and_keeps_order():
    pp = Element("PP", [("CAS", "DAT"), ("A", 'x"<y')], [TextSpan("a<b & c>")])
    assert serialize_xml(pp) == '<PP CAS="DAT" A="x&quot;&lt;y">a&lt;b &amp; c&gt;</PP>'


def test_empty_element_text():
    assert text_content(Element("X")) == ""
    assert serialize_xml(Element("X")) == "<X/>"


@pytest.mark.parametrize("bad", [
    b"<A><B></A></B>",
    b"<A>&nope;</A>",
    b"<A><!-- c --></A>",
    b"<A><![CDATA[x]]></A>",
    b"<A><?pi x?></A>",
    b"<!DOCTYPE A><A/>",
    b"<1A/>",
    b"",
    b"<A x='1' x='2'/>",
])
def test_malformed(bad):
    with pytest.raises(MalformedXml) as info:
        parse_xml(bad)
    assert info.value.position[0] >= 1


def test_whitespace_preserved():
    src = "<S>a \n\t b<N>  x  </N></S>"
    assert serialize_xml(parse_xml(src)) == src


def test_wrap_span_bad_range():
    parent = Element("S", [], [Element("DETD"), TextSpan(" "), Element("N")])
    with pytest.raises(IndexError):
        wrap_span(parent, 2, 1, "NP")
    with pytest.raises(IndexError):
        wrap_span(parent, 0, 3, "NP")


def test_wrap_span_np_shape():
    parent = parse_xml("<S><DETD>der</DETD> <N>Leber</N></S>").root
    wrap_span(parent, 0, 2, "NP", [("TYPE", "FULL"), ("RULE", "NP2")])
    assert serialize_xml(parent) == '<S><NP TYPE="FULL" RULE="NP2"><DETD>der</DETD> <N>Leber</N></NP></S>'


def test_element_rejects_bad_names():
    with pytest.raises(ValueError):
        Element("1X")
    with pytest.raises(ValueError):
        Element("X", [("a", "1"), ("a", "2")])
    with pytest.raises(ValueError):
        TextSpan("")
