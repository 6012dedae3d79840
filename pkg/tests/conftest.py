import re

import pytest

from xdoc.annotation import AnnotatedDocument, Element, parse_xml, serialize_xml
from xdoc.morph import default_lexicon
from xdoc.parser import default_grammar, parse_document
from xdoc.postag import default_heuristics, tag_document
from xdoc.sem import default_semlex, default_structural_rules
from xdoc.structure import default_config, structure


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def heuristics():
    return default_heuristics()


@pytest.fixture(scope="session")
def grammar():
    return default_grammar()


@pytest.fixture(scope="session")
def semlex():
    return default_semlex()


@pytest.fixture(scope="session")
def structural_rules():
    return default_structural_rules()


@pytest.fixture(scope="session")
def tagged(config, lexicon, heuristics):
    def run(text):
        return tag_document(structure(text, config), lexicon, heuristics)
    return run


@pytest.fixture(scope="session")
def parsed(tagged, grammar):
    def run(text):
        return parse_document(tagged(text), grammar)
    return run


def compact(xml: str) -> str:
    """Drop layout whitespace between tags so pretty-printed listings compare to output."""
    xml = re.sub(r">\s+<", "><", xml.strip())
    xml = re.sub(r"\s+", " ", xml)
    return re.sub(r"\s*=\s*", "=", xml)


def strip_layout(node):
    """Element tree with whitespace-only text removed and text stripped."""
    if not isinstance(node, Element):
        return node
    kids = []
    for c in node.children:
        if isinstance(c, Element):
            kids.append(strip_layout(c))
        elif c.text.strip():
            kids.append(type(c)(" ".join(c.text.split())))
    return Element(node.name, list(node.attrs), kids)


def first_phrase(doc: AnnotatedDocument) -> Element:
    sentence = doc.root.elements()[0]
    return sentence.elements()[0]


# acceptance results, printed as a block at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
