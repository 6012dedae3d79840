"""Inline XML annotation model shared by every processing stage.

A document is a properly nested tree of :class:`Element` and :class:`TextSpan`
nodes.  Overlapping markup cannot be represented, and the concatenation of all
text leaves is the character content of the document.

Only a small XML subset is read and written: elements, attributes, character
data, the predefined entities and character references.  Comments, CDATA
sections, processing instructions and doctype declarations are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple, Union
from xml.parsers import expat

__all__ = [
    "AnnotatedDocument",
    "Element",
    "TextSpan",
    "MalformedXml",
    "parse_xml",
    "serialize_xml",
    "wrap_span",
    "text_content",
    "is_valid_name",
]

XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>'

_NAME_RE = re.compile(r"[^\W\d][\w.:-]*\Z")


def is_valid_name(name: str) -> bool:
    return bool(_NAME_RE.match(name))


class MalformedXml(ValueError):
    """Raised when input is not a well-formed document of the supported subset."""

    def __init__(self, position: Tuple[int, int], reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"line {position[0]}, column {position[1]}: {reason}")


@dataclass(frozen=True)
class TextSpan:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("TextSpan text must be non-empty")


@dataclass(eq=True)
class Element:
    name: str
    attrs: List[Tuple[str, str]] = field(default_factory=list)
    children: List["Node"] = field(default_factory=list)

    def __post_init__(self):
        if not is_valid_name(self.name):
            raise ValueError(f"invalid tag name {self.name!r}")
        seen = set()
        for key, value in self.attrs:
            if not is_valid_name(key):
                raise ValueError(f"invalid attribute name {key!r}")
            if key in seen:
                raise ValueError(f"duplicate attribute {key!r} on <{self.name}>")
            seen.add(key)
        self.attrs = [(k, str(v)) for k, v in self.attrs]

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        for k, v in self.attrs:
            if k == key:
                return v
        return default

    def set(self, key: str, value: str) -> None:
        """Set an attribute, keeping its position if it already exists."""
        if not is_valid_name(key):
            raise ValueError(f"invalid attribute name {key!r}")
        for i, (k, _) in enumerate(self.attrs):
            if k == key:
                self.attrs[i] = (key, str(value))
                return
        self.attrs.append((key, str(value)))

    def remove(self, key: str) -> None:
        self.attrs = [(k, v) for k, v in self.attrs if k != key]

    def elements(self) -> List["Element"]:
        return [c for c in self.children if isinstance(c, Element)]

    def iter(self, name: Optional[str] = None) -> Iterator["Element"]:
        """Depth-first pre-order walk over this element and its descendants."""
        if name is None or self.name == name:
            yield self
        for child in self.children:
            if isinstance(child, Element):
                yield from child.iter(name)

    @property
    def is_leaf(self) -> bool:
        return all(isinstance(c, TextSpan) for c in self.children)


Node = Union[Element, TextSpan]


@dataclass(eq=True)
class AnnotatedDocument:
    root: Element

    def text(self) -> str:
        return text_content(self.root)


# -- parsing -----------------------------------------------------------------


class _TreeBuilder:
    def __init__(self, parser):
        self.parser = parser
        self.stack: List[Element] = []
        self.root: Optional[Element] = None
        self.pending: List[str] = []

    def _fail(self, reason: str):
        raise MalformedXml(
            (self.parser.CurrentLineNumber, self.parser.CurrentColumnNumber), reason
        )

    def _flush(self):
        if self.pending:
            text = "".join(self.pending)
            self.pending = []
            if self.stack:
                self.stack[-1].children.append(TextSpan(text))
            elif text.strip():
                self._fail("character data outside the root element")

    def start(self, name, attrs):
        self._flush()
        if not is_valid_name(name):
            self._fail(f"bad tag name {name!r}")
        pairs = list(zip(attrs[0::2], attrs[1::2]))
        for key, _ in pairs:
            if not is_valid_name(key):
                self._fail(f"bad attribute name {key!r}")
        elem = Element(name, pairs)
        if self.stack:
            self.stack[-1].children.append(elem)
        else:
            self.root = elem
        self.stack.append(elem)

    def end(self, name):
        self._flush()
        self.stack.pop()

    def data(self, text):
        self.pending.append(text)

    def unsupported(self, what):
        def handler(*_args):
            self._fail(f"{what} not supported")

        return handler


def parse_xml(data: Union[bytes, str]) -> AnnotatedDocument:
    """Parse UTF-8 XML into a document tree; whitespace in text is kept verbatim."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    parser = expat.ParserCreate("UTF-8")
    parser.ordered_attributes = True
    parser.buffer_text = True
    builder = _TreeBuilder(parser)
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.data
    parser.CommentHandler = builder.unsupported("comments")
    parser.StartCdataSectionHandler = builder.unsupported("CDATA sections")
    parser.ProcessingInstructionHandler = builder.unsupported("processing instructions")
    parser.StartDoctypeDeclHandler = builder.unsupported("doctype declarations")
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise MalformedXml((exc.lineno, exc.offset), expat.ErrorString(exc.code)) from None
    if builder.root is None:
        raise MalformedXml((1, 0), "no root element")
    return AnnotatedDocument(builder.root)


# -- serialization -------------------------------------------------------------

_TEXT_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;", "\r": "&#13;"}
_ATTR_ESCAPES = dict(_TEXT_ESCAPES, **{'"': "&quot;", "\n": "&#10;", "\t": "&#9;"})
_TEXT_RE = re.compile("[&<>\r]")
_ATTR_RE = re.compile('[&<>"\r\n\t]')


def _escape_text(text: str) -> str:
    return _TEXT_RE.sub(lambda m: _TEXT_ESCAPES[m.group()], text)


def _escape_attr(text: str) -> str:
    return _ATTR_RE.sub(lambda m: _ATTR_ESCAPES[m.group()], text)


def _write(node: Node, out: List[str]) -> None:
    if isinstance(node, TextSpan):
        out.append(_escape_text(node.text))
        return
    out.append("<" + node.name)
    for key, value in node.attrs:
        out.append(f' {key}="{_escape_attr(value)}"')
    if not node.children:
        out.append("/>")
        return
    out.append(">")
    for child in node.children:
        _write(child, out)
    out.append(f"</{node.name}>")


def serialize_xml(
    doc: Union[AnnotatedDocument, Node], declaration: bool = False
) -> str:
    """Deterministic serialization: stored attribute order, no added whitespace."""
    node = doc.root if isinstance(doc, AnnotatedDocument) else doc
    out: List[str] = []
    if declaration:
        out.append(XML_DECLARATION + "\n")
    _write(node, out)
    if declaration:
        out.append("\n")
    return "".join(out)


# -- tree operations -------------------------------------------------------------


def wrap_span(
    parent: Element,
    start: int,
    end: int,
    name: str,
    attrs: Sequence[Tuple[str, str]] = (),
) -> Element:
    """Reparent ``parent.children[start..end]`` (inclusive) under a new element."""
    if not 0 <= start <= end < len(parent.children):
        raise IndexError(
            f"cannot wrap children {start}..{end} of <{parent.name}> "
            f"with {len(parent.children)} children"
        )
    wrapper = Element(name, list(attrs), parent.children[start : end + 1])
    parent.children[start : end + 1] = [wrapper]
    return wrapper


def text_content(node: Union[AnnotatedDocument, Node]) -> str:
    if isinstance(node, AnnotatedDocument):
        node = node.root
    if isinstance(node, TextSpan):
        return node.text
    return "".join(text_content(c) for c in node.children)


def merge_text(children: Sequence[Node]) -> List[Node]:
    """Coalesce adjacent text spans (the parser never yields them split)."""
    merged: List[Node] = []
    for child in children:
        if isinstance(child, TextSpan) and merged and isinstance(merged[-1], TextSpan):
            merged[-1] = TextSpan(merged[-1].text + child.text)
        else:
            merged.append(child)
    return merged


def iter_leaves(node: Element, skip: Sequence[str] = ("CONCEPTS",)) -> Iterator[Element]:
    """Non-empty elements whose children are all text, in document order."""
    for child in node.children:
        if not isinstance(child, Element) or child.name in skip:
            continue
        if child.is_leaf:
            if child.children:
                yield child
        else:
            yield from iter_leaves(child, skip)


def iter_parents(root: Element) -> Iterator[Tuple[Element, Element]]:
    """``(parent, child)`` pairs for every element below ``root``."""
    for child in root.children:
        if isinstance(child, Element):
            yield root, child
            yield from iter_parents(child)
