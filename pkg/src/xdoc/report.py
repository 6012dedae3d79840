"""Static HTML views of annotated documents for domain experts and developers."""

from __future__ import annotations

from html import escape
from typing import List, Tuple

from .annotation import AnnotatedDocument, Element, TextSpan, serialize_xml
from .sem import CONCEPT, PROPERTY, _units, sentence_elements

EXPERT = "expert"
DEVELOPER = "developer"
AUDIENCES = (EXPERT, DEVELOPER)

# attributes that document how a result was obtained rather than what it is
HIDDEN_FOR_EXPERTS = {"SRC", "AS", "RULE", "MORPH", "ALT"}

_STYLE = """
body { font-family: sans-serif; }
.CONCEPT { background: #cfe8ff; } .PROPERTY { background: #d6f5d6; }
.RELWORD { background: #ffe0b3; } .XXX { background: #f2f2f2; }
.N { border-bottom: 2px solid #3366cc; } .ADJ { border-bottom: 2px solid #33aa33; }
.V { border-bottom: 2px solid #cc3333; } .IP { color: #888; }
table { border-collapse: collapse; } td, th { border: 1px solid #999; padding: 2px 6px; }
ul.tree { font-family: monospace; }
"""


def concept_properties(doc: AnnotatedDocument) -> List[Tuple[str, str, str, str]]:
    """(concept, type, property, type) rows: each property goes to the nearest preceding concept."""
    rows = []
    for sentence in sentence_elements(doc.root):
        current = None
        for unit in _units(sentence):
            labels = [lab.split(":", 1) for lab in unit.types]
            if unit.category == CONCEPT:
                current = (unit.text, labels[0][1])
            elif unit.category == PROPERTY and current is not None:
                rows.append(current + (unit.text, labels[0][1]))
    return rows


def _expert_node(node, out: List[str]) -> None:
    if isinstance(node, TextSpan):
        out.append(escape(node.text))
        return
    if node.name in ("CONCEPTS", "REL"):
        return
    shown = [(k, v) for k, v in node.attrs if k not in HIDDEN_FOR_EXPERTS]
    title = " ".join(f"{k}={v}" for k, v in shown)
    out.append(f'<span class="{escape(node.name)}" title="{escape(node.name + " " + title).strip()}">')
    for child in node.children:
        _expert_node(child, out)
    out.append("</span>")


def _developer_tree(node: Element, out: List[str]) -> None:
    attrs = " ".join(f'{k}="{v}"' for k, v in node.attrs)
    out.append(f"<li><b>{escape(node.name)}</b> {escape(attrs)}")
    kids = [c for c in node.children if isinstance(c, Element) or c.text.strip()]
    if kids:
        out.append("<ul>")
        for child in kids:
            if isinstance(child, Element):
                _developer_tree(child, out)
            else:
                out.append(f"<li>&quot;{escape(child.text)}&quot;</li>")
        out.append("</ul>")
    out.append("</li>")


def render_report(doc: AnnotatedDocument, audience: str = EXPERT) -> str:
    if audience not in AUDIENCES:
        raise ValueError(f"audience must be one of {AUDIENCES}")
    out = ["<!DOCTYPE html>", "<html><head><meta charset=\"utf-8\">",
           f"<title>xdoc report ({audience})</title><style>{_STYLE}</style></head><body>"]
    if audience == EXPERT:
        out.append("<h1>Findings</h1><table><tr><th>Concept</th><th>Type</th>"
                   "<th>Property</th><th>Type</th></tr>")
        for row in concept_properties(doc):
            out.append("<tr>" + "".join(f"<td>{escape(c)}</td>" for c in row) + "</tr>")
        out.append("</table><h1>Text</h1>")
        for sentence in sentence_elements(doc.root):
            parts: List[str] = []
            for child in sentence.children:
                _expert_node(child, parts)
            out.append("<p>" + "".join(parts) + "</p>")
    else:
        out.append("<h1>Tree</h1><ul class=\"tree\">")
        _developer_tree(doc.root, out)
        out.append("</ul><h1>Raw XML</h1><pre>")
        out.append(escape(serialize_xml(doc)))
        out.append("</pre>")
    out.append("</body></html>")
    return "\n".join(out) + "\n"
