"""Reading-order serialization of OCR tokens.

Extractive question answering wants a document as one text string, top
left to bottom right.  Tokens are grouped into lines by vertical-center
proximity, scaled to the document's own median token height so the rule
survives resolution changes, then each line reads left to right.
"""

from __future__ import annotations

from statistics import median

from .textspot import DocumentOcr, Token

__all__ = ["serialize_context"]


def serialize_context(doc: DocumentOcr, line_tolerance_factor: float = 0.5) -> str:
    """Concatenate a document's tokens in reading order.

    Tokens sort by vertical center; consecutive tokens share a line while
    their centers differ by less than ``line_tolerance_factor`` times the
    median token height.  Within a line, tokens order by x1 (then y1 and
    text, so any input permutation serializes identically).  Lines join
    with single spaces into one string.  A document with zero tokens
    serializes to the empty string.
    """
    if line_tolerance_factor < 0:
        raise ValueError(f"line_tolerance_factor must be >= 0, got {line_tolerance_factor}")
    if not doc.tokens:
        return ""
    tolerance = line_tolerance_factor * median(t.height for t in doc.tokens)
    ordered = sorted(doc.tokens, key=lambda t: (t.vcenter, t.bbox[1], t.bbox[0], t.text))
    lines: list[list[Token]] = []
    previous_center: float | None = None
    for token in ordered:
        if previous_center is None or token.vcenter - previous_center >= tolerance:
            lines.append([])
        lines[-1].append(token)
        previous_center = token.vcenter
    reading_order: list[Token] = []
    for line in lines:
        reading_order.extend(sorted(line, key=lambda t: (t.bbox[0], t.bbox[1], t.text)))
    return " ".join(t.text for t in reading_order)
