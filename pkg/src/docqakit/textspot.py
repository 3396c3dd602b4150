"""Keyword spotting over OCR output for evidence ranking.

Ranks every document in a collection by how well its recognized words
cover the content words of a question: confidence is one minus the mean,
over question keywords, of each keyword's minimum normalized Levenshtein
distance to any document token.  A document containing every keyword
verbatim scores 1.0; spotting tolerates OCR noise because near-misses
still contribute most of their similarity.

Keyword extraction defaults to a lexicon heuristic standing in for a POS
tagger: keep tokens that carry a digit, are capitalized mid-sentence, or
fall outside a bundled stopword+common-verb list.  Any callable mapping a
question to words can replace it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from ._lexicon import LEXICON
from .errors import NoKeywordsError, ValidationError
from .metrics import RankedDoc, levenshtein

__all__ = [
    "DocumentOcr",
    "Token",
    "doc_confidence",
    "extract_keywords",
    "rank_collection",
    "threshold_relevant",
]

_STRIP_CHARS = "\"'()[]{},;:!?<>«»"
_INITIAL_RE = re.compile(r"^[^\W\d_]\.$")


@dataclass(frozen=True)
class Token:
    """One recognized word with its page geometry.

    ``bbox`` is (x1, y1, x2, y2) in pixels with x2 >= x1 and y2 >= y1.
    """

    text: str
    bbox: tuple[float, float, float, float]
    ocr_confidence: float | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("token text must be non-empty after trimming")
        x1, y1, x2, y2 = self.bbox
        if x2 < x1 or y2 < y1:
            raise ValueError(f"degenerate bbox {self.bbox} for token {self.text!r}")

    @property
    def height(self) -> float:
        return self.bbox[3] - self.bbox[1]

    @property
    def vcenter(self) -> float:
        return (self.bbox[1] + self.bbox[3]) / 2.0


@dataclass(frozen=True)
class DocumentOcr:
    """One document's OCR tokens, identified by a collection-unique id."""

    doc_id: str
    tokens: tuple[Token, ...] = field(default_factory=tuple)
    page_size: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        object.__setattr__(self, "tokens", tuple(self.tokens))


def _clean_piece(piece: str) -> str:
    piece = piece.strip(_STRIP_CHARS)
    # Trailing periods go, except on single-letter initials ("M.").
    if piece.endswith(".") and not _INITIAL_RE.match(piece):
        piece = piece.rstrip(".").strip(_STRIP_CHARS)
    return piece


def _default_extract(question: str) -> list[str]:
    kept = []
    for position, word in enumerate(question.split()):
        for piece in word.split("-"):
            piece = _clean_piece(piece)
            if not piece:
                continue
            has_digit = any(ch.isdigit() for ch in piece)
            capitalized = position > 0 and piece[0].isupper()
            if has_digit or capitalized or piece.casefold() not in LEXICON:
                kept.append(piece.casefold())
    return kept


def extract_keywords(
    question_text: str,
    extractor: Callable[[str], Iterable[str]] | None = None,
) -> list[str]:
    """Content words of a question, lowercased and deduplicated in order
    of first occurrence.

    ``extractor`` overrides the built-in heuristic; it receives the raw
    question and returns words (a POS tagger keeping nouns and digit
    tokens slots in here).  Extractor exceptions and questions without
    any content word both raise errors carrying the question text.
    """
    if not question_text or not question_text.strip():
        raise NoKeywordsError(question_text)
    if extractor is None:
        words = _default_extract(question_text)
    else:
        try:
            words = [w.casefold() for w in extractor(question_text)]
        except Exception as exc:
            raise ValidationError(
                f"keyword extractor failed on question {question_text!r}: {exc}"
            ) from exc
    keywords = list(dict.fromkeys(w for w in words if w))
    if not keywords:
        raise NoKeywordsError(question_text)
    return keywords


def doc_confidence(keywords: Sequence[str], doc: DocumentOcr, case_fold: bool = True) -> float:
    """Spotting confidence of one document for a keyword set.

    1 - (1/|Q|) * sum over keywords of the minimum normalized Levenshtein
    distance to any document token.  A document with zero tokens scores
    0.0.  Comparisons are case-folded by default.
    """
    if not keywords:
        raise ValueError("keywords must be non-empty")
    if not doc.tokens:
        return 0.0
    texts = {t.text.casefold() if case_fold else t.text for t in doc.tokens}
    total = 0.0
    for keyword in keywords:
        query = keyword.casefold() if case_fold else keyword
        if query in texts:
            continue
        total += min(
            levenshtein(query, text) / max(len(query), len(text))
            for text in texts
        )
    return 1.0 - total / len(keywords)


def rank_collection(
    keywords: Sequence[str],
    docs: Iterable[DocumentOcr],
    case_fold: bool = True,
) -> list[RankedDoc]:
    """Rank a whole collection by spotting confidence.

    One entry per document, sorted by confidence descending with doc id
    ascending as the tie-break.  The collection must be non-empty with
    unique doc ids.
    """
    doc_list = list(docs)
    if not doc_list:
        raise ValueError("cannot rank an empty collection")
    seen: set[str] = set()
    for doc in doc_list:
        if doc.doc_id in seen:
            raise ValidationError(f"duplicate doc id in collection: {doc.doc_id!r}")
        seen.add(doc.doc_id)
    ranking = [
        RankedDoc(doc.doc_id, doc_confidence(keywords, doc, case_fold=case_fold))
        for doc in doc_list
    ]
    ranking.sort(key=lambda r: (-r.confidence, r.doc_id))
    return ranking


def threshold_relevant(ranking: Iterable[RankedDoc], min_confidence: float = 0.9) -> set[str]:
    """Doc ids whose confidence strictly exceeds ``min_confidence``.

    These are the documents worth sending to an answering stage; the
    default cutoff trades recall for precision on noisy collections.
    """
    if not 0.0 <= min_confidence <= 1.0:
        raise ValueError(f"min_confidence must be in [0, 1], got {min_confidence}")
    return {doc.doc_id for doc in ranking if doc.confidence > min_confidence}
