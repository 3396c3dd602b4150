"""End-to-end retrieval-plus-answering pipelines.

Three pipelines cover the retriever/answerer combinations worth running:
``textspot+adapter`` (keyword spotting over OCR, extractive QA),
``records+adapter`` (structured retrieval, extractive QA), and
``records+records`` (structured retrieval, answers read from records).
Each produces one Submission per question: a full-collection confidence
ranking and an answer list built from the documents the retriever deems
relevant — spotting confidence above the relevance threshold, or
constraint confidence 1.0.

Ground-truth ranking mode replaces the retriever's ranking with binary
ground-truth relevance, isolating answering quality from retrieval.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .adapter import AnswerAdapter, answer_documents, resolve_adapter
from .dataset_io import Collection, GroundTruthEntry, Question, Submission
from .errors import ConfigurationError, ValidationError
from .metrics import RankedDoc
from .records import extract_answers, query_collection
from .textspot import extract_keywords, rank_collection, threshold_relevant

__all__ = ["PIPELINES", "PipelineConfig", "run_pipeline"]

PIPELINES = ("textspot+adapter", "records+adapter", "records+records")


@dataclass
class PipelineConfig:
    """Knobs shared by all pipelines.

    ``relevance_threshold`` gates which spotted documents get answered;
    ``adapter`` is an endpoint string or adapter instance for the
    adapter-answering pipelines; ``keyword_overrides`` maps question ids
    to pre-extracted keyword lists, bypassing the built-in extractor.
    """

    relevance_threshold: float = 0.9
    case_fold: bool = True
    paper_literal: bool = False
    gt_ranking: bool = False
    strict_missing: bool = False
    adapter: "str | AnswerAdapter | None" = None
    threads: int = 1
    keyword_overrides: Mapping[str, Sequence[str]] | None = None
    keyword_extractor: Callable[[str], Iterable[str]] | None = None
    line_tolerance_factor: float = 0.5

    def __post_init__(self):
        if self.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {self.threads}")
        if not 0.0 <= self.relevance_threshold <= 1.0:
            raise ConfigurationError(
                f"relevance threshold must be in [0, 1], got {self.relevance_threshold}"
            )


def run_pipeline(
    pipeline: str,
    collection: Collection,
    questions: Sequence[Question],
    config: PipelineConfig | None = None,
    gt: Sequence[GroundTruthEntry] | None = None,
) -> list[Submission]:
    """Run one pipeline over every question, one Submission each.

    Inputs are checked before any work starts: records pipelines need
    records, spotting and adapter pipelines need OCR documents, adapter
    pipelines need an endpoint, and gt-ranking mode needs a gt entry per
    question.  Question fan-out across ``config.threads`` threads leaves
    outputs identical to a single-threaded run.
    """
    config = config if config is not None else PipelineConfig()
    if pipeline not in PIPELINES:
        raise ConfigurationError(f"unknown pipeline {pipeline!r}; expected one of {PIPELINES}")
    retriever, answerer = pipeline.split("+")

    if retriever == "records" and not collection.records:
        raise ConfigurationError(f"pipeline {pipeline!r} needs records data in the collection")
    if (retriever == "textspot" or answerer == "adapter") and not collection.documents:
        raise ConfigurationError(f"pipeline {pipeline!r} needs OCR documents in the collection")
    adapter = resolve_adapter(config.adapter) if answerer == "adapter" else None
    gt_by_id: dict[str, GroundTruthEntry] = {}
    if config.gt_ranking:
        if gt is None:
            raise ConfigurationError("gt-ranking mode needs ground truth entries")
        gt_by_id = {entry.question_id: entry for entry in gt}
        missing = sorted(q.question_id for q in questions if q.question_id not in gt_by_id)
        if missing:
            raise ConfigurationError(f"gt-ranking mode lacks gt entries for questions: {missing}")
    if retriever == "records" or answerer == "records":
        without_query = sorted(q.question_id for q in questions if q.query is None)
        if without_query:
            raise ValidationError(
                f"pipeline {pipeline!r} needs structured queries; missing for: {without_query}"
            )

    ranked_ids = sorted(collection.doc_ids)
    docs_by_id = {doc.doc_id: doc for doc in collection.documents}

    def rank(question: Question) -> list[RankedDoc]:
        if config.gt_ranking:
            relevant = gt_by_id[question.question_id].relevant_doc_ids
            ranking = [RankedDoc(i, 1.0 if i in relevant else 0.0) for i in ranked_ids]
            ranking.sort(key=lambda r: (-r.confidence, r.doc_id))
            return ranking
        if retriever == "textspot":
            if config.keyword_overrides and question.question_id in config.keyword_overrides:
                keywords = list(config.keyword_overrides[question.question_id])
            else:
                keywords = extract_keywords(question.text, config.keyword_extractor)
            return rank_collection(keywords, collection.documents, case_fold=config.case_fold)
        return query_collection(
            question.query, collection.records, collection.schema,
            strict_missing=config.strict_missing,
        )

    def answer_set(ranking: Sequence[RankedDoc]) -> set[str]:
        if retriever == "textspot" and not config.gt_ranking:
            return threshold_relevant(ranking, config.relevance_threshold)
        return {r.doc_id for r in ranking if r.confidence == 1.0}

    def answer(question: Question, ranking: Sequence[RankedDoc], relevant: set[str]) -> list[str]:
        if answerer == "records":
            records = sorted(
                (r for r in collection.records if r.doc_id in relevant),
                key=lambda r: r.doc_id,
            )
            return extract_answers(question.query, records, paper_literal=config.paper_literal)
        missing = sorted(i for i in relevant if i not in docs_by_id)
        if missing:
            raise ValidationError(
                f"question {question.question_id!r}: relevant documents without OCR data: {missing}"
            )
        ordered = [docs_by_id[r.doc_id] for r in ranking if r.doc_id in relevant]
        return answer_documents(
            question.text, ordered, relevant, adapter,
            line_tolerance_factor=config.line_tolerance_factor,
        )

    def process(question: Question) -> Submission:
        ranking = rank(question)
        relevant = answer_set(ranking)
        answers = answer(question, ranking, relevant)
        return Submission(
            question_id=question.question_id,
            answers=tuple(answers),
            ranking=tuple(ranking),
        )

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            return list(executor.map(process, questions))
    return [process(question) for question in questions]
