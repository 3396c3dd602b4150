"""Command-line interface.

Verbs: ``validate`` checks a collection directory and its question/gt
files, ``rank`` writes per-question evidence rankings, ``answer`` turns
rankings into a submission, ``run`` does both in one pass, ``evaluate``
scores a submission against ground truth, and ``fixture`` generates a
synthetic collection.  All outputs are canonical JSON, byte-identical
across reruns and thread counts.

Exit codes: 0 success, 1 validation or configuration failure, 2 runtime
failure (adapter or I/O trouble mid-run).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset_io import (
    Collection,
    cross_validate,
    load_collection,
    load_gt,
    load_questions,
    load_submissions,
    save_report,
    save_submissions,
    write_json,
)
from .errors import AdapterError, ConfigurationError, ValidationError
from .fixtures import FixtureSpec, generate_fixture, inject_ocr_noise, save_fixture
from .metrics import MetricReport, RankedDoc, evaluate
from .pipeline import PIPELINES, PipelineConfig, run_pipeline
from .records import extract_answers
from .adapter import answer_documents, resolve_adapter

__all__ = ["main"]


def _add_rank_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--case-sensitive", action="store_true",
                        help="compare keywords and tokens without case folding")
    parser.add_argument("--keywords", metavar="PATH",
                        help="JSON file of per-question keyword overrides (question_id -> [keywords])")
    parser.add_argument("--strict-missing", action="store_true",
                        help="negative constraints no longer match records missing the field")


def _add_answer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theta", type=float, default=0.9, metavar="T",
                        help="relevance threshold on retrieval confidence (default 0.9)")
    parser.add_argument("--adapter", metavar="ENDPOINT",
                        help="answer adapter: 'stub', 'stdio:<command>', or an http(s) URL "
                             "(default: DOCQAKIT_ADAPTER)")
    parser.add_argument("--paper-literal", action="store_true",
                        help="negative existence questions answer [] instead of ['No']")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docqakit",
        description="Question answering over document collections: rank evidence, "
                    "answer questions, and score submissions.",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    p = verbs.add_parser("validate", help="validate a collection directory and its files")
    p.add_argument("--collection", required=True, metavar="DIR")
    p.add_argument("--questions", metavar="PATH")
    p.add_argument("--gt", metavar="PATH")

    p = verbs.add_parser("rank", help="write per-question evidence rankings")
    p.add_argument("--collection", required=True, metavar="DIR")
    p.add_argument("--questions", required=True, metavar="PATH")
    p.add_argument("--retriever", required=True, choices=("textspot", "records"))
    p.add_argument("--out", required=True, metavar="PATH")
    _add_rank_flags(p)

    p = verbs.add_parser("answer", help="answer questions from existing rankings")
    p.add_argument("--collection", required=True, metavar="DIR")
    p.add_argument("--questions", required=True, metavar="PATH")
    p.add_argument("--rankings", required=True, metavar="PATH")
    p.add_argument("--answerer", required=True, choices=("records", "adapter"))
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--strict-missing", action="store_true",
                   help="negative constraints no longer match records missing the field")
    _add_answer_flags(p)

    p = verbs.add_parser("run", help="rank and answer in one pass")
    p.add_argument("--collection", required=True, metavar="DIR")
    p.add_argument("--questions", required=True, metavar="PATH")
    p.add_argument("--pipeline", required=True, choices=PIPELINES)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--gt", metavar="PATH", help="ground truth (needed for --gt-ranking)")
    p.add_argument("--gt-ranking", action="store_true",
                   help="substitute ground-truth relevance for the retriever's ranking")
    p.add_argument("--threads", type=int, default=1, metavar="N",
                   help="question fan-out; outputs are identical for any value")
    _add_rank_flags(p)
    _add_answer_flags(p)

    p = verbs.add_parser("evaluate", help="score a submission against ground truth")
    p.add_argument("--submission", required=True, metavar="PATH")
    p.add_argument("--gt", required=True, metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="also write the report as JSON")
    p.add_argument("--tau", type=float, default=0.5, metavar="T",
                   help="per-pair similarity threshold in answer scoring (default 0.5; 0 disables)")
    p.add_argument("--case-sensitive", action="store_true",
                   help="compare answers without case folding")

    p = verbs.add_parser("fixture", help="generate a synthetic collection")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-docs", type=int, default=100, metavar="N")
    p.add_argument("--noise-rate", type=float, default=0.0, metavar="F",
                   help="corrupt one character in the noise fields of this fraction of records")
    p.add_argument("--noise-fields", default="treasurer name", metavar="CSV",
                   help="comma-separated fields the noise targets (default: treasurer name)")
    p.add_argument("--noise-seed", type=int, default=None, metavar="N",
                   help="separate seed for noise injection (default: --seed)")
    return parser


def _load_keyword_overrides(path: str | None) -> dict | None:
    if path is None:
        return None
    import json

    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read keyword file: {exc}", file=path) from exc
    except ValueError as exc:
        raise ValidationError(f"malformed keyword JSON: {exc}", file=path) from exc
    if not isinstance(payload, dict):
        raise ValidationError("keyword overrides must map question_id to a list", file=path)
    overrides = {}
    for question_id, words in payload.items():
        if (not isinstance(words, list)
                or not words
                or not all(isinstance(w, str) and w for w in words)):
            raise ValidationError(
                f"keywords for {question_id!r} must be a non-empty list of strings", file=path
            )
        overrides[question_id] = [w.casefold() for w in words]
    return overrides


def _cmd_validate(args) -> int:
    collection = load_collection(args.collection)
    questions = load_questions(args.questions, collection.schema) if args.questions else None
    gt = load_gt(args.gt) if args.gt else None
    cross_validate(collection, questions, gt)
    parts = [f"{len(collection.documents)} documents", f"{len(collection.records)} records"]
    if questions is not None:
        parts.append(f"{len(questions)} questions")
    if gt is not None:
        parts.append(f"{len(gt)} gt entries")
    print("collection OK: " + ", ".join(parts))
    return 0


def _rankings_payload(submissions) -> list:
    return [
        {
            "question_id": s.question_id,
            "ranking": [{"doc_id": r.doc_id, "confidence": r.confidence} for r in s.ranking],
        }
        for s in submissions
    ]


def _cmd_rank(args) -> int:
    collection = load_collection(args.collection)
    questions = load_questions(args.questions, collection.schema)
    config = PipelineConfig(
        case_fold=not args.case_sensitive,
        strict_missing=args.strict_missing,
        keyword_overrides=_load_keyword_overrides(args.keywords),
    )
    pipeline = "textspot+adapter" if args.retriever == "textspot" else "records+records"
    submissions = _rank_only(pipeline, collection, questions, config)
    write_json(_rankings_payload(submissions), args.out)
    print(f"wrote rankings for {len(submissions)} questions to {args.out}")
    return 0


def _rank_only(pipeline, collection, questions, config):
    # Reuse the pipeline machinery without an answering stage: empty
    # answers, rankings only.
    from .dataset_io import Submission
    from .textspot import extract_keywords, rank_collection
    from .records import query_collection

    retriever = pipeline.split("+")[0]
    if retriever == "records":
        missing = sorted(q.question_id for q in questions if q.query is None)
        if missing:
            raise ValidationError(f"records retrieval needs structured queries; missing for: {missing}")
        if not collection.records:
            raise ConfigurationError("records retrieval needs records data in the collection")
    elif not collection.documents:
        raise ConfigurationError("textspot retrieval needs OCR documents in the collection")
    submissions = []
    for question in questions:
        if retriever == "textspot":
            if config.keyword_overrides and question.question_id in config.keyword_overrides:
                keywords = list(config.keyword_overrides[question.question_id])
            else:
                keywords = extract_keywords(question.text, config.keyword_extractor)
            ranking = rank_collection(keywords, collection.documents, case_fold=config.case_fold)
        else:
            ranking = query_collection(
                question.query, collection.records, collection.schema,
                strict_missing=config.strict_missing,
            )
        submissions.append(Submission(
            question_id=question.question_id, answers=(), ranking=tuple(ranking),
        ))
    return submissions


def _load_rankings(path: str) -> dict[str, list[RankedDoc]]:
    import json

    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read rankings file: {exc}", file=path) from exc
    except ValueError as exc:
        raise ValidationError(f"malformed rankings JSON: {exc}", file=path) from exc
    if not isinstance(payload, list):
        raise ValidationError("rankings file must be an array", file=path)
    rankings: dict[str, list[RankedDoc]] = {}
    for i, entry in enumerate(payload):
        if (not isinstance(entry, dict) or "question_id" not in entry
                or "ranking" not in entry or not isinstance(entry["ranking"], list)):
            raise ValidationError("expected {question_id, ranking:[...]}",
                                  file=path, path=f"$[{i}]")
        docs = []
        for j, raw in enumerate(entry["ranking"]):
            if not isinstance(raw, dict) or "doc_id" not in raw or "confidence" not in raw:
                raise ValidationError("expected {doc_id, confidence}",
                                      file=path, path=f"$[{i}].ranking[{j}]")
            try:
                docs.append(RankedDoc(raw["doc_id"], raw["confidence"]))
            except ValueError as exc:
                raise ValidationError(str(exc), file=path, path=f"$[{i}].ranking[{j}]") from exc
        question_id = entry["question_id"]
        if question_id in rankings:
            raise ValidationError(f"duplicate question_id {question_id!r}", file=path)
        rankings[question_id] = docs
    return rankings


def _cmd_answer(args) -> int:
    from .dataset_io import Submission
    from .textspot import threshold_relevant

    collection = load_collection(args.collection)
    questions = load_questions(args.questions, collection.schema)
    rankings = _load_rankings(args.rankings)
    missing = sorted(q.question_id for q in questions if q.question_id not in rankings)
    if missing:
        raise ValidationError(f"rankings file lacks entries for questions: {missing}")
    adapter = resolve_adapter(args.adapter) if args.answerer == "adapter" else None
    docs_by_id = {d.doc_id: d for d in collection.documents}
    submissions = []
    for question in questions:
        ranking = rankings[question.question_id]
        relevant = threshold_relevant(ranking, args.theta)
        if args.answerer == "records":
            if question.query is None:
                raise ValidationError(f"question {question.question_id!r} has no structured query")
            records = sorted(
                (r for r in collection.records if r.doc_id in relevant),
                key=lambda r: r.doc_id,
            )
            answers = extract_answers(question.query, records, paper_literal=args.paper_literal)
        else:
            unknown = sorted(i for i in relevant if i not in docs_by_id)
            if unknown:
                raise ValidationError(
                    f"question {question.question_id!r}: relevant documents without OCR data: {unknown}"
                )
            ordered = [docs_by_id[r.doc_id] for r in ranking if r.doc_id in relevant]
            answers = answer_documents(question.text, ordered, relevant, adapter)
        submissions.append(Submission(
            question_id=question.question_id,
            answers=tuple(answers),
            ranking=tuple(ranking),
        ))
    save_submissions(submissions, args.out)
    print(f"wrote {len(submissions)} submissions to {args.out}")
    return 0


def _cmd_run(args) -> int:
    collection = load_collection(args.collection)
    questions = load_questions(args.questions, collection.schema)
    gt = load_gt(args.gt) if args.gt else None
    config = PipelineConfig(
        relevance_threshold=args.theta,
        case_fold=not args.case_sensitive,
        paper_literal=args.paper_literal,
        gt_ranking=args.gt_ranking,
        strict_missing=args.strict_missing,
        adapter=args.adapter,
        threads=args.threads,
        keyword_overrides=_load_keyword_overrides(args.keywords),
    )
    submissions = run_pipeline(args.pipeline, collection, questions, config, gt=gt)
    save_submissions(submissions, args.out)
    print(f"wrote {len(submissions)} submissions to {args.out}")
    return 0


def _format_report(report: MetricReport) -> str:
    width = max([len("question")] + [len(q.question_id) for q in report.per_question])
    lines = [f"{'question':<{width}}      AP   ANLSL"]
    for row in report.per_question:
        lines.append(f"{row.question_id:<{width}}  {row.ap:6.4f}  {row.anlsl:6.4f}")
    lines.append(f"MAP   {report.map_percent:.2f}")
    lines.append(f"ANLSL {report.anlsl:.4f}")
    return "\n".join(lines)


def _cmd_evaluate(args) -> int:
    submissions = load_submissions(args.submission)
    gt = load_gt(args.gt)
    report = evaluate(submissions, gt, threshold=args.tau, case_fold=not args.case_sensitive)
    print(_format_report(report))
    if args.out:
        save_report(report, args.out)
    return 0


def _cmd_fixture(args) -> int:
    spec = FixtureSpec(n_docs=args.n_docs, seed=args.seed)
    fixture = generate_fixture(spec)
    if args.noise_rate > 0:
        fields = [name.strip() for name in args.noise_fields.split(",") if name.strip()]
        if not fields:
            raise ValidationError("--noise-fields must name at least one field")
        noise_seed = args.noise_seed if args.noise_seed is not None else args.seed
        fixture.records = inject_ocr_noise(
            fixture.records, fields, args.noise_rate, noise_seed, fixture.schema,
        )
    save_fixture(fixture, args.out)
    print(f"wrote fixture ({spec.n_docs} documents, {len(fixture.questions)} questions) to {args.out}")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "rank": _cmd_rank,
    "answer": _cmd_answer,
    "run": _cmd_run,
    "evaluate": _cmd_evaluate,
    "fixture": _cmd_fixture,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except (ValidationError, ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (AdapterError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
