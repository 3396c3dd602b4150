"""Collection file formats: loading, validation, and canonical writes.

A collection lives in a directory of UTF-8 JSON files:

* ``documents.json`` — OCR output, ``[{doc_id, page_size:[w,h],
  tokens:[{text, bbox:[x1,y1,x2,y2], conf}]}]`` (page_size and conf
  optional).
* ``records.json`` — key-value fields, ``[{doc_id, fields:{name:{raw,
  kind, checked?}}}]``.
* ``schema.json`` — field declarations; the bundled candidate-
  registration schema applies when absent.
* ``questions.json`` — ``[{question_id, text, query:{constraints:
  [{field, op, values}], answer_field}}]``.
* ``gt.json`` — ``[{question_id, answers:[...], relevant:[doc_id]}]``.

Writes are canonical (sorted keys, two-space indent, trailing newline),
so saving loaded data reproduces the input byte for byte and identical
runs diff empty.  Validation errors name the file, the JSON path, and
the reason.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError
from .metrics import MetricReport, RankedDoc
from .records import (
    Constraint,
    RecordDoc,
    Schema,
    StructuredQuery,
    candidate_registration_schema,
    normalize_record,
    validate_query,
)
from .textspot import DocumentOcr, Token

__all__ = [
    "Collection",
    "GroundTruthEntry",
    "Question",
    "Submission",
    "cross_validate",
    "load_collection",
    "load_documents",
    "load_gt",
    "load_questions",
    "load_records",
    "load_schema",
    "load_submissions",
    "save_documents",
    "save_gt",
    "save_questions",
    "save_records",
    "save_report",
    "save_schema",
    "save_submissions",
    "write_json",
]

DOCUMENTS_FILE = "documents.json"
RECORDS_FILE = "records.json"
SCHEMA_FILE = "schema.json"
QUESTIONS_FILE = "questions.json"
GT_FILE = "gt.json"


@dataclass(frozen=True)
class GroundTruthEntry:
    """Gold data for one question: answers plus its evidence documents."""

    question_id: str
    answers: tuple[str, ...]
    relevant_doc_ids: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "answers", tuple(self.answers))
        object.__setattr__(self, "relevant_doc_ids", frozenset(self.relevant_doc_ids))
        if not self.question_id:
            raise ValidationError("ground truth question_id must be non-empty")
        if not self.relevant_doc_ids:
            raise ValidationError(
                f"question {self.question_id!r} has no relevant documents"
            )


@dataclass(frozen=True)
class Submission:
    """One question's predicted answers and evidence ranking."""

    question_id: str
    answers: tuple[str, ...]
    ranking: tuple[RankedDoc, ...]

    def __post_init__(self):
        object.__setattr__(self, "answers", tuple(self.answers))
        object.__setattr__(self, "ranking", tuple(self.ranking))


@dataclass(frozen=True)
class Question:
    """A natural-language question and its structured-query form."""

    question_id: str
    text: str
    query: StructuredQuery | None = None


@dataclass
class Collection:
    """An in-memory collection: OCR documents, records, and the schema."""

    documents: list[DocumentOcr] = field(default_factory=list)
    records: list[RecordDoc] = field(default_factory=list)
    schema: Schema = field(default_factory=candidate_registration_schema)

    @property
    def doc_ids(self) -> set[str]:
        return {d.doc_id for d in self.documents} | {r.doc_id for r in self.records}


def write_json(payload: object, path: str | Path) -> None:
    """Canonical JSON write: sorted keys, indent 2, trailing newline."""
    text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _read_json(path: str | Path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read file: {exc}", file=str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=str(path),
        ) from exc


def _fail(file: str | Path, path: str, reason: str) -> None:
    raise ValidationError(reason, file=str(file), path=path)


def _expect_list(value, file, path) -> list:
    if not isinstance(value, list):
        _fail(file, path, f"expected an array, got {type(value).__name__}")
    return value


def _expect_object(value, file, path, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(value, dict):
        _fail(file, path, f"expected an object, got {type(value).__name__}")
    unknown = sorted(set(value) - allowed)
    if unknown:
        _fail(file, path, f"unknown keys {unknown}; allowed keys are {sorted(allowed)}")
    missing = sorted(required - set(value))
    if missing:
        _fail(file, path, f"missing required keys {missing}")
    return value


def _expect_str(value, file, path, allow_empty: bool = False) -> str:
    if not isinstance(value, str):
        _fail(file, path, f"expected a string, got {type(value).__name__}")
    if not allow_empty and not value:
        _fail(file, path, "must be non-empty")
    return value


def _expect_number(value, file, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(file, path, f"expected a number, got {type(value).__name__}")
    return value


def _check_unique(ids: Iterable[str], file, what: str) -> None:
    seen: set[str] = set()
    for item in ids:
        if item in seen:
            _fail(file, "$", f"duplicate {what}: {item!r}")
        seen.add(item)


def load_documents(path: str | Path) -> list[DocumentOcr]:
    """Load and validate an OCR documents file."""
    payload = _expect_list(_read_json(path), path, "$")
    documents = []
    for i, entry in enumerate(payload):
        where = f"$[{i}]"
        entry = _expect_object(entry, path, where,
                               {"doc_id", "page_size", "tokens"}, {"doc_id", "tokens"})
        doc_id = _expect_str(entry["doc_id"], path, f"{where}.doc_id")
        page_size = None
        if "page_size" in entry:
            raw_size = _expect_list(entry["page_size"], path, f"{where}.page_size")
            if len(raw_size) != 2:
                _fail(path, f"{where}.page_size", "expected [width, height]")
            width = _expect_number(raw_size[0], path, f"{where}.page_size[0]")
            height = _expect_number(raw_size[1], path, f"{where}.page_size[1]")
            if width <= 0 or height <= 0:
                _fail(path, f"{where}.page_size", f"non-positive page size [{width}, {height}]")
            page_size = (width, height)
        tokens = []
        for j, raw_token in enumerate(_expect_list(entry["tokens"], path, f"{where}.tokens")):
            token_where = f"{where}.tokens[{j}]"
            raw_token = _expect_object(raw_token, path, token_where,
                                       {"text", "bbox", "conf"}, {"text", "bbox"})
            text = _expect_str(raw_token["text"], path, f"{token_where}.text")
            if not text.strip():
                _fail(path, f"{token_where}.text", "text is blank after trimming")
            bbox = _expect_list(raw_token["bbox"], path, f"{token_where}.bbox")
            if len(bbox) != 4:
                _fail(path, f"{token_where}.bbox", f"expected [x1, y1, x2, y2], got {len(bbox)} values")
            x1, y1, x2, y2 = (
                _expect_number(v, path, f"{token_where}.bbox[{k}]") for k, v in enumerate(bbox)
            )
            if x2 < x1 or y2 < y1:
                _fail(path, f"{token_where}.bbox", f"degenerate bbox [{x1}, {y1}, {x2}, {y2}]")
            if page_size is not None and not (
                0 <= x1 and x2 <= page_size[0] and 0 <= y1 and y2 <= page_size[1]
            ):
                _fail(path, f"{token_where}.bbox",
                      f"bbox [{x1}, {y1}, {x2}, {y2}] outside page {list(page_size)}")
            conf = None
            if "conf" in raw_token:
                conf = _expect_number(raw_token["conf"], path, f"{token_where}.conf")
                if not 0 <= conf <= 1:
                    _fail(path, f"{token_where}.conf", f"confidence {conf} outside [0, 1]")
            tokens.append(Token(text=text, bbox=(x1, y1, x2, y2), ocr_confidence=conf))
        documents.append(DocumentOcr(doc_id=doc_id, tokens=tuple(tokens), page_size=page_size))
    _check_unique((d.doc_id for d in documents), path, "doc_id")
    return documents


def save_documents(documents: Sequence[DocumentOcr], path: str | Path) -> None:
    payload = []
    for doc in documents:
        entry: dict = {"doc_id": doc.doc_id, "tokens": []}
        if doc.page_size is not None:
            entry["page_size"] = list(doc.page_size)
        for token in doc.tokens:
            raw_token: dict = {"text": token.text, "bbox": list(token.bbox)}
            if token.ocr_confidence is not None:
                raw_token["conf"] = token.ocr_confidence
            entry["tokens"].append(raw_token)
        payload.append(entry)
    write_json(payload, path)


def load_schema(path: str | Path) -> Schema:
    payload = _read_json(path)
    if not isinstance(payload, dict):
        _fail(path, "$", f"expected an object, got {type(payload).__name__}")
    try:
        return Schema.from_dict(payload)
    except (ValidationError, KeyError, TypeError) as exc:
        _fail(path, "$", f"bad schema: {exc}")


def save_schema(schema: Schema, path: str | Path) -> None:
    write_json(schema.to_dict(), path)


def load_records(path: str | Path, schema: Schema | None = None) -> list[RecordDoc]:
    """Load, validate, and normalize a key-value records file."""
    schema = schema if schema is not None else candidate_registration_schema()
    payload = _expect_list(_read_json(path), path, "$")
    records = []
    for i, entry in enumerate(payload):
        where = f"$[{i}]"
        entry = _expect_object(entry, path, where, {"doc_id", "fields"}, {"doc_id", "fields"})
        doc_id = _expect_str(entry["doc_id"], path, f"{where}.doc_id")
        if not isinstance(entry["fields"], dict):
            _fail(path, f"{where}.fields", "expected an object of field values")
        raw_fields: dict[str, object] = {}
        for name, value in entry["fields"].items():
            field_where = f"{where}.fields.{name}"
            try:
                spec = schema.field_spec(name)
            except ValidationError as exc:
                _fail(path, field_where, exc.reason)
            value = _expect_object(value, path, field_where,
                                   {"raw", "kind", "checked"}, {"raw", "kind"})
            kind = _expect_str(value["kind"], path, f"{field_where}.kind")
            if kind != spec.kind:
                _fail(path, f"{field_where}.kind",
                      f"kind {kind!r} does not match schema kind {spec.kind!r}")
            raw = _expect_str(value["raw"], path, f"{field_where}.raw", allow_empty=True)
            if spec.kind == "checkbox":
                if "checked" not in value:
                    _fail(path, field_where, "checkbox field needs a 'checked' state")
                if not isinstance(value["checked"], bool):
                    _fail(path, f"{field_where}.checked", "expected a boolean")
                raw_fields[name] = (raw, value["checked"])
            else:
                if "checked" in value:
                    _fail(path, f"{field_where}.checked",
                          f"'checked' is only valid on checkbox fields, not {spec.kind}")
                raw_fields[name] = raw
        try:
            records.append(normalize_record(doc_id, raw_fields, schema))
        except ValidationError as exc:
            _fail(path, where, exc.reason)
    _check_unique((r.doc_id for r in records), path, "doc_id")
    return records


def save_records(records: Sequence[RecordDoc], path: str | Path) -> None:
    payload = []
    for record in records:
        fields: dict[str, dict] = {}
        for name, value in record.fields.items():
            entry = {"raw": value.raw, "kind": value.kind}
            if value.kind == "checkbox":
                entry["checked"] = value.checked
            fields[name] = entry
        payload.append({"doc_id": record.doc_id, "fields": fields})
    write_json(payload, path)


def _load_constraint(raw, file, where) -> Constraint:
    raw = _expect_object(
        raw, file, where,
        {"field", "op", "values", "lower_inclusive", "upper_inclusive"},
        {"field", "op", "values"},
    )
    name = _expect_str(raw["field"], file, f"{where}.field")
    op = _expect_str(raw["op"], file, f"{where}.op")
    values = _expect_list(raw["values"], file, f"{where}.values")
    for k, value in enumerate(values):
        if not isinstance(value, (str, bool, int)):
            _fail(file, f"{where}.values[{k}]",
                  f"constraint values must be strings, booleans, or integers, got {value!r}")
    kwargs = {}
    for flag in ("lower_inclusive", "upper_inclusive"):
        if flag in raw:
            if not isinstance(raw[flag], bool):
                _fail(file, f"{where}.{flag}", "expected a boolean")
            kwargs[flag] = raw[flag]
    try:
        return Constraint(field=name, op=op, values=tuple(values), **kwargs)
    except ValidationError as exc:
        _fail(file, where, exc.reason)


def load_questions(path: str | Path, schema: Schema | None = None) -> list[Question]:
    """Load and validate a questions file (text plus structured query)."""
    schema = schema if schema is not None else candidate_registration_schema()
    payload = _expect_list(_read_json(path), path, "$")
    questions = []
    for i, entry in enumerate(payload):
        where = f"$[{i}]"
        entry = _expect_object(entry, path, where,
                               {"question_id", "text", "query"}, {"question_id", "text", "query"})
        question_id = _expect_str(entry["question_id"], path, f"{where}.question_id")
        text = _expect_str(entry["text"], path, f"{where}.text")
        raw_query = _expect_object(
            entry["query"], path, f"{where}.query",
            {"constraints", "answer_field", "answer_format"}, {"constraints", "answer_field"},
        )
        constraints = [
            _load_constraint(raw, path, f"{where}.query.constraints[{j}]")
            for j, raw in enumerate(_expect_list(raw_query["constraints"], path,
                                                 f"{where}.query.constraints"))
        ]
        answer_field = _expect_str(raw_query["answer_field"], path, f"{where}.query.answer_field")
        answer_format = "canonical"
        if "answer_format" in raw_query:
            answer_format = _expect_str(raw_query["answer_format"], path,
                                        f"{where}.query.answer_format")
        try:
            query = StructuredQuery(
                question_id=question_id,
                constraints=tuple(constraints),
                answer_field=answer_field,
                answer_format=answer_format,
            )
            validate_query(query, schema)
        except ValidationError as exc:
            _fail(path, f"{where}.query", exc.reason)
        questions.append(Question(question_id=question_id, text=text, query=query))
    _check_unique((q.question_id for q in questions), path, "question_id")
    return questions


def save_questions(questions: Sequence[Question], path: str | Path) -> None:
    payload = []
    for question in questions:
        query = question.query
        if query is None:
            raise ValidationError(
                f"question {question.question_id!r} has no structured query to save"
            )
        constraints = []
        for c in query.constraints:
            entry: dict = {"field": c.field, "op": c.op, "values": list(c.values)}
            if not c.lower_inclusive:
                entry["lower_inclusive"] = False
            if not c.upper_inclusive:
                entry["upper_inclusive"] = False
            constraints.append(entry)
        raw_query: dict = {"constraints": constraints, "answer_field": query.answer_field}
        if query.answer_format != "canonical":
            raw_query["answer_format"] = query.answer_format
        payload.append({
            "question_id": question.question_id,
            "text": question.text,
            "query": raw_query,
        })
    write_json(payload, path)


def load_gt(path: str | Path) -> list[GroundTruthEntry]:
    """Load and validate a ground-truth file."""
    payload = _expect_list(_read_json(path), path, "$")
    entries = []
    for i, entry in enumerate(payload):
        where = f"$[{i}]"
        entry = _expect_object(entry, path, where,
                               {"question_id", "answers", "relevant"},
                               {"question_id", "answers", "relevant"})
        question_id = _expect_str(entry["question_id"], path, f"{where}.question_id")
        answers = [
            _expect_str(a, path, f"{where}.answers[{j}]", allow_empty=True)
            for j, a in enumerate(_expect_list(entry["answers"], path, f"{where}.answers"))
        ]
        relevant = [
            _expect_str(d, path, f"{where}.relevant[{j}]")
            for j, d in enumerate(_expect_list(entry["relevant"], path, f"{where}.relevant"))
        ]
        if not relevant:
            _fail(path, f"{where}.relevant", "every question needs at least one relevant document")
        if len(set(relevant)) != len(relevant):
            _fail(path, f"{where}.relevant", "duplicate doc ids")
        entries.append(GroundTruthEntry(
            question_id=question_id,
            answers=tuple(answers),
            relevant_doc_ids=frozenset(relevant),
        ))
    _check_unique((e.question_id for e in entries), path, "question_id")
    return entries


def save_gt(entries: Sequence[GroundTruthEntry], path: str | Path) -> None:
    payload = [
        {
            "question_id": entry.question_id,
            "answers": list(entry.answers),
            "relevant": sorted(entry.relevant_doc_ids),
        }
        for entry in entries
    ]
    write_json(payload, path)


def load_submissions(path: str | Path) -> list[Submission]:
    """Load and validate a submissions file."""
    payload = _expect_list(_read_json(path), path, "$")
    submissions = []
    for i, entry in enumerate(payload):
        where = f"$[{i}]"
        entry = _expect_object(entry, path, where,
                               {"question_id", "answers", "ranking"},
                               {"question_id", "answers", "ranking"})
        question_id = _expect_str(entry["question_id"], path, f"{where}.question_id")
        answers = [
            _expect_str(a, path, f"{where}.answers[{j}]", allow_empty=True)
            for j, a in enumerate(_expect_list(entry["answers"], path, f"{where}.answers"))
        ]
        ranking = []
        for j, raw in enumerate(_expect_list(entry["ranking"], path, f"{where}.ranking")):
            rank_where = f"{where}.ranking[{j}]"
            raw = _expect_object(raw, path, rank_where,
                                 {"doc_id", "confidence"}, {"doc_id", "confidence"})
            doc_id = _expect_str(raw["doc_id"], path, f"{rank_where}.doc_id")
            confidence = _expect_number(raw["confidence"], path, f"{rank_where}.confidence")
            try:
                ranking.append(RankedDoc(doc_id=doc_id, confidence=confidence))
            except ValueError as exc:
                _fail(path, rank_where, str(exc))
        ids = [r.doc_id for r in ranking]
        if len(set(ids)) != len(ids):
            _fail(path, f"{where}.ranking", "duplicate doc ids in ranking")
        submissions.append(Submission(
            question_id=question_id, answers=tuple(answers), ranking=tuple(ranking),
        ))
    _check_unique((s.question_id for s in submissions), path, "question_id")
    return submissions


def save_submissions(submissions: Sequence[Submission], path: str | Path) -> None:
    payload = [
        {
            "question_id": submission.question_id,
            "answers": list(submission.answers),
            "ranking": [
                {"doc_id": doc.doc_id, "confidence": doc.confidence}
                for doc in submission.ranking
            ],
        }
        for submission in submissions
    ]
    write_json(payload, path)


def save_report(report: MetricReport, path: str | Path) -> None:
    write_json(report.to_dict(), path)


def load_collection(path: str | Path) -> Collection:
    """Load a collection directory (documents and/or records + schema).

    At least one of documents.json and records.json must exist;
    schema.json is optional and defaults to the bundled candidate-
    registration schema.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise ValidationError("collection path is not a directory", file=str(directory))
    schema_path = directory / SCHEMA_FILE
    schema = load_schema(schema_path) if schema_path.exists() else candidate_registration_schema()
    documents_path = directory / DOCUMENTS_FILE
    records_path = directory / RECORDS_FILE
    if not documents_path.exists() and not records_path.exists():
        raise ValidationError(
            f"collection needs {DOCUMENTS_FILE} or {RECORDS_FILE}", file=str(directory)
        )
    documents = load_documents(documents_path) if documents_path.exists() else []
    records = load_records(records_path, schema) if records_path.exists() else []
    return Collection(documents=documents, records=records, schema=schema)


def cross_validate(
    collection: Collection,
    questions: Sequence[Question] | None = None,
    gt: Sequence[GroundTruthEntry] | None = None,
) -> None:
    """Check cross-file references: gt doc ids against the collection,
    gt question ids against the questions file."""
    if gt is None:
        return
    doc_ids = collection.doc_ids
    for entry in gt:
        dangling = sorted(entry.relevant_doc_ids - doc_ids)
        if dangling:
            raise ValidationError(
                f"question {entry.question_id!r} references unknown doc ids: {dangling}",
                file=GT_FILE,
            )
    if questions is not None:
        known = {q.question_id for q in questions}
        unknown = sorted({e.question_id for e in gt} - known)
        if unknown:
            raise ValidationError(
                f"gt entries for unknown question ids: {unknown}", file=GT_FILE
            )
