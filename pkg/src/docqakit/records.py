"""Structured key-value records and the constraint query engine.

Registration-style forms carry a fixed set of fields (names, a party, an
office, dates, a checkbox choice).  Once OCR output is normalized into
typed field values, a question becomes a conjunction of field constraints
plus an answer field: the engine scores every record 1.0 or 0.0, so
retrieval confidence is exact rather than fuzzy, and answers are read
straight out of the matching records.

Normalization canonicalizes dates to ISO, snaps closed-vocabulary fields
to their nearest vocabulary entry when similarity is high enough, and
lowercases free text.  Records are immutable after normalization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import date, datetime
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError
from .metrics import RankedDoc, nls

__all__ = [
    "YES_NO",
    "Constraint",
    "FieldSpec",
    "FieldValue",
    "RecordDoc",
    "Schema",
    "StructuredQuery",
    "candidate_registration_schema",
    "eval_constraint",
    "extract_answers",
    "normalize_record",
    "query_collection",
    "validate_query",
]

logger = logging.getLogger(__name__)

KINDS = ("text", "date", "checkbox")
OPS = (
    "eq", "neq", "in", "not_in",
    "date_before", "date_after", "date_between", "date_year_eq",
    "checked_eq",
)
DATE_OPS = ("date_before", "date_after", "date_between", "date_year_eq")

# Answer-field marker for existence questions answered "Yes"/"No".
YES_NO = "yes_no"

ANSWER_FORMATS = ("canonical", "year")

# Closed-vocabulary values snap to an entry at or above this similarity;
# below it the raw value is kept (lowercased) and flagged for review.
VOCABULARY_SNAP_THRESHOLD = 0.8

_DATE_FORMATS = ("%m/%d/%Y", "%Y-%m-%d", "%B %d, %Y")


@dataclass(frozen=True)
class FieldSpec:
    """Declares one schema field: its kind and optional closed vocabulary."""

    name: str
    kind: str
    vocabulary: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown field kind {self.kind!r} for field {self.name!r}")
        if self.vocabulary is not None:
            object.__setattr__(self, "vocabulary", tuple(self.vocabulary))


@dataclass(frozen=True)
class Schema:
    """Field declarations a record collection and its queries share."""

    fields: Mapping[str, FieldSpec]

    def __post_init__(self):
        object.__setattr__(self, "fields", dict(self.fields))
        for name, spec in self.fields.items():
            if name != spec.name:
                raise ValidationError(f"schema key {name!r} does not match field name {spec.name!r}")

    def field_spec(self, name: str) -> FieldSpec:
        try:
            return self.fields[name]
        except KeyError:
            raise ValidationError(f"unknown field {name!r}; schema has {sorted(self.fields)}") from None

    def to_dict(self) -> dict:
        return {
            "fields": {
                name: {"kind": spec.kind}
                | ({"vocabulary": list(spec.vocabulary)} if spec.vocabulary else {})
                for name, spec in sorted(self.fields.items())
            }
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "Schema":
        fields = {}
        for name, spec in payload.get("fields", {}).items():
            vocabulary = spec.get("vocabulary")
            fields[name] = FieldSpec(name, spec["kind"], tuple(vocabulary) if vocabulary else None)
        return cls(fields=fields)


def candidate_registration_schema() -> Schema:
    """Schema of the bundled candidate-registration form collection."""
    specs = [
        FieldSpec("candidate name", "text"),
        FieldSpec("party", "text", (
            "Republican", "Democrat", "Libertarian", "Independent", "Green",
            "Constitution", "Socialist", "Progressive", "Reform", "Nonpartisan",
        )),
        FieldSpec("office", "text"),
        FieldSpec("candidate city", "text"),
        FieldSpec("candidate county", "text"),
        FieldSpec("election date", "date"),
        FieldSpec("reporting option", "checkbox", ("Full", "Mini")),
        FieldSpec("treasurer name", "text"),
    ]
    return Schema(fields={s.name: s for s in specs})


@dataclass(frozen=True)
class FieldValue:
    """One normalized field of a record.

    ``raw`` is the OCR transcription as read; ``normalized`` the canonical
    comparison form.  Dates also carry the parsed calendar date, checkbox
    fields the checked state.  ``valid`` is False when a typed parse
    failed (the record stays queryable; typed constraints just never
    match), ``flagged`` is True when a closed-vocabulary value missed
    every entry.
    """

    raw: str
    normalized: str
    kind: str
    checked: bool | None = None
    date_iso: date | None = None
    valid: bool = True
    flagged: bool = False


@dataclass(frozen=True)
class RecordDoc:
    """One document's normalized key-value fields."""

    doc_id: str
    fields: Mapping[str, FieldValue]

    def __post_init__(self):
        if not self.doc_id:
            raise ValidationError("record doc_id must be non-empty")
        object.__setattr__(self, "fields", dict(self.fields))


def _collapse(text: str) -> str:
    return " ".join(text.split())


def _snap_to_vocabulary(raw: str, vocabulary: Sequence[str]) -> tuple[str, bool]:
    """Nearest-entry normalization; returns (normalized, flagged)."""
    cleaned = _collapse(raw)
    if not cleaned:
        return "", False
    best_entry = None
    best_score = -1.0
    for entry in vocabulary:
        score = nls(cleaned, entry)
        if score > best_score:
            best_entry, best_score = entry, score
    if best_score >= VOCABULARY_SNAP_THRESHOLD:
        return best_entry, False
    return cleaned.casefold(), True


def _parse_date(text: str) -> date | None:
    cleaned = _collapse(text)
    for fmt in _DATE_FORMATS:
        try:
            return datetime.strptime(cleaned, fmt).date()
        except ValueError:
            continue
    return None


def _normalize_text(raw: str, spec: FieldSpec) -> FieldValue:
    if spec.vocabulary:
        normalized, flagged = _snap_to_vocabulary(raw, spec.vocabulary)
        return FieldValue(raw=raw, normalized=normalized, kind="text", flagged=flagged)
    return FieldValue(raw=raw, normalized=_collapse(raw).casefold(), kind="text")


def _normalize_date(raw: str, spec: FieldSpec) -> FieldValue:
    parsed = _parse_date(raw)
    if parsed is None:
        return FieldValue(raw=raw, normalized=_collapse(raw).casefold(), kind="date", valid=False)
    return FieldValue(raw=raw, normalized=parsed.isoformat(), kind="date", date_iso=parsed)


def _normalize_checkbox(raw: str, checked: bool, spec: FieldSpec) -> FieldValue:
    if spec.vocabulary:
        normalized, flagged = _snap_to_vocabulary(raw, spec.vocabulary)
    else:
        normalized, flagged = _collapse(raw).casefold(), False
    return FieldValue(raw=raw, normalized=normalized, kind="checkbox", checked=checked, flagged=flagged)


def normalize_record(
    doc_id: str,
    raw_fields: Mapping[str, object],
    schema: Schema,
    vocabularies: Mapping[str, Sequence[str]] | None = None,
) -> RecordDoc:
    """Build a normalized record from raw transcribed field values.

    Text fields are whitespace-collapsed and lowercased, or snapped to
    the field's vocabulary when one is declared.  Date fields parse
    MM/DD/YYYY (leading zeros optional), YYYY-MM-DD, and "Month D, YYYY";
    an unparseable date keeps the record but marks the value invalid.
    Checkbox fields take a ``(label, checked)`` pair or a mapping with
    ``raw`` and ``checked`` keys.  ``vocabularies`` overrides the
    schema's per-field closed value lists.  Unknown field names and kind
    mismatches raise ValidationError.  Normalization is idempotent: a
    normalized value re-normalizes to itself.
    """
    values: dict[str, FieldValue] = {}
    for name, raw in raw_fields.items():
        spec = schema.field_spec(name)
        if vocabularies is not None and name in vocabularies:
            spec = FieldSpec(spec.name, spec.kind, tuple(vocabularies[name]))
        if spec.kind == "checkbox":
            if isinstance(raw, Mapping):
                label, checked = raw.get("raw", ""), raw.get("checked")
            elif isinstance(raw, tuple) and len(raw) == 2:
                label, checked = raw
            else:
                raise ValidationError(
                    f"checkbox field {name!r} needs a (label, checked) pair, got {raw!r}"
                )
            if not isinstance(label, str) or not isinstance(checked, bool):
                raise ValidationError(
                    f"checkbox field {name!r} needs a string label and boolean state, got {raw!r}"
                )
            values[name] = _normalize_checkbox(label, checked, spec)
            continue
        if not isinstance(raw, str):
            raise ValidationError(f"field {name!r} expects a string value, got {type(raw).__name__}")
        if spec.kind == "date":
            values[name] = _normalize_date(raw, spec)
        else:
            values[name] = _normalize_text(raw, spec)
    return RecordDoc(doc_id=doc_id, fields=values)


@dataclass(frozen=True)
class Constraint:
    """One field condition inside a structured query.

    ``values`` arity depends on ``op``: one value for eq/neq and the date
    comparisons, one or more for in/not_in, exactly [lower, upper] for
    date_between (inclusive on both ends by default), a year for
    date_year_eq, and a boolean for checked_eq.
    """

    field: str
    op: str
    values: tuple = ()
    lower_inclusive: bool = True
    upper_inclusive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if self.op not in OPS:
            raise ValidationError(f"unknown constraint op {self.op!r}; expected one of {OPS}")
        n = len(self.values)
        if self.op in ("eq", "neq", "date_before", "date_after", "date_year_eq", "checked_eq"):
            if n != 1:
                raise ValidationError(f"op {self.op!r} takes exactly one value, got {n}")
        elif self.op in ("in", "not_in"):
            if n < 1:
                raise ValidationError(f"op {self.op!r} takes at least one value")
        elif self.op == "date_between":
            if n != 2:
                raise ValidationError(f"op 'date_between' takes [lower, upper], got {n} values")


@dataclass(frozen=True)
class StructuredQuery:
    """A conjunction of constraints plus the field answers come from.

    ``answer_field`` may be the YES_NO marker for existence questions.
    ``answer_format`` "year" renders date answers as their year.
    """

    question_id: str
    constraints: tuple[Constraint, ...]
    answer_field: str
    answer_format: str = "canonical"

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.answer_format not in ANSWER_FORMATS:
            raise ValidationError(
                f"unknown answer_format {self.answer_format!r}; expected one of {ANSWER_FORMATS}"
            )


def _constraint_date(value: object, c: Constraint) -> date:
    if isinstance(value, date):
        return value
    if isinstance(value, str):
        parsed = _parse_date(value)
        if parsed is not None:
            return parsed
    raise ValidationError(f"op {c.op!r} on field {c.field!r} needs parseable dates, got {value!r}")


def _constraint_year(value: object, c: Constraint) -> int:
    if isinstance(value, bool):
        raise ValidationError(f"op 'date_year_eq' on field {c.field!r} needs a year, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.strip().isdigit():
        return int(value.strip())
    raise ValidationError(f"op 'date_year_eq' on field {c.field!r} needs a year, got {value!r}")


def validate_query(query: StructuredQuery, schema: Schema) -> None:
    """Check a query against a schema before evaluation.

    Verifies field existence, op/kind agreement (date ops on date fields,
    checked_eq on checkbox fields), value parseability, ordered
    date_between bounds, and the answer field.  Raises ValidationError.
    """
    for c in query.constraints:
        spec = schema.field_spec(c.field)
        if c.op in DATE_OPS:
            if spec.kind != "date":
                raise ValidationError(
                    f"op {c.op!r} requires a date field; {c.field!r} is {spec.kind}"
                )
            if c.op == "date_year_eq":
                _constraint_year(c.values[0], c)
            else:
                bounds = [_constraint_date(v, c) for v in c.values]
                if c.op == "date_between" and bounds[0] > bounds[1]:
                    raise ValidationError(
                        f"date_between bounds out of order on field {c.field!r}: "
                        f"{bounds[0].isoformat()} > {bounds[1].isoformat()}"
                    )
        elif c.op == "checked_eq":
            if spec.kind != "checkbox":
                raise ValidationError(
                    f"op 'checked_eq' requires a checkbox field; {c.field!r} is {spec.kind}"
                )
            if not isinstance(c.values[0], bool):
                raise ValidationError(
                    f"op 'checked_eq' on field {c.field!r} needs a boolean, got {c.values[0]!r}"
                )
        elif spec.kind == "date":
            # Plain (not) equality on a date field still compares dates.
            for v in c.values:
                _constraint_date(v, c)
    if query.answer_field != YES_NO:
        schema.field_spec(query.answer_field)


def _normalize_target(value: object, field_value: FieldValue, c: Constraint) -> object:
    """Bring a constraint value into the same space as a field value."""
    if field_value.kind == "date":
        return _constraint_date(value, c)
    if not isinstance(value, str):
        raise ValidationError(f"op {c.op!r} on field {c.field!r} needs string values, got {value!r}")
    return _collapse(value).casefold()


def eval_constraint(record: RecordDoc, constraint: Constraint, strict_missing: bool = False) -> bool:
    """Decide one constraint against one record.

    Positive ops (eq, in, the date ops, checked_eq) only match values
    that are present and valid.  Negative ops (neq, not_in) match when
    the value is present and different, and also when it is missing or
    invalid: a record that never states a party is not *of* that party.
    ``strict_missing=True`` flips that, so negatives also require a
    present, valid value.  date_before/date_after are strict; the
    date_between bounds are inclusive unless the constraint says
    otherwise.  Kind mismatches raise ValidationError.
    """
    c = constraint
    negative = c.op in ("neq", "not_in")
    value = record.fields.get(c.field)
    if value is not None and c.op in DATE_OPS and value.kind != "date":
        raise ValidationError(f"op {c.op!r} requires a date field; {c.field!r} is {value.kind}")
    if value is not None and c.op == "checked_eq" and value.kind != "checkbox":
        raise ValidationError(f"op 'checked_eq' requires a checkbox field; {c.field!r} is {value.kind}")
    if value is None or not value.valid:
        return negative and not strict_missing

    if c.op in DATE_OPS:
        d = value.date_iso
        if d is None:
            return False
        if c.op == "date_before":
            return d < _constraint_date(c.values[0], c)
        if c.op == "date_after":
            return d > _constraint_date(c.values[0], c)
        if c.op == "date_year_eq":
            return d.year == _constraint_year(c.values[0], c)
        lower = _constraint_date(c.values[0], c)
        upper = _constraint_date(c.values[1], c)
        above = d >= lower if c.lower_inclusive else d > lower
        below = d <= upper if c.upper_inclusive else d < upper
        return above and below

    if c.op == "checked_eq":
        want = c.values[0]
        if not isinstance(want, bool):
            raise ValidationError(f"op 'checked_eq' on field {c.field!r} needs a boolean, got {want!r}")
        return value.checked is want

    targets = [_normalize_target(v, value, c) for v in c.values]
    if value.kind == "date":
        matches = value.date_iso in targets
    else:
        matches = value.normalized.casefold() in targets
    return matches != negative


def query_collection(
    query: StructuredQuery,
    records: Iterable[RecordDoc],
    schema: Schema | None = None,
    strict_missing: bool = False,
) -> list[RankedDoc]:
    """Score every record against a query with binary confidence.

    A record satisfying every constraint ranks at 1.0, anything else at
    0.0 (an empty constraint list matches everything).  The full
    collection comes back sorted by confidence descending, doc id
    ascending.  The query is validated against ``schema`` first (the
    bundled candidate-registration schema when omitted).
    """
    validate_query(query, schema if schema is not None else candidate_registration_schema())
    record_list = list(records)
    seen: set[str] = set()
    for record in record_list:
        if record.doc_id in seen:
            raise ValidationError(f"duplicate doc id in collection: {record.doc_id!r}")
        seen.add(record.doc_id)
    ranking = [
        RankedDoc(
            record.doc_id,
            1.0 if all(eval_constraint(record, c, strict_missing) for c in query.constraints) else 0.0,
        )
        for record in record_list
    ]
    ranking.sort(key=lambda r: (-r.confidence, r.doc_id))
    return ranking


def extract_answers(
    query: StructuredQuery,
    relevant_records: Sequence[RecordDoc],
    paper_literal: bool = False,
) -> list[str]:
    """Read the answer list for a query off its matching records.

    Collects the answer field's normalized value from every record,
    deduplicated and sorted; date answers render as ISO dates, or as the
    year when the query asks for ``answer_format="year"``.  Existence
    queries (YES_NO) answer ["Yes"] when any record matched and ["No"]
    otherwise.  ``paper_literal=True`` reproduces a known failure mode
    for negative existence questions, answering [] instead of ["No"]
    when nothing matched.  Records lacking the answer field contribute
    nothing (logged).
    """
    if query.answer_field == YES_NO:
        if relevant_records:
            return ["Yes"]
        return [] if paper_literal else ["No"]
    answers: set[str] = set()
    for record in relevant_records:
        value = record.fields.get(query.answer_field)
        if value is None:
            logger.warning("record %s lacks answer field %r", record.doc_id, query.answer_field)
            continue
        if value.kind == "date":
            if not value.valid or value.date_iso is None:
                logger.warning("record %s has unparseable %r", record.doc_id, query.answer_field)
                continue
            if query.answer_format == "year":
                answers.add(str(value.date_iso.year))
            else:
                answers.add(value.date_iso.isoformat())
        elif value.normalized:
            answers.add(value.normalized)
        else:
            logger.warning("record %s has empty %r", record.doc_id, query.answer_field)
    return sorted(answers)
