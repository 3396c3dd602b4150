"""Seeded synthetic candidate-registration collections.

Real form collections are large and licensed, so tests and demos run on
generated ones: records with the bundled registration schema, OCR token
layouts rendering each field as a label-value line, a query set covering
every constraint op, and ground truth computed by filtering the records
with the very engine under test (tests recompute it independently).

Everything derives from one ``random.Random(seed)``, so a (spec, seed)
pair reproduces files byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Mapping, Sequence

from .dataset_io import (
    Collection,
    GroundTruthEntry,
    Question,
    save_documents,
    save_gt,
    save_questions,
    save_records,
    save_schema,
)
from .errors import ValidationError
from .records import (
    YES_NO,
    Constraint,
    FieldSpec,
    RecordDoc,
    Schema,
    StructuredQuery,
    candidate_registration_schema,
    extract_answers,
    normalize_record,
    query_collection,
)
from .textspot import DocumentOcr, Token

__all__ = ["Fixture", "FixtureSpec", "generate_fixture", "inject_ocr_noise", "save_fixture"]

_FIRST_NAMES = (
    "Anna", "Brian", "Carla", "Derek", "Elena", "Frank", "Gloria", "Henry",
    "Irene", "Jacob", "Karen", "Louis", "Maria", "Nathan", "Olivia", "Peter",
    "Quinn", "Rachel", "Samuel", "Teresa", "Ulysses", "Valerie", "Walter",
    "Ximena", "Yolanda", "Zachary", "Alice", "Bernard", "Cynthia", "Dominic",
    "Esther", "Felix", "Georgia", "Harold", "Isabel", "Jerome", "Kendra",
    "Lionel", "Monica", "Norman",
)

_LAST_NAMES = (
    "Rivers", "Walker", "Thompson", "Garcia", "Mitchell", "Anderson", "Clark",
    "Ramirez", "Lewis", "Robinson", "Hall", "Young", "Allen", "King", "Wright",
    "Scott", "Torres", "Nguyen", "Hill", "Flores", "Green", "Adams", "Nelson",
    "Baker", "Rivera", "Campbell", "Carter", "Phillips", "Evans", "Turner",
    "Parker", "Collins", "Edwards", "Stewart", "Morris", "Murphy", "Cook",
    "Rogers", "Morgan", "Peterson", "Cooper", "Reed", "Bailey", "Bell",
    "Gomez", "Kelly", "Howard", "Ward", "Cox", "Diaz",
)

_PARTIES = (
    "Republican", "Democrat", "Libertarian", "Independent", "Green",
    "Constitution", "Socialist", "Progressive", "Reform", "Nonpartisan",
)

_OFFICES = (
    "State Senator", "State Representative", "Governor", "Attorney General",
    "County Commissioner", "City Council Member", "Mayor",
    "School Board Director", "Superior Court Judge", "Secretary of State",
    "State Treasurer", "State Auditor",
)

_CITIES = (
    "Seattle", "Spokane", "Tacoma", "Vancouver", "Bellevue", "Kent",
    "Everett", "Renton", "Yakima", "Olympia", "Kirkland", "Bellingham",
    "Kennewick", "Auburn", "Pasco", "Redmond", "Shoreline", "Richland",
    "Lacey", "Burien", "Lakewood", "Bothell", "Edmonds", "Puyallup",
    "Bremerton", "Lynnwood", "Issaquah", "Longview", "Wenatchee", "Pullman",
)

_COUNTIES = (
    "Adams", "Benton", "Chelan", "Clark", "Douglas", "Franklin", "Grant",
    "Island", "Jefferson", "King", "Kitsap", "Lewis", "Pierce", "Snohomish",
    "Spokane", "Thurston", "Walla Walla", "Whatcom", "Whitman", "Yakima",
)

_REPORTING_OPTIONS = ("Full", "Mini")

_MONTH_NAMES = (
    "", "January", "February", "March", "April", "May", "June", "July",
    "August", "September", "October", "November", "December",
)

# Page layout constants for the rendered OCR documents.
_PAGE_SIZE = (850, 1100)
_ROW_HEIGHT = 22
_ROW_PITCH = 60
_LABEL_X = 40
_VALUE_X = 300
_CHAR_WIDTH = 9
_TOKEN_GAP = 10

_POOLED_FIELDS = ("party", "office", "candidate city", "candidate county",
                  "election date", "reporting option")

_DEFAULT_CARDINALITIES = {
    "party": 10,
    "office": 12,
    "candidate city": 30,
    "candidate county": 15,
    "election date": 27,
    "reporting option": 2,
}

_DEFAULT_MISSING_RATES = {
    "party": 0.015,
    "candidate city": 0.002,
    "candidate county": 0.002,
}


def _general_election(year: int) -> date:
    # First Tuesday after the first Monday of November.
    day = date(year, 11, 1)
    while day.weekday() != 0:
        day += timedelta(days=1)
    return day + timedelta(days=1)


def _primary_election(year: int) -> date:
    # First Tuesday of August.
    day = date(year, 8, 1)
    while day.weekday() != 1:
        day += timedelta(days=1)
    return day


def _election_date_pool(count: int) -> list[date]:
    pool: list[date] = []
    year = 2021
    while len(pool) < count:
        pool.append(_general_election(year))
        if len(pool) < count:
            pool.append(_primary_election(year))
        year -= 1
    return sorted(pool)


def _synthetic_pool(base: Sequence[str], count: int, template: str) -> list[str]:
    values = list(base[:count])
    index = 1
    while len(values) < count:
        values.append(template.format(index))
        index += 1
    return values


@dataclass(frozen=True)
class FixtureSpec:
    """Parameters of a synthetic collection.

    ``field_cardinalities`` sets how many distinct values each pooled
    field draws from (every value is guaranteed to appear when enough
    documents carry the field); ``missing_rates`` the fraction of
    documents omitting a field entirely.
    """

    n_docs: int = 100
    seed: int = 0
    field_cardinalities: Mapping[str, int] = field(
        default_factory=lambda: dict(_DEFAULT_CARDINALITIES))
    missing_rates: Mapping[str, float] = field(
        default_factory=lambda: dict(_DEFAULT_MISSING_RATES))

    def __post_init__(self):
        object.__setattr__(self, "field_cardinalities",
                           dict(_DEFAULT_CARDINALITIES) | dict(self.field_cardinalities))
        object.__setattr__(self, "missing_rates",
                           dict(_DEFAULT_MISSING_RATES) | dict(self.missing_rates))
        if self.n_docs < 20:
            raise ValidationError(
                f"fixtures need n_docs >= 20 so every query template finds a match, got {self.n_docs}"
            )
        for name, cardinality in self.field_cardinalities.items():
            if name not in _POOLED_FIELDS:
                raise ValidationError(f"no value pool for field {name!r}; pooled fields: {_POOLED_FIELDS}")
            if cardinality < 1:
                raise ValidationError(f"cardinality for {name!r} must be >= 1, got {cardinality}")
        if self.field_cardinalities["reporting option"] > 2:
            raise ValidationError("reporting option is a two-value checkbox")
        for name, rate in self.missing_rates.items():
            if name not in _POOLED_FIELDS:
                raise ValidationError(
                    f"missing rates apply to pooled fields only, not {name!r}")
            if not 0.0 <= rate <= 1.0:
                raise ValidationError(f"missing rate for {name!r} must be in [0, 1], got {rate}")


@dataclass
class Fixture:
    """A generated collection plus its questions and ground truth."""

    documents: list[DocumentOcr]
    records: list[RecordDoc]
    questions: list[Question]
    gt: list[GroundTruthEntry]
    schema: Schema

    @property
    def collection(self) -> Collection:
        return Collection(documents=self.documents, records=self.records, schema=self.schema)


def _build_pools(spec: FixtureSpec) -> dict[str, list[str]]:
    cardinality = spec.field_cardinalities
    dates = _election_date_pool(cardinality["election date"])
    return {
        "party": _synthetic_pool(_PARTIES, cardinality["party"], "Unity Party {}"),
        "office": _synthetic_pool(_OFFICES, cardinality["office"], "District Office {}"),
        "candidate city": _synthetic_pool(_CITIES, cardinality["candidate city"], "Cedarville {}"),
        "candidate county": _synthetic_pool(_COUNTIES, cardinality["candidate county"], "Cedar County {}"),
        "election date": [d.isoformat() for d in dates],
        "reporting option": list(_REPORTING_OPTIONS[:cardinality["reporting option"]]),
    }


def _schema_for(pools: Mapping[str, list[str]]) -> Schema:
    specs = [
        FieldSpec("candidate name", "text"),
        FieldSpec("party", "text", tuple(pools["party"])),
        FieldSpec("office", "text"),
        FieldSpec("candidate city", "text"),
        FieldSpec("candidate county", "text"),
        FieldSpec("election date", "date"),
        FieldSpec("reporting option", "checkbox", tuple(_REPORTING_OPTIONS)),
        FieldSpec("treasurer name", "text"),
    ]
    return Schema(fields={s.name: s for s in specs})


def _coverage_assignment(rng: random.Random, values: Sequence[str], count: int) -> list[str]:
    # Cycle through the pool so every value appears, then shuffle.
    assigned = [values[i % len(values)] for i in range(count)]
    rng.shuffle(assigned)
    return assigned


def _random_name(rng: random.Random) -> str:
    first = rng.choice(_FIRST_NAMES)
    middle = chr(ord("A") + rng.randrange(26))
    last = rng.choice(_LAST_NAMES)
    return f"{first} {middle}. {last}"


def _render_date(rng: random.Random, iso: str) -> str:
    d = date.fromisoformat(iso)
    style = rng.randrange(10)
    if style < 6:
        return f"{d.month:02d}/{d.day:02d}/{d.year}"
    if style < 8:
        return iso
    return f"{_MONTH_NAMES[d.month]} {d.day}, {d.year}"


def _render_case(rng: random.Random, value: str) -> str:
    style = rng.randrange(10)
    if style == 0:
        return value.upper()
    if style == 1:
        return value.lower()
    return value


def _generate_raw_records(rng: random.Random, spec: FixtureSpec,
                          pools: Mapping[str, list[str]]) -> list[tuple[str, dict]]:
    n = spec.n_docs
    doc_ids = [f"{i + 1:05d}" for i in range(n)]

    present: dict[str, list[bool]] = {}
    for name in _POOLED_FIELDS:
        rate = spec.missing_rates.get(name, 0.0)
        missing = round(rate * n)
        flags = [True] * n
        for index in rng.sample(range(n), missing):
            flags[index] = False
        present[name] = flags

    # Unselected checkboxes: present but with no option marked.
    unchecked = [False] * n
    for index in rng.sample(range(n), round(0.08 * n)):
        unchecked[index] = True

    assignments: dict[str, list[str]] = {}
    for name in ("party", "office", "candidate city", "candidate county", "election date"):
        count = sum(present[name])
        assignments[name] = _coverage_assignment(rng, pools[name], count)
    option_count = sum(
        1 for i in range(n) if present["reporting option"][i] and not unchecked[i]
    )
    assignments["reporting option"] = _coverage_assignment(
        rng, pools["reporting option"], option_count)

    cursors = {name: 0 for name in assignments}

    def next_value(name: str) -> str:
        value = assignments[name][cursors[name]]
        cursors[name] += 1
        return value

    raw_records = []
    for i, doc_id in enumerate(doc_ids):
        fields: dict[str, object] = {"candidate name": _random_name(rng)}
        if present["party"][i]:
            fields["party"] = _render_case(rng, next_value("party"))
        if present["office"][i]:
            fields["office"] = _render_case(rng, next_value("office"))
        if present["candidate city"][i]:
            fields["candidate city"] = _render_case(rng, next_value("candidate city"))
        if present["candidate county"][i]:
            fields["candidate county"] = _render_case(rng, next_value("candidate county"))
        if present["election date"][i]:
            fields["election date"] = _render_date(rng, next_value("election date"))
        if present["reporting option"][i]:
            if unchecked[i]:
                fields["reporting option"] = ("", False)
            else:
                fields["reporting option"] = (next_value("reporting option"), True)
        fields["treasurer name"] = _random_name(rng)
        raw_records.append((doc_id, fields))
    return raw_records


def _layout_row(tokens: list[Token], texts: Sequence[str], x: float, y: float) -> float:
    for text in texts:
        width = _CHAR_WIDTH * len(text)
        tokens.append(Token(text=text, bbox=(x, y, x + width, y + _ROW_HEIGHT)))
        x += width + _TOKEN_GAP
    return x


def _render_document(rng: random.Random, doc_id: str, fields: Mapping[str, object]) -> DocumentOcr:
    tokens: list[Token] = []
    _layout_row(tokens, ["Candidate", "Registration", "Form"], _LABEL_X, 24)
    row = 0
    for name in ("candidate name", "party", "office", "candidate city",
                 "candidate county", "election date", "reporting option", "treasurer name"):
        if name not in fields:
            continue
        y = 90 + row * _ROW_PITCH
        row += 1
        label_words = [w.capitalize() for w in name.split()]
        label_words[-1] += ":"
        _layout_row(tokens, label_words, _LABEL_X, y)
        value = fields[name]
        if isinstance(value, tuple):
            label, checked = value
            marks = []
            for option in _REPORTING_OPTIONS:
                marks.append("[x]" if checked and option == label else "[_]")
                marks.append(option)
            _layout_row(tokens, marks, _VALUE_X, y)
        else:
            _layout_row(tokens, str(value).split(), _VALUE_X, y)
    confident = [
        Token(
            text=t.text,
            bbox=t.bbox,
            ocr_confidence=round(rng.uniform(0.88, 0.99), 4),
        )
        for t in tokens
    ]
    return DocumentOcr(doc_id=doc_id, tokens=tuple(confident), page_size=_PAGE_SIZE)


def _pick_anchor(rng: random.Random, records: Sequence[RecordDoc], predicate) -> RecordDoc:
    start = rng.randrange(len(records))
    for offset in range(len(records)):
        record = records[(start + offset) % len(records)]
        if predicate(record):
            return record
    raise ValidationError("no record satisfies a query template; n_docs too small")


def _field_ok(record: RecordDoc, name: str) -> bool:
    value = record.fields.get(name)
    return value is not None and value.valid and bool(value.normalized)


def _other_values(rng: random.Random, pool: Sequence[str], exclude: str, count: int) -> list[str]:
    candidates = [v for v in pool if v != exclude]
    return rng.sample(candidates, count)


def _date_text(iso: str) -> str:
    d = date.fromisoformat(iso)
    return f"{d.month:02d}/{d.day:02d}/{d.year}"


def _display(record: RecordDoc, name: str, pools: Mapping[str, list[str]]) -> str:
    # Pool spelling of a record's normalized value, for readable questions.
    normalized = record.fields[name].normalized
    for value in pools[name]:
        if value.casefold() == normalized.casefold():
            return value
    return normalized


def _build_queries(rng: random.Random, records: Sequence[RecordDoc],
                   pools: Mapping[str, list[str]]) -> list[Question]:
    questions: list[Question] = []

    def add(question_id: str, text: str, constraints: list[Constraint],
            answer_field: str, answer_format: str = "canonical") -> None:
        questions.append(Question(
            question_id=question_id,
            text=text,
            query=StructuredQuery(
                question_id=question_id,
                constraints=tuple(constraints),
                answer_field=answer_field,
                answer_format=answer_format,
            ),
        ))

    def anchor_with(*names: str, predicate=None) -> RecordDoc:
        def ok(record: RecordDoc) -> bool:
            if not all(_field_ok(record, n) for n in names):
                return False
            return predicate(record) if predicate else True
        return _pick_anchor(rng, records, ok)

    a = anchor_with("party")
    party = _display(a, "party", pools)
    add("q01", f"List the candidates registered with the {party} party.",
        [Constraint("party", "eq", (party,))], "candidate name")

    a = anchor_with("candidate county")
    county = _display(a, "candidate county", pools)
    anchor_party = a.fields["party"].normalized if _field_ok(a, "party") else ""
    not_party = _other_values(rng, pools["party"], anchor_party, 1)[0]
    add("q02", f"Which candidates ran in {county} county but not for the {not_party} party?",
        [Constraint("candidate county", "eq", (county,)),
         Constraint("party", "neq", (not_party,))], "candidate name")

    a = anchor_with("party", "candidate city")
    city = _display(a, "candidate city", pools)
    party = _display(a, "party", pools)
    others = _other_values(rng, pools["party"], party, 2)
    add("q03", f"Which candidates from the {party}, {others[0]} or {others[1]} parties ran in {city}?",
        [Constraint("candidate city", "eq", (city,)),
         Constraint("party", "in", (party, *others))], "candidate name")

    a = anchor_with("candidate city")
    city = _display(a, "candidate city", pools)
    excluded = _other_values(
        rng, pools["party"],
        a.fields["party"].normalized if _field_ok(a, "party") else "", 2)
    add("q04", f"Which candidates in {city} belonged to neither the {excluded[0]} nor the {excluded[1]} party?",
        [Constraint("candidate city", "eq", (city,)),
         Constraint("party", "not_in", tuple(excluded))], "candidate name")

    a = anchor_with("office", "election date")
    office = _display(a, "office", pools)
    before = (a.fields["election date"].date_iso + timedelta(days=1)).isoformat()
    add("q05", f"Who ran for {office} before {_date_text(before)}?",
        [Constraint("office", "eq", (office,)),
         Constraint("election date", "date_before", (before,))], "candidate name")

    a = anchor_with("party", "election date")
    party = _display(a, "party", pools)
    after = (a.fields["election date"].date_iso - timedelta(days=1)).isoformat()
    add("q06", f"Which {party} candidates ran after {_date_text(after)}?",
        [Constraint("party", "eq", (party,)),
         Constraint("election date", "date_after", (after,))], "candidate name")

    a = anchor_with("office", "election date")
    office = _display(a, "office", pools)
    low = a.fields["election date"].date_iso.isoformat()
    high = (a.fields["election date"].date_iso + timedelta(days=45)).isoformat()
    add("q07", f"Who ran for {office} between {_date_text(low)} and {_date_text(high)}?",
        [Constraint("office", "eq", (office,)),
         Constraint("election date", "date_between", (low, high))], "candidate name")

    a = anchor_with("party", "election date")
    party = _display(a, "party", pools)
    year = a.fields["election date"].date_iso.year
    add("q08", f"Which candidates of the {party} party ran in {year}?",
        [Constraint("party", "eq", (party,)),
         Constraint("election date", "date_year_eq", (year,))], "candidate name")

    a = anchor_with("candidate name",
                    predicate=lambda r: r.fields.get("reporting option") is not None
                    and r.fields["reporting option"].checked)
    name = _display_name(a)
    add("q09", f"Did {name} mark a reporting option?",
        [Constraint("candidate name", "eq", (name,)),
         Constraint("reporting option", "checked_eq", (True,))], YES_NO)

    a = anchor_with("candidate name", "election date",
                    predicate=lambda r: r.fields.get("reporting option") is not None
                    and r.fields["reporting option"].normalized == "Full")
    name = _display_name(a)
    election = a.fields["election date"].date_iso.isoformat()
    add("q10", f"Did {name} pick the Full reporting option for the {_date_text(election)} election?",
        [Constraint("candidate name", "eq", (name,)),
         Constraint("election date", "eq", (election,)),
         Constraint("reporting option", "eq", ("Full",))], YES_NO)

    a = anchor_with("office", "candidate county", "election date")
    office = _display(a, "office", pools)
    county = _display(a, "candidate county", pools)
    add("q11", f"In which years did candidates run for {office} in {county} county?",
        [Constraint("office", "eq", (office,)),
         Constraint("candidate county", "eq", (county,))],
        "election date", answer_format="year")

    a = anchor_with("candidate name", "reporting option")
    name = _display_name(a)
    add("q12", f"Which reporting option did {name} choose?",
        [Constraint("candidate name", "eq", (name,))], "reporting option")

    a = anchor_with("party", "treasurer name")
    party = _display(a, "party", pools)
    add("q13", f"Who acted as treasurer for {party} candidates?",
        [Constraint("party", "eq", (party,))], "treasurer name")

    a = anchor_with("office", "treasurer name")
    office = _display(a, "office", pools)
    add("q14", f"Who were the treasurers of the candidates for {office}?",
        [Constraint("office", "eq", (office,))], "treasurer name")

    return questions


def _display_name(record: RecordDoc) -> str:
    return record.fields["candidate name"].raw


def generate_fixture(spec: FixtureSpec) -> Fixture:
    """Generate a complete synthetic collection for a fixture spec.

    Ground truth comes from filtering the generated records with the
    query engine; anchor-based query construction guarantees every
    question at least one relevant document.
    """
    rng = random.Random(spec.seed)
    pools = _build_pools(spec)
    schema = _schema_for(pools)
    raw_records = _generate_raw_records(rng, spec, pools)
    records = [normalize_record(doc_id, fields, schema) for doc_id, fields in raw_records]
    documents = [_render_document(rng, doc_id, fields) for doc_id, fields in raw_records]
    questions = _build_queries(rng, records, pools)
    by_id = {record.doc_id: record for record in records}
    gt = []
    for question in questions:
        ranking = query_collection(question.query, records, schema)
        relevant = sorted(r.doc_id for r in ranking if r.confidence == 1.0)
        answers = extract_answers(question.query, [by_id[doc_id] for doc_id in relevant])
        gt.append(GroundTruthEntry(
            question_id=question.question_id,
            answers=tuple(answers),
            relevant_doc_ids=frozenset(relevant),
        ))
    return Fixture(documents=documents, records=records, questions=questions, gt=gt, schema=schema)


def inject_ocr_noise(
    records: Sequence[RecordDoc],
    field_names: Sequence[str],
    rate: float,
    seed: int,
    schema: Schema | None = None,
) -> list[RecordDoc]:
    """Corrupt one character in the listed fields of a fraction of records.

    Picks ``round(rate * len(records))`` records (at least one when rate
    is positive), substitutes a single alphanumeric character in each
    listed field's raw value, and re-normalizes.  Ground truth computed
    before injection stays clean, which is the point: measuring how
    answer scores degrade under OCR noise while retrieval is unaffected
    (as long as constrained fields are not listed).
    """
    if not 0.0 <= rate <= 1.0:
        raise ValidationError(f"noise rate must be in [0, 1], got {rate}")
    schema = schema if schema is not None else candidate_registration_schema()
    rng = random.Random(seed)
    record_list = list(records)
    count = round(rate * len(record_list))
    if rate > 0:
        count = max(count, 1)
    chosen = set(rng.sample(range(len(record_list)), count))
    noisy: list[RecordDoc] = []
    for index, record in enumerate(record_list):
        if index not in chosen:
            noisy.append(record)
            continue
        raw_fields: dict[str, object] = {}
        for name, value in record.fields.items():
            if value.kind == "checkbox":
                raw = value.raw
                if name in field_names and raw:
                    raw = _corrupt(rng, raw)
                raw_fields[name] = (raw, value.checked)
            else:
                raw = value.raw
                if name in field_names and raw:
                    raw = _corrupt(rng, raw)
                raw_fields[name] = raw
        noisy.append(normalize_record(record.doc_id, raw_fields, schema))
    return noisy


def _corrupt(rng: random.Random, text: str) -> str:
    positions = [i for i, ch in enumerate(text) if ch.isalnum()]
    if not positions:
        return text
    position = rng.choice(positions)
    original = text[position]
    if original.isdigit():
        alphabet = "0123456789".replace(original, "")
    else:
        alphabet = "abcdefghijklmnopqrstuvwxyz".replace(original.lower(), "")
    replacement = rng.choice(alphabet)
    return text[:position] + replacement + text[position + 1:]


def save_fixture(fixture: Fixture, out_dir: str | Path) -> None:
    """Write a fixture as a loadable collection directory."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    save_documents(fixture.documents, directory / "documents.json")
    save_records(fixture.records, directory / "records.json")
    save_schema(fixture.schema, directory / "schema.json")
    save_questions(fixture.questions, directory / "questions.json")
    save_gt(fixture.gt, directory / "gt.json")
