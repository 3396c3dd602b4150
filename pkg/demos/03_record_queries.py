"""Query structured records with typed constraints.

Records normalize OCR field values (dates parse, vocabularies snap,
checkboxes carry state); queries are constraint conjunctions whose
matches rank at confidence 1.0 and whose answers are read straight off
the matching records.
"""

from docqakit import (
    Constraint,
    FixtureSpec,
    StructuredQuery,
    candidate_registration_schema,
    extract_answers,
    generate_fixture,
    normalize_record,
    query_collection,
)

schema = candidate_registration_schema()

print("Normalization cleans OCR noise deterministically:")
record = normalize_record("454", {
    "candidate name": "  Anna M.  Rivers ",
    "party": "Republcan",                      # one OCR typo
    "election date": "November 3, 2020",
    "reporting option": ("Full", True),
}, schema)
print(f"  name   -> {record.fields['candidate name'].normalized!r}")
print(f"  party  -> {record.fields['party'].normalized!r} "
      f"(snapped from {record.fields['party'].raw!r})")
print(f"  date   -> {record.fields['election date'].date_iso}")
print(f"  option -> checked={record.fields['reporting option'].checked}")

fixture = generate_fixture(FixtureSpec(n_docs=40, seed=8))
query = StructuredQuery(
    "demo",
    (
        Constraint("party", "eq", ("Green",)),
        Constraint("election date", "date_year_eq", (2009,)),
    ),
    answer_field="candidate name",
)
ranking = query_collection(query, fixture.records)
matches = [r.doc_id for r in ranking if r.confidence == 1.0]
print(f"\nGreen candidates with a 2009 election: {matches}")

matched_records = [r for r in fixture.records if r.doc_id in matches]
print(f"Their names: {extract_answers(query, matched_records)}")

print("\nNegative constraints match records that never state the field:")
query = StructuredQuery(
    "demo2", (Constraint("party", "not_in", ("Democratic", "Republican")),),
    answer_field="party",
)
loose = sum(r.confidence for r in query_collection(query, fixture.records))
strict = sum(r.confidence for r in query_collection(query, fixture.records,
                                                    strict_missing=True))
print(f"  matches: {loose:.0f} default, {strict:.0f} with strict_missing "
      "(missing/invalid values excluded)")

print("\nExistence questions answer Yes or No rather than listing values:")
target = fixture.records[0]
query = StructuredQuery(
    "demo3",
    (
        Constraint("candidate name", "eq", (target.fields["candidate name"].raw,)),
        Constraint("reporting option", "checked_eq", (True,)),
    ),
    answer_field="yes_no",
)
matched = [r for r in fixture.records
           if query_collection(query, [r])[0].confidence == 1.0]
print(f"  did {target.fields['candidate name'].normalized!r} mark an option? "
      f"{extract_answers(query, matched)}")
