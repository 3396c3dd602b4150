"""Serialize OCR tokens into reading order for a QA context.

Tokens sort top-to-bottom, left-to-right; a new line starts when the
vertical gap between token centers reaches a tolerance scaled from the
median token height, so dense and sparse layouts both read naturally.
"""

from docqakit import DocumentOcr, FixtureSpec, Token, generate_fixture, serialize_context

doc = DocumentOcr("two-column", tokens=(
    Token("Name:", (40, 100, 110, 120)),
    Token("Anna", (120, 100, 170, 120)),
    Token("Party:", (400, 102, 470, 122)),
    Token("Green", (480, 102, 540, 122)),
    Token("Office:", (40, 160, 120, 180)),
    Token("Mayor", (130, 161, 190, 181)),
))
print("Two-column row reads across, then down:")
print(f"  {serialize_context(doc)!r}")

print("\nThe tolerance factor decides what counts as the same line:")
jittered = DocumentOcr("jitter", tokens=(
    Token("beta", (200, 100, 260, 120)),   # right of alpha, center 6px higher
    Token("alpha", (0, 106, 60, 126)),
))
for factor in (0.5, 0.1):
    print(f"  factor {factor}: {serialize_context(jittered, line_tolerance_factor=factor)!r}")
print("  (one jittered line reads left to right; two lines read top down)")

fixture = generate_fixture(FixtureSpec(n_docs=20, seed=3))
page = fixture.documents[0]
context = serialize_context(page)
print(f"\nA generated registration form, serialized ({len(page.tokens)} tokens):")
print(f"  {context[:96]}...")
print("\nThis string is exactly what adapter pipelines send as the QA context.")
