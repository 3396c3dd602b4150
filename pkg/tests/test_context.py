"""Tests for reading-order context serialization."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from docqakit import DocumentOcr, Token, serialize_context


def _token(text, x1, y1, x2, y2):
    return Token(text=text, bbox=(float(x1), float(y1), float(x2), float(y2)))


class TestSerializeContext:
    def test_empty_document_serializes_empty(self):
        assert serialize_context(DocumentOcr("d")) == ""

    def test_single_token(self):
        doc = DocumentOcr("d", (_token("word", 0, 0, 40, 20),))
        assert serialize_context(doc) == "word"

    def test_reads_left_to_right_within_a_line(self):
        doc = DocumentOcr("d", (
            _token("right", 100, 0, 140, 20),
            _token("left", 0, 0, 30, 20),
            _token("middle", 50, 0, 90, 20),
        ))
        assert serialize_context(doc) == "left middle right"

    def test_reads_top_to_bottom_across_lines(self):
        doc = DocumentOcr("d", (
            _token("below", 0, 100, 40, 120),
            _token("above", 0, 0, 40, 20),
        ))
        assert serialize_context(doc) == "above below"

    def test_small_vertical_jitter_stays_on_one_line(self):
        # Heights of 20 with 2px jitter: well under half the median height.
        doc = DocumentOcr("d", (
            _token("b", 50, 2, 70, 22),
            _token("a", 0, 0, 20, 20),
        ))
        assert serialize_context(doc) == "a b"

    def test_line_split_scales_with_token_height(self):
        # "p" sits right and slightly higher, "q" left and slightly lower,
        # centers 14 apart.  Small tokens (height 10, tolerance 5) split
        # into two lines so "p" reads first; tall tokens (height 100,
        # tolerance 50) share a line so leftmost "q" reads first.
        small = DocumentOcr("d", (
            _token("p", 100, 5, 120, 15),
            _token("q", 0, 19, 20, 29),
        ))
        tall = DocumentOcr("d", (
            _token("p", 100, 0, 120, 100),
            _token("q", 0, 14, 20, 114),
        ))
        assert serialize_context(small) == "p q"
        assert serialize_context(tall) == "q p"

    def test_factor_controls_line_splitting(self):
        # Centers 14 apart on height-20 tokens: factor 0.5 (tolerance 10)
        # splits lines, factor 1.5 (tolerance 30) merges them, flipping
        # the reading order of a right-high / left-low pair.
        doc = DocumentOcr("d", (
            _token("p", 100, 0, 120, 20),
            _token("q", 0, 14, 20, 34),
        ))
        assert serialize_context(doc, line_tolerance_factor=0.5) == "p q"
        assert serialize_context(doc, line_tolerance_factor=1.5) == "q p"

    def test_two_column_layout_reads_row_by_row(self):
        doc = DocumentOcr("d", (
            _token("r1c1", 0, 0, 40, 20),
            _token("r1c2", 200, 0, 240, 20),
            _token("r2c1", 0, 40, 40, 60),
            _token("r2c2", 200, 40, 240, 60),
        ))
        assert serialize_context(doc) == "r1c1 r1c2 r2c1 r2c2"

    def test_same_position_ties_break_on_text(self):
        doc = DocumentOcr("d", (
            _token("zeta", 0, 0, 40, 20),
            _token("alpha", 0, 0, 40, 20),
        ))
        assert serialize_context(doc) == "alpha zeta"

    def test_rejects_negative_factor(self):
        doc = DocumentOcr("d", (_token("a", 0, 0, 10, 10),))
        with pytest.raises(ValueError):
            serialize_context(doc, line_tolerance_factor=-0.5)

    def test_zero_factor_gives_every_token_its_own_line(self):
        doc = DocumentOcr("d", (
            _token("p", 100, 0, 120, 20),
            _token("q", 0, 1, 20, 21),
        ))
        # One pixel of jitter still separates lines at factor zero, so
        # vertical position alone decides the order.
        assert serialize_context(doc, line_tolerance_factor=0.0) == "p q"

    @settings(max_examples=60, deadline=None)
    @given(st.lists(
        st.tuples(
            st.text(alphabet="abcdef", min_size=1, max_size=6),
            st.integers(min_value=0, max_value=500),
            st.integers(min_value=0, max_value=700),
        ),
        min_size=1, max_size=20,
    ))
    def test_output_words_are_exactly_the_token_texts(self, raw_tokens):
        tokens = tuple(
            _token(text, x, y, x + 8 * len(text), y + 20) for text, x, y in raw_tokens
        )
        doc = DocumentOcr("d", tokens)
        words = serialize_context(doc).split()
        assert sorted(words) == sorted(t.text for t in tokens)

    def test_serialization_is_input_order_independent(self):
        rng = random.Random(9)
        tokens = [
            _token(f"w{i}", (i % 5) * 60, (i // 5) * 40, (i % 5) * 60 + 40, (i // 5) * 40 + 20)
            for i in range(20)
        ]
        doc_a = DocumentOcr("d", tuple(tokens))
        shuffled = tokens[:]
        rng.shuffle(shuffled)
        doc_b = DocumentOcr("d", tuple(shuffled))
        assert serialize_context(doc_a) == serialize_context(doc_b)

    def test_fixture_documents_read_title_first(self, fixture100):
        text = serialize_context(fixture100.documents[0])
        assert text.startswith("Candidate Registration Form")
