"""Tokenizer offsets and fragment-to-token-range mapping."""

import pytest

from sdec_bridge.errors import EmptyPrompt, SpanNotFound
from sdec_bridge.tokenizer import find_token_span, tokenize


def test_offsets_cover_words_and_punctuation():
    tokens = tokenize("a dog, chasing!")
    assert [t.text for t in tokens] == ["a", "dog", ",", "chasing", "!"]
    assert [(t.start, t.end) for t in tokens] == [(0, 1), (2, 5), (5, 6), (7, 14), (14, 15)]


def test_tokens_reconstruct_their_slices():
    text = "a photo of a dog chasing a frisbee in a park"
    for token in tokenize(text):
        assert text[token.start:token.end] == token.text


def test_find_span_basic():
    text = "a photo of a dog chasing a frisbee"
    assert find_token_span(text, "a photo of a dog") == (0, 5)
    assert find_token_span(text, "chasing") == (5, 6)
    assert find_token_span(text, "a frisbee") == (6, 8)


def test_find_span_rejects_missing_and_mid_token():
    text = "a photo of a dog"
    with pytest.raises(SpanNotFound):
        find_token_span(text, "a cat")
    with pytest.raises(SpanNotFound):
        find_token_span(text, "hoto")  # inside the token "photo"
    with pytest.raises(SpanNotFound):
        find_token_span(text, "")


def test_find_span_skips_mid_token_occurrence():
    # "og c" exists as characters but splits tokens; "dog" later is clean
    text = "dogma dog"
    assert find_token_span(text, "dog") == (1, 2)


def test_repeated_word_takes_first_boundary_match():
    text = "a dog and a dog"
    assert find_token_span(text, "a dog") == (0, 2)


def test_empty_prompt():
    with pytest.raises(EmptyPrompt):
        find_token_span("   ", "a")
