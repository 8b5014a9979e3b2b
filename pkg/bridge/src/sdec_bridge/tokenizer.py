"""Word/punctuation tokenizer with character offsets.

Deliberately tiny: runs of word characters, or single non-space symbols.  The
offsets are what matter — they let a free-text identity fragment be mapped to
a token-index range the embedding partition can use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyPrompt, SpanNotFound

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def find_token_span(text: str, fragment: str) -> tuple[int, int]:
    """Token-index range [lo, hi) covering ``fragment`` inside ``text``.

    The fragment must occur verbatim and on token boundaries: an occurrence
    that starts or ends in the middle of a token does not count.  The first
    boundary-respecting occurrence wins.
    """
    tokens = tokenize(text)
    if not tokens:
        raise EmptyPrompt("prompt has no tokens")
    if not fragment or not tokenize(fragment):
        raise SpanNotFound("identity fragment has no tokens")
    search = 0
    while True:
        at = text.find(fragment, search)
        if at < 0:
            raise SpanNotFound(
                f"fragment {fragment!r} not found on token boundaries in {text!r}"
            )
        lo_char, hi_char = at, at + len(fragment)
        covered = [i for i, t in enumerate(tokens)
                   if t.start < hi_char and t.end > lo_char]
        if covered and all(
            lo_char <= tokens[i].start and tokens[i].end <= hi_char for i in covered
        ):
            return covered[0], covered[-1] + 1
        search = at + 1
