"""Headline normalization: tokenization, stop-word removal, stemming.

The three stages are pure functions and always run in that order;
stems are not re-checked against the stop list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .porter import stem
from .stopwords import ENGLISH_STOP_WORDS

# Maximal runs of alphanumeric characters (underscore excluded); anything
# else separates tokens.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class TokenizedDoc:
    """A document id plus its ordered, normalized token sequence."""

    doc_id: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class StopWordList:
    words: frozenset[str] = field(default=ENGLISH_STOP_WORDS)

    def __post_init__(self):
        bad = [w for w in self.words if not w or w != w.lower()]
        if bad:
            raise ValueError(f"stop words must be non-empty lowercase: {bad[:5]}")


DEFAULT_STOP_WORDS = StopWordList()


def tokenize(text: str) -> list[str]:
    """Case-fold and split on non-alphanumeric characters.

    Single-character tokens and pure-digit tokens are dropped.
    """
    tokens = _TOKEN_RE.findall(text.casefold())
    return [t for t in tokens if len(t) > 1 and not t.isdigit()]


def remove_stopwords(tokens: list[str], stoplist: StopWordList = DEFAULT_STOP_WORDS) -> list[str]:
    """Order-preserving filter of stop words; expects lowercase tokens."""
    words = stoplist.words
    return [t for t in tokens if t not in words]


def preprocess(
    text: str,
    doc_id: int = 0,
    stoplist: StopWordList = DEFAULT_STOP_WORDS,
    use_stopwords: bool = True,
    use_stem: bool = True,
) -> TokenizedDoc:
    """Tokenize, remove stop words, then stem.

    The two flags exist for ablation runs; both default to on.
    """
    tokens = tokenize(text)
    if use_stopwords:
        tokens = remove_stopwords(tokens, stoplist)
    if use_stem:
        tokens = [stem(t) for t in tokens]
    return TokenizedDoc(doc_id=doc_id, tokens=tuple(tokens))
