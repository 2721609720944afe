"""Sentence splitting, tokenization and proposal/observation/scenario markers."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

_WS = re.compile(r"\s+")
_TOKEN = re.compile(r"[^\W_]+")

# Sentence boundary candidates: terminal punctuation, whitespace, then an
# uppercase letter or digit.
_BOUNDARY = re.compile(r"[.!?](?=\s+[A-Z0-9])")
_NUMBERED_ID = re.compile(r"^\(?\d+(?:\.\d+)*(?:-\d+)?[a-z]?\)?$")

ABBREVIATIONS = frozenset(
    {
        "e.g.", "i.e.", "etc.", "fig.", "figs.", "eq.", "eqs.", "sec.", "tab.",
        "ref.", "refs.", "no.", "nos.", "vs.", "cf.", "al.", "approx.", "incl.",
        "resp.", "max.", "min.", "cl.", "ch.", "vol.", "pp.", "mr.", "ms.",
        "dr.", "prof.", "inc.", "ltd.", "co.", "corp.",
    }
)

MARKER_KINDS = ("proposal", "observation", "scenario")

# Up to three qualifier words ("High Priority"), the keyword, an identifier
# such as 7, 3.1 or 3.1-1a, and an optional colon. The colon becomes
# mandatory after qualifiers so prose like "we support this proposal 1"
# is not counted.
_MARKER = re.compile(
    r"^\s*(?:(?P<qual>(?:[^\W\d_][\w-]*\s+){1,3}?)|)"
    r"(?P<kind>proposal|observation|scenario)\s+"
    r"(?P<id>\d+(?:\.\d+)*(?:-\d+)?[a-z]?)\b\s*(?P<colon>:?)",
    re.IGNORECASE,
)


def normalize_whitespace(text: str) -> str:
    """Collapse whitespace runs (non-breaking spaces included) to one space and trim."""
    return _WS.sub(" ", text.replace("\u00a0", " ")).strip()


def _load_bundled_stopwords() -> frozenset[str]:
    raw = resources.files("contribkit").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in raw.splitlines() if w.strip())


DEFAULT_STOPWORDS: frozenset[str] = _load_bundled_stopwords()


def load_stopwords(path: str | Path, extend_default: bool = True) -> frozenset[str]:
    """Read a stopword file (UTF-8, one term per line)."""
    terms = {
        line.strip().lower()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    }
    if extend_default:
        terms |= DEFAULT_STOPWORDS
    return frozenset(terms)


def split_sentences(text: str) -> list[str]:
    text = normalize_whitespace(text)
    if not text:
        return []
    sentences = []
    start = 0
    for m in _BOUNDARY.finditer(text):
        end = m.end()
        if text[m.start()] == "." and _guarded(text, start, m.start()):
            continue
        sentence = text[start:end].strip()
        if sentence:
            sentences.append(sentence)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _guarded(text: str, sent_start: int, dot: int) -> bool:
    """True when the period at ``dot`` must not end a sentence."""
    word_start = dot
    while word_start > sent_start and not text[word_start - 1].isspace():
        word_start -= 1
    word = text[word_start:dot]
    if (word + ".").lower() in ABBREVIATIONS:
        return True
    if len(word) == 1 and word.isalpha() and word.isupper():
        return True  # an initial, as in "J. Smith"
    if _NUMBERED_ID.match(word):
        # "1. Introduction", "Proposal 3.1-1a. Both ..."
        before = text[sent_start:word_start].split()
        if not before or before[-1].lower().rstrip(":") in MARKER_KINDS:
            return True
    return False


@dataclass
class TokenStats:
    term_counts: dict[str, int] = field(default_factory=dict)
    total_tokens: int = 0

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> "TokenStats":
        counts = Counter(terms)
        return cls(dict(counts), sum(counts.values()))

    def terms(self) -> list[str]:
        """Every token occurrence, grouped by term in first-seen order."""
        return [t for t, c in self.term_counts.items() for _ in range(c)]

    def __add__(self, other: "TokenStats") -> "TokenStats":
        counts = Counter(self.term_counts)
        counts.update(other.term_counts)
        return TokenStats(dict(counts), self.total_tokens + other.total_tokens)

    def __bool__(self) -> bool:
        return self.total_tokens > 0


def tokenize(text: str, stopwords: Iterable[str] | None = None) -> TokenStats:
    """Lowercased alphanumeric runs minus stopwords and one-character tokens.

    Digits stay attached to their unit, so ``20MHz`` is the single term
    ``20mhz``.
    """
    stop = DEFAULT_STOPWORDS if stopwords is None else stopwords
    terms = [t for t in _TOKEN.findall(text.lower()) if len(t) > 1 and t not in stop]
    return TokenStats.from_terms(terms)


@dataclass
class MarkerCounts:
    proposals: int = 0
    observations: int = 0
    scenarios: int = 0
    # one {"kind", "id", "text"} record per matched paragraph
    items: list[dict[str, str]] = field(default_factory=list)

    def __add__(self, other: "MarkerCounts") -> "MarkerCounts":
        return MarkerCounts(
            self.proposals + other.proposals,
            self.observations + other.observations,
            self.scenarios + other.scenarios,
            self.items + other.items,
        )

    def counts(self) -> tuple[int, int, int]:
        return self.proposals, self.observations, self.scenarios


def match_marker(paragraph: str) -> tuple[str, str] | None:
    """Return ``(kind, identifier)`` when the paragraph opens with a marker."""
    m = _MARKER.match(paragraph)
    if m is None or (m.group("qual") and not m.group("colon")):
        return None
    return m.group("kind").lower(), m.group("id")


def count_markers(paragraphs: Iterable[str]) -> MarkerCounts:
    out = MarkerCounts()
    for para in paragraphs:
        hit = match_marker(para)
        if hit is None:
            continue
        kind, ident = hit
        if kind == "proposal":
            out.proposals += 1
        elif kind == "observation":
            out.observations += 1
        else:
            out.scenarios += 1
        out.items.append({"kind": kind, "id": ident, "text": para})
    return out


def detect_markers(section) -> MarkerCounts:
    """Count marker paragraphs of one section (its own paragraphs only)."""
    return count_markers(section.paragraphs)
