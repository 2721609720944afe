"""Per-section summaries: an extractive TextRank baseline or a remote service."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embedding import ContentCache, post_json
from .errors import NoSentencesError, ProtocolError
from .textproc import DEFAULT_STOPWORDS, MarkerCounts, count_markers, split_sentences, tokenize

DAMPING = 0.85
TOLERANCE = 1e-6
MAX_ITER = 200


def overlap_matrix(sentences: list[str], stopwords=DEFAULT_STOPWORDS) -> np.ndarray:
    """Sentence graph weights: shared terms over the summed log sizes of both term sets."""
    token_sets = [set(tokenize(s, stopwords).term_counts) for s in sentences]
    n = len(sentences)
    w = np.zeros((n, n))
    for i in range(n):
        ti = token_sets[i]
        if len(ti) < 2:
            continue
        for j in range(i + 1, n):
            tj = token_sets[j]
            if len(tj) < 2:
                continue
            shared = len(ti & tj)
            if shared:
                w[i, j] = w[j, i] = shared / (math.log1p(len(ti)) + math.log1p(len(tj)))
    return w


def textrank_scores(
    sentences: list[str],
    stopwords=DEFAULT_STOPWORDS,
    damping: float = DAMPING,
    tol: float = TOLERANCE,
    max_iter: int = MAX_ITER,
) -> np.ndarray:
    """Damped power iteration over the row-normalized sentence graph.

    A sentence with no edges only collects the teleport share
    ``(1 - damping) / n``. The result is rescaled to sum to one.
    """
    n = len(sentences)
    if n == 0:
        raise NoSentencesError("no sentences to rank")
    w = overlap_matrix(sentences, stopwords)
    row = w.sum(axis=1, keepdims=True)
    m = np.divide(w, row, out=np.zeros_like(w), where=row > 0)
    s = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for _ in range(max_iter):
        nxt = base + damping * (m.T @ s)
        delta = np.abs(nxt - s).sum()
        s = nxt
        if delta < tol:
            break
    return s / s.sum()


@dataclass
class SummaryRecord:
    doc_id: str
    section_path: str
    heading: str
    summary_text: str
    method: str
    markers: MarkerCounts = field(default_factory=MarkerCounts)
    sentence_count_original: int = 0
    sentence_count_summary: int = 0
    # positions of the chosen sentences (extractive only)
    selected: list[int] = field(default_factory=list)

    @property
    def ref(self) -> str:
        return f"{self.doc_id}/{self.section_path}"


def summary_length(n: int, max_sentences: int, min_ratio: float) -> int:
    # the epsilon keeps float noise such as 0.1 * 30 = 3.0000000000000004 from rounding up
    return max(1, min(max_sentences, math.ceil(min_ratio * n - 1e-9)))


def extractive_summary(
    paragraphs: list[str],
    max_sentences: int = 3,
    min_ratio: float = 0.2,
    *,
    doc_id: str = "",
    section_path: str = "0",
    heading: str = "",
    stopwords=DEFAULT_STOPWORDS,
) -> SummaryRecord:
    if max_sentences < 1:
        raise ValueError("max_sentences must be >= 1")
    sentences = [s for p in paragraphs for s in split_sentences(p)]
    if not sentences:
        raise NoSentencesError(f"{doc_id}/{section_path}: no sentences")
    scores = textrank_scores(sentences, stopwords)
    k = summary_length(len(sentences), max_sentences, min_ratio)
    # highest score first, earlier position on ties
    order = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    chosen = sorted(order[:k])
    return SummaryRecord(
        doc_id=doc_id,
        section_path=section_path,
        heading=heading,
        summary_text=" ".join(sentences[i] for i in chosen),
        method="extractive",
        markers=count_markers(paragraphs),
        sentence_count_original=len(sentences),
        sentence_count_summary=k,
        selected=chosen,
    )


def remote_summarize(
    text: str,
    endpoint: str,
    max_tokens: int = 128,
    *,
    timeout: float = 60.0,
    cache: ContentCache | None = None,
) -> str:
    if not text or not text.strip():
        raise ValueError("cannot summarize empty text")
    namespace = f"summarize:{max_tokens}"
    if cache is not None:
        hit = cache.get(namespace, text)
        if hit is not None:
            return hit
    body = post_json(endpoint, "/v1/summarize", {"text": text, "max_tokens": max_tokens}, timeout)
    summary = body.get("summary")
    if not isinstance(summary, str):
        raise ProtocolError("response has no 'summary' string")
    if cache is not None:
        cache.put(namespace, text, summary)
    return summary


class Summarizer:
    """Summarizes sections with the configured method, always attaching marker counts."""

    def __init__(
        self,
        backend: str = "extractive",
        max_sentences: int = 3,
        min_ratio: float = 0.2,
        endpoint: str | None = None,
        max_tokens: int = 128,
        timeout: float = 60.0,
        stopwords=DEFAULT_STOPWORDS,
    ):
        if backend not in ("extractive", "remote"):
            raise ValueError(f"unknown summarization backend {backend!r}")
        if backend == "remote" and not endpoint:
            raise ValueError("remote summarization needs an endpoint")
        self.backend = backend
        self.max_sentences = max_sentences
        self.min_ratio = min_ratio
        self.endpoint = endpoint
        self.max_tokens = max_tokens
        self.timeout = timeout
        self.stopwords = stopwords
        self.cache = ContentCache()

    def summarize(self, paragraphs: list[str], doc_id: str, section_path: str, heading: str) -> SummaryRecord:
        if self.backend == "extractive":
            return extractive_summary(
                paragraphs,
                self.max_sentences,
                self.min_ratio,
                doc_id=doc_id,
                section_path=section_path,
                heading=heading,
                stopwords=self.stopwords,
            )
        sentences = [s for p in paragraphs for s in split_sentences(p)]
        if not sentences:
            raise NoSentencesError(f"{doc_id}/{section_path}: no sentences")
        text = " ".join(sentences)
        summary = remote_summarize(text, self.endpoint, self.max_tokens, timeout=self.timeout, cache=self.cache)
        return SummaryRecord(
            doc_id=doc_id,
            section_path=section_path,
            heading=heading,
            summary_text=summary,
            method="remote",
            markers=count_markers(paragraphs),
            sentence_count_original=len(sentences),
            sentence_count_summary=len(split_sentences(summary)),
        )
