"""Cosine similarity, heading/content weighting, pair ranking and Pearson's r."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import (
    DimMismatchError,
    InsufficientDataError,
    NoPairsError,
    ZeroVarianceError,
    ZeroVectorError,
)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimMismatchError(f"cannot compare dims {u.shape} and {v.shape}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError()
    return max(-1.0, min(1.0, float(np.dot(u, v)) / (nu * nv)))


def combined_similarity(heading_sim: float, content_sim: float, w: float = 0.5) -> float:
    if not 0.0 <= w <= 1.0:
        raise ValueError("heading weight must lie in [0, 1]")
    return w * heading_sim + (1.0 - w) * content_sim


@dataclass
class SimilarityConfig:
    heading_weight: float = 0.5
    include_intra_document: bool = False
    top_k: int = 5

    def __post_init__(self) -> None:
        if not 0.0 <= self.heading_weight <= 1.0:
            raise ValueError("heading_weight must lie in [0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass
class SectionVectors:
    """What pairwise comparison needs to know about one leaf section."""

    doc_id: str
    path: tuple[int, ...]
    company: str
    heading_vec: np.ndarray
    content_vec: np.ndarray

    @property
    def ref(self) -> str:
        return f"{self.doc_id}/{'.'.join(map(str, self.path)) or '0'}"

    @property
    def key(self) -> tuple:
        return (self.doc_id, self.path)


@dataclass
class PairScore:
    a_ref: str
    b_ref: str
    a_company: str
    b_company: str
    heading_sim: float | None
    content_sim: float
    combined: float
    level: str = "section"

    @property
    def pair_id(self) -> str:
        return f"{self.a_ref}~{self.b_ref}"

    @property
    def a_doc(self) -> str:
        return self.a_ref.split("/", 1)[0]

    @property
    def b_doc(self) -> str:
        return self.b_ref.split("/", 1)[0]


def pairwise_sections(units: Sequence[SectionVectors], config: SimilarityConfig | None = None) -> list[PairScore]:
    """Score every unordered pair of sections from distinct documents.

    Pairs come out ordered by ``(a, b)`` where ``a`` precedes ``b`` in
    (document id, section path) order.
    """
    config = config or SimilarityConfig()
    ordered = sorted(units, key=lambda u: u.key)
    pairs = []
    for a, b in combinations(ordered, 2):
        if a.doc_id == b.doc_id and not config.include_intra_document:
            continue
        h = _cos_ref(a.heading_vec, b.heading_vec, a, b, "heading")
        c = _cos_ref(a.content_vec, b.content_vec, a, b, "content")
        pairs.append(
            PairScore(a.ref, b.ref, a.company, b.company, h, c, combined_similarity(h, c, config.heading_weight))
        )
    return pairs


def _cos_ref(u, v, a: SectionVectors, b: SectionVectors, what: str) -> float:
    try:
        return cosine(u, v)
    except ZeroVectorError:
        bad = a if not np.any(u) else b
        raise ZeroVectorError(f"zero {what} vector", bad.ref) from None


@dataclass
class DocumentVectors:
    doc_id: str
    company: str
    vec: np.ndarray


def pairwise_documents(docs: Sequence[DocumentVectors]) -> list[PairScore]:
    ordered = sorted(docs, key=lambda d: d.doc_id)
    pairs = []
    for a, b in combinations(ordered, 2):
        try:
            c = cosine(a.vec, b.vec)
        except ZeroVectorError:
            raise ZeroVectorError("zero document vector", a.doc_id if not np.any(a.vec) else b.doc_id) from None
        pairs.append(PairScore(a.doc_id, b.doc_id, a.company, b.company, None, c, c, level="document"))
    return pairs


@dataclass
class RankedPairs:
    top: list[PairScore] = field(default_factory=list)
    bottom: list[PairScore] = field(default_factory=list)
    overlap: bool = False


def _pair_key(p: PairScore) -> tuple:
    return (p.a_ref, p.b_ref)


def rank_pairs(pairs: Sequence[PairScore], top_k: int = 5) -> RankedPairs:
    """The ``top_k`` most and least similar pairs; ties go to the smaller pair id."""
    if not pairs:
        raise NoPairsError("nothing to rank")
    top = sorted(pairs, key=lambda p: (-p.combined, _pair_key(p)))[:top_k]
    bottom = sorted(pairs, key=lambda p: (p.combined, _pair_key(p)))[:top_k]
    # heavy ties can make the lists share pairs even when there are enough of them
    shared = {_pair_key(p) for p in top} & {_pair_key(p) for p in bottom}
    return RankedPairs(top, bottom, overlap=len(pairs) < 2 * top_k or bool(shared))


def _missing(x) -> bool:
    return x is None or (isinstance(x, float) and math.isnan(x))


def pearson(xs: Sequence[float | None], ys: Sequence[float | None]) -> float:
    """Sample Pearson r with pairwise deletion of missing (None/NaN) entries."""
    if len(xs) != len(ys):
        raise InsufficientDataError(f"series lengths differ: {len(xs)} vs {len(ys)}")
    kept = [(float(x), float(y)) for x, y in zip(xs, ys) if not (_missing(x) or _missing(y))]
    if len(kept) < 2:
        raise InsufficientDataError(f"need at least 2 complete pairs, have {len(kept)}")
    x = np.array([k[0] for k in kept])
    y = np.array([k[1] for k in kept])
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVarianceError("one series is constant")
    return max(-1.0, min(1.0, float(dx @ dy) / math.sqrt(sxx * syy)))
