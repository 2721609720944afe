"""Sentence, heading, section and document embeddings.

Two backends share one interface. The baseline backend is an idf-weighted
bag of words folded into ``dim`` buckets with unsigned FNV-1a feature hashing;
every component is non-negative, so cosine similarities between baseline
vectors never go below zero. The remote backend posts texts to an embedding
service (``POST /v1/embed``) and caches the answers by content hash.
"""

from __future__ import annotations

import hashlib
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import httpx
import numpy as np

from .errors import (
    DimMismatchError,
    EmptyCorpusError,
    EmptyDocumentError,
    EmptySectionError,
    EmptyTextError,
    ProtocolError,
    TransportError,
)
from .textproc import DEFAULT_STOPWORDS, TokenStats, split_sentences, tokenize

log = logging.getLogger(__name__)

DEFAULT_DIM = 768

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


@lru_cache(maxsize=1 << 16)
def hash_index(term: str, dim: int, seed: int = 0) -> int:
    """Bucket of ``term``: FNV-1a-64 over the 8-byte little-endian seed followed by the UTF-8 term."""
    key = (seed & _MASK64).to_bytes(8, "little") + term.encode("utf-8")
    return fnv1a_64(key) % dim


def fit_idf(sections: Iterable[TokenStats]) -> dict[str, float]:
    """Smoothed idf over a corpus of sections: ``ln((1 + N) / (1 + df)) + 1``."""
    df: dict[str, int] = {}
    n = 0
    for stats in sections:
        n += 1
        for term in stats.term_counts:
            df[term] = df.get(term, 0) + 1
    if n == 0:
        raise EmptyCorpusError("cannot fit idf on an empty corpus")
    return {t: math.log((1 + n) / (1 + d)) + 1.0 for t, d in sorted(df.items())}


@dataclass
class EmbedderConfig:
    backend: str = "baseline"
    dim: int = DEFAULT_DIM
    idf: dict[str, float] = field(default_factory=dict)
    hash_seed: int = 0
    # weight for terms never seen while fitting; None means the largest fitted idf
    unseen_idf: float | None = None
    normalize_sentences: bool = True

    def __post_init__(self) -> None:
        if self.backend not in ("baseline", "remote"):
            raise ValueError(f"unknown embedding backend {self.backend!r}")
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if any(w < 0 for w in self.idf.values()):
            raise ValueError("idf weights must be non-negative")

    def idf_of(self, term: str) -> float:
        w = self.idf.get(term)
        if w is not None:
            return w
        if self.unseen_idf is not None:
            return self.unseen_idf
        return max(self.idf.values(), default=1.0)


def embed_text_baseline(stats: TokenStats, config: EmbedderConfig) -> np.ndarray:
    if not stats:
        raise EmptyTextError("no non-stopword tokens to embed")
    vec = np.zeros(config.dim, dtype=np.float64)
    for term, tf in stats.term_counts.items():
        vec[hash_index(term, config.dim, config.hash_seed)] += tf * config.idf_of(term)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise EmptyTextError("all token weights are zero")
    return vec / norm


def mean_embedding(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Component-wise mean; no re-normalization."""
    if len(vectors) == 0:
        raise EmptySectionError("no vectors to average")
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise DimMismatchError(f"vectors of differing dims {sorted(dims)}")
    return np.mean(np.asarray(vectors, dtype=np.float64), axis=0)


def section_embedding(sentence_vectors: Sequence[np.ndarray]) -> np.ndarray:
    return mean_embedding(sentence_vectors)


def document_embedding(section_vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Mean of a document's leaf-section content vectors."""
    if len(section_vectors) == 0:
        raise EmptyDocumentError("document has no embeddable sections")
    return mean_embedding(section_vectors)


# --- remote backend ---------------------------------------------------------


class ContentCache:
    """Thread-safe memo keyed by the SHA-256 of (namespace, text)."""

    def __init__(self) -> None:
        self._data: dict[str, object] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key(namespace: str, text: str) -> str:
        return hashlib.sha256(f"{namespace}\x00{text}".encode("utf-8")).hexdigest()

    def get(self, namespace: str, text: str):
        return self._data.get(self.key(namespace, text))

    def put(self, namespace: str, text: str, value) -> None:
        with self._lock:
            self._data.setdefault(self.key(namespace, text), value)

    def __len__(self) -> int:
        return len(self._data)


def post_json(endpoint: str, route: str, payload: dict, timeout: float) -> dict:
    """POST a JSON body and decode the JSON answer, mapping failures to backend errors."""
    url = endpoint.rstrip("/") + route
    try:
        with httpx.Client(timeout=timeout) as client:
            resp = client.post(url, json=payload)
    except httpx.HTTPError as exc:
        raise TransportError(f"{url}: {exc}") from exc
    if resp.status_code != 200:
        raise TransportError(f"{url}: HTTP {resp.status_code}")
    try:
        body = resp.json()
    except ValueError as exc:
        raise ProtocolError(f"{url}: response is not JSON") from exc
    if not isinstance(body, dict):
        raise ProtocolError(f"{url}: response is not a JSON object")
    return body


class RemoteEmbeddingClient:
    def __init__(
        self,
        endpoint: str,
        dim_hint: int = DEFAULT_DIM,
        timeout: float = 30.0,
        batch_size: int = 64,
        jobs: int = 1,
        cache: ContentCache | None = None,
    ):
        self.endpoint = endpoint
        self.dim_hint = dim_hint
        self.timeout = timeout
        self.batch_size = batch_size
        self.jobs = max(1, jobs)
        self.cache = cache if cache is not None else ContentCache()
        self.dim: int | None = None

    def _request(self, texts: list[str]) -> list[np.ndarray]:
        body = post_json(self.endpoint, "/v1/embed", {"texts": texts, "dim_hint": self.dim_hint}, self.timeout)
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProtocolError("'vectors' missing or of wrong length")
        try:
            arrs = [np.asarray(v, dtype=np.float64) for v in vectors]
        except (TypeError, ValueError) as exc:
            raise ProtocolError(f"non-numeric vector: {exc}") from exc
        dims = {a.shape for a in arrs}
        if len(dims) != 1 or len(next(iter(dims))) != 1:
            raise ProtocolError(f"mixed vector dims in batch: {sorted(d for d in dims)}")
        dim = arrs[0].shape[0]
        if "dim" in body and body["dim"] != dim:
            raise ProtocolError(f"declared dim {body['dim']} but vectors have {dim}")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise ProtocolError("non-finite vector component")
        return arrs

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        """One vector per text, in order; repeated texts hit the cache."""
        texts = list(texts)
        pending = [t for t in dict.fromkeys(texts) if self.cache.get("embed", t) is None]
        batches = [pending[i : i + self.batch_size] for i in range(0, len(pending), self.batch_size)]
        if self.jobs > 1 and len(batches) > 1:
            with ThreadPoolExecutor(self.jobs) as pool:
                results = list(pool.map(self._request, batches))
        else:
            results = [self._request(b) for b in batches]
        for batch, vecs in zip(batches, results):
            for t, v in zip(batch, vecs):
                if self.dim is None:
                    self.dim = len(v)
                elif len(v) != self.dim:
                    raise ProtocolError(f"dim changed between batches: {self.dim} vs {len(v)}")
                self.cache.put("embed", t, v)
        return [self.cache.get("embed", t) for t in texts]


def remote_embed(texts: Sequence[str], endpoint: str, dim_hint: int = DEFAULT_DIM, **kwargs) -> list[np.ndarray]:
    if not texts:
        return []
    return RemoteEmbeddingClient(endpoint, dim_hint=dim_hint, **kwargs).embed(texts)


# --- pipeline-facing embedder -----------------------------------------------


class Embedder:
    """Embeds sentences and headings with the configured backend.

    Sentence vectors are unit-normalized before averaging when
    ``config.normalize_sentences`` is set (baseline vectors always are).
    Sentences without any non-stopword token are skipped.
    """

    def __init__(
        self,
        config: EmbedderConfig,
        stopwords: frozenset[str] = DEFAULT_STOPWORDS,
        client: RemoteEmbeddingClient | None = None,
    ):
        self.config = config
        self.stopwords = stopwords
        if config.backend == "remote" and client is None:
            raise ValueError("remote backend needs a RemoteEmbeddingClient")
        self.client = client

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray | None]:
        """Vectors for ``texts``; ``None`` where a text has nothing to embed."""
        if self.config.backend == "baseline":
            out: list[np.ndarray | None] = []
            for t in texts:
                stats = tokenize(t, self.stopwords)
                out.append(embed_text_baseline(stats, self.config) if stats else None)
            return out
        keep = [t for t in texts if tokenize(t, self.stopwords)]
        vecs = dict(zip(keep, self.client.embed(keep))) if keep else {}
        out = []
        for t in texts:
            v = vecs.get(t)
            if v is not None and self.config.normalize_sentences:
                n = np.linalg.norm(v)
                v = v / n if n > 0 else v
            out.append(v)
        return out

    def sentence_vectors(self, paragraphs: Sequence[str]) -> list[np.ndarray]:
        sentences = [s for p in paragraphs for s in split_sentences(p)]
        return [v for v in self.embed_texts(sentences) if v is not None]

    def content_embedding(self, paragraphs: Sequence[str]) -> np.ndarray:
        vecs = self.sentence_vectors(paragraphs)
        if not vecs:
            raise EmptySectionError("section has no embeddable sentence")
        return section_embedding(vecs)

    def heading_embedding(self, heading: str) -> np.ndarray | None:
        return self.embed_texts([heading])[0]
