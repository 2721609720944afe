"""End-to-end analysis: documents in, :class:`~contribkit.report.AnalysisBundle` out."""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Sequence, TypeVar

import numpy as np

from .analytics import kde, kmeans, label_clusters, tsne
from .embedding import Embedder, EmbedderConfig, RemoteEmbeddingClient, document_embedding, fit_idf
from .errors import InputError
from .ingest import Document, format_path, leaf_items, load_corpus
from .report import (
    AnalysisBundle,
    DocumentInfo,
    SectionInfo,
    _check_thresholds,
    build_agenda_buckets,
    topic_order,
)
from .similarity import (
    DocumentVectors,
    SectionVectors,
    SimilarityConfig,
    pairwise_documents,
    pairwise_sections,
    rank_pairs,
)
from .summarize import Summarizer
from .textproc import DEFAULT_STOPWORDS, load_stopwords, split_sentences, tokenize

log = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# execution-only settings: they never change results and stay out of the snapshot
_RUNTIME_ONLY = ("out", "jobs")


@dataclass
class RunConfig:
    input: str = ""
    manifest: str | None = None
    out: str = "out"
    backend_embed: str = "baseline"
    backend_summarize: str = "baseline"
    endpoint: str | None = None
    timeout: float = 30.0
    dim: int = 768
    hash_seed: int = 0
    heading_weight: float = 0.5
    include_intra_document: bool = False
    k: int = 10
    cluster_input: str = "combined"
    label_terms: int = 3
    perplexity: float = 30.0
    tsne_iters: int = 1000
    top_k: int = 5
    tau_hi: float = 0.8
    tau_lo: float = 0.3
    max_sentences: int = 3
    min_ratio: float = 0.2
    summary_max_tokens: int = 128
    agenda_max_items: int = 5
    stopwords: str | None = None
    seed: int = 0
    jobs: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{path}: unreadable config ({exc})") from exc
        if not isinstance(data, dict):
            raise InputError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def validate(self) -> None:
        def need(cond: bool, msg: str) -> None:
            if not cond:
                raise InputError(f"invalid config: {msg}")

        need(bool(self.input), "an input directory is required")
        need(self.backend_embed in ("baseline", "remote"), "backend_embed must be baseline or remote")
        need(self.backend_summarize in ("baseline", "extractive", "remote"), "backend_summarize must be baseline or remote")
        need(
            self.endpoint is not None or "remote" not in (self.backend_embed, self.backend_summarize),
            "remote backends need an endpoint",
        )
        need(self.dim >= 2, "dim must be >= 2")
        need(0.0 <= self.heading_weight <= 1.0, "heading weight must lie in [0, 1]")
        need(self.k >= 1, "k must be >= 1")
        need(self.cluster_input in ("combined", "content"), "cluster_input must be combined or content")
        need(self.label_terms >= 1, "label_terms must be >= 1")
        need(self.perplexity > 0, "perplexity must be positive")
        need(self.tsne_iters >= 1, "tsne_iters must be >= 1")
        need(self.top_k >= 1, "top_k must be >= 1")
        need(self.max_sentences >= 1, "max_sentences must be >= 1")
        need(0.0 < self.min_ratio <= 1.0, "min_ratio must lie in (0, 1]")
        need(self.jobs >= 1, "jobs must be >= 1")
        need(self.timeout > 0, "timeout must be positive")
        try:
            _check_thresholds(self.tau_hi, self.tau_lo)
        except InputError as exc:
            raise InputError(f"invalid config: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def snapshot(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in _RUNTIME_ONLY}


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int) -> list[R]:
    """Order-preserving map; identical results for any ``jobs``."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


@dataclass
class _Unit:
    doc: Document
    path: tuple[int, ...]
    heading: str
    paragraphs: list[str]
    image_count: int

    @property
    def ref(self) -> str:
        return f"{self.doc.id}/{format_path(self.path)}"


def manifest_digest(docs: Sequence[Document]) -> str:
    h = hashlib.sha256()
    for d in sorted(docs, key=lambda d: d.id):
        h.update(f"{d.id}\t{d.company}\t{d.role}\t{d.digest}\n".encode("utf-8"))
    return h.hexdigest()


def cluster_vectors(heading: np.ndarray, content: np.ndarray, w: float, mode: str = "combined") -> np.ndarray:
    """Per-section clustering input.

    ``combined`` concatenates the unit-normalized heading vector scaled by
    ``w`` with the unit-normalized content vector scaled by ``1 - w``.
    """
    c = content / np.linalg.norm(content, axis=1, keepdims=True)
    if mode == "content":
        return c
    h = heading / np.linalg.norm(heading, axis=1, keepdims=True)
    return np.hstack([w * h, (1.0 - w) * c])


def run_analysis(config: RunConfig, docs: Sequence[Document] | None = None) -> AnalysisBundle:
    config.validate()
    stopwords = load_stopwords(config.stopwords) if config.stopwords else DEFAULT_STOPWORDS
    if docs is None:
        docs = load_corpus(config.input, config.manifest)
    members = [d for d in docs if d.role != "chair"]
    for d in docs:
        if d.role == "chair":
            log.info("excluding chair document %s from the analysis", d.id)

    units: list[_Unit] = []
    for doc in members:
        for path, sec in leaf_items(doc):
            if not any(tokenize(p, stopwords) for p in sec.paragraphs):
                log.warning("skipping %s/%s: no content to embed", doc.id, format_path(path))
                continue
            units.append(_Unit(doc, path, sec.heading, list(sec.paragraphs), sec.image_count))
    log.info("%d documents, %d analysable sections", len(members), len(units))

    bundle = AnalysisBundle(
        manifest_digest=manifest_digest(docs),
        config=config.snapshot(),
    )
    bundle.documents = [
        DocumentInfo(
            id=d.id,
            company=d.company,
            title=d.title,
            role=d.role,
            source_format=d.source_format,
            digest=d.digest,
            leaf_sections=sum(1 for u in units if u.doc is d),
            image_count=sum(s.image_count for _, s in d.root.walk()),
        )
        for d in docs
    ]
    bundle.sections = [
        SectionInfo(u.ref, u.doc.id, format_path(u.path), u.doc.company, u.heading, len(u.paragraphs), u.image_count)
        for u in units
    ]
    if not units:
        return bundle

    # embeddings
    idf = fit_idf(tokenize(" ".join([u.heading, *u.paragraphs]), stopwords) for u in units)
    emb_cfg = EmbedderConfig(backend=config.backend_embed, dim=config.dim, idf=idf, hash_seed=config.hash_seed)
    client = None
    if config.backend_embed == "remote":
        client = RemoteEmbeddingClient(config.endpoint, dim_hint=config.dim, timeout=config.timeout, jobs=config.jobs)
    embedder = Embedder(emb_cfg, stopwords, client)

    def embed_unit(u: _Unit) -> tuple[np.ndarray, np.ndarray | None]:
        return embedder.content_embedding(u.paragraphs), embedder.heading_embedding(u.heading)

    log.info("embedding sections (%s backend)", config.backend_embed)
    if config.backend_embed == "remote":
        # one pass so the client can batch every distinct sentence
        embedder.embed_texts([s for u in units for p in u.paragraphs for s in split_sentences(p)] + [u.heading for u in units])
    vectors = parallel_map(embed_unit, units, config.jobs)
    content_vecs = np.stack([c for c, _ in vectors])
    heading_vecs = []
    for u, (c, h) in zip(units, vectors):
        if h is None:
            title_vec = embedder.heading_embedding(u.doc.title)
            h = title_vec if title_vec is not None else c
        heading_vecs.append(h)
    heading_vecs = np.stack(heading_vecs)

    # summaries
    summarizer = Summarizer(
        backend="remote" if config.backend_summarize == "remote" else "extractive",
        max_sentences=config.max_sentences,
        min_ratio=config.min_ratio,
        endpoint=config.endpoint,
        max_tokens=config.summary_max_tokens,
        timeout=config.timeout,
        stopwords=stopwords,
    )
    log.info("summarizing %d sections (%s)", len(units), summarizer.backend)
    bundle.summaries = parallel_map(
        lambda u: summarizer.summarize(u.paragraphs, u.doc.id, format_path(u.path), u.heading), units, config.jobs
    )

    # similarities
    sim_cfg = SimilarityConfig(config.heading_weight, config.include_intra_document, config.top_k)
    section_units = [
        SectionVectors(u.doc.id, u.path, u.doc.company, heading_vecs[i], content_vecs[i]) for i, u in enumerate(units)
    ]
    bundle.section_pairs = pairwise_sections(section_units, sim_cfg)
    doc_vecs = []
    for d in members:
        rows = [i for i, u in enumerate(units) if u.doc is d]
        if rows:
            doc_vecs.append(DocumentVectors(d.id, d.company, document_embedding(content_vecs[rows])))
        else:
            log.warning("document %s has no analysable sections; left out of document pairs", d.id)
    bundle.document_pairs = pairwise_documents(doc_vecs)
    if bundle.section_pairs:
        ranked = rank_pairs(bundle.section_pairs, config.top_k)
        bundle.top_section_pairs = [p.pair_id for p in ranked.top]
        bundle.bottom_section_pairs = [p.pair_id for p in ranked.bottom]
    if bundle.document_pairs:
        ranked = rank_pairs(bundle.document_pairs, config.top_k)
        bundle.top_document_pairs = [p.pair_id for p in ranked.top]
        bundle.bottom_document_pairs = [p.pair_id for p in ranked.bottom]

    # clusters and projection
    x = cluster_vectors(heading_vecs, content_vecs, config.heading_weight, config.cluster_input)
    k = min(config.k, len(units))
    if k < config.k:
        log.warning("only %d sections: k reduced from %d to %d", len(units), config.k, k)
    model = kmeans(x, k, seed=config.seed)
    stats = [tokenize(" ".join([u.heading, *u.paragraphs]), stopwords) for u in units]
    model.labels = label_clusters(model.assignments, stats, k=k, m=config.label_terms, stopwords=stopwords)
    bundle.cluster_model = model
    if len(units) >= 4:
        perplexity = min(config.perplexity, (len(units) - 1) / 3.0)
        if perplexity < config.perplexity:
            log.warning("perplexity reduced to %.3g for %d sections", perplexity, len(units))
        bundle.projection = tsne(x, perplexity=perplexity, seed=config.seed, iters=config.tsne_iters)
    else:
        log.warning("fewer than 4 sections: no 2-D projection")

    # distributions
    if bundle.section_pairs:
        bundle.distributions = [
            kde([p.heading_sim for p in bundle.section_pairs], series_name="headings"),
            kde([p.content_sim for p in bundle.section_pairs], series_name="content"),
        ]

    # agenda
    summaries = bundle.summary_map()
    bundle.agenda = build_agenda_buckets(
        bundle.section_pairs,
        bundle.section_cluster(),
        model.labels,
        topic_order(model),
        summaries,
        config.tau_hi,
        config.tau_lo,
    )
    return bundle
