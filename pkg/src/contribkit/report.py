"""Agenda drafting, chart-data files, bundle serialization and evaluation against human scores."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .analytics.density import DistributionData
from .analytics.kmeans import ClusterModel
from .analytics.tsne import Projection2D
from .errors import BadThresholdsError, InputError, InsufficientDataError, ReportIoError, UnknownPairIdError
from .similarity import PairScore, pearson
from .summarize import SummaryRecord
from .textproc import MarkerCounts

BUCKET_KINDS = ("agreed", "needs_discussion", "disputed")
BUCKET_TITLES = {"agreed": "Agreed", "needs_discussion": "Needs discussion", "disputed": "Disputed"}


# --- bucketing --------------------------------------------------------------


def _check_thresholds(tau_hi: float, tau_lo: float) -> None:
    if not 0.0 <= tau_lo < tau_hi <= 1.0:
        raise BadThresholdsError(f"need 0 <= tau_lo < tau_hi <= 1, got tau_lo={tau_lo}, tau_hi={tau_hi}")


def classify(combined: float, tau_hi: float = 0.8, tau_lo: float = 0.3) -> str:
    if combined >= tau_hi:
        return "agreed"
    if combined <= tau_lo:
        return "disputed"
    return "needs_discussion"


def bucket_pairs(pairs: Iterable[PairScore], tau_hi: float = 0.8, tau_lo: float = 0.3) -> dict[str, list[PairScore]]:
    _check_thresholds(tau_hi, tau_lo)
    out: dict[str, list[PairScore]] = {k: [] for k in BUCKET_KINDS}
    for p in pairs:
        out[classify(p.combined, tau_hi, tau_lo)].append(p)
    return out


@dataclass
class AgendaEntry:
    topic: int
    topic_label: str
    companies: list[str]
    representative_summary: str
    pair_ids: list[str]


@dataclass
class AgendaBucket:
    kind: str
    entries: list[AgendaEntry] = field(default_factory=list)


def topic_order(model: ClusterModel | None) -> list[int]:
    """Cluster ids, largest first, lower id on ties."""
    if model is None:
        return []
    sizes = model.sizes()
    return sorted(range(model.k), key=lambda c: (-sizes[c], c))


def build_agenda_buckets(
    section_pairs: Sequence[PairScore],
    section_cluster: dict[str, int],
    labels: dict[int, list[str]],
    order: Sequence[int],
    summaries: dict[str, SummaryRecord],
    tau_hi: float = 0.8,
    tau_lo: float = 0.3,
) -> list[AgendaBucket]:
    """Group bucketed pairs by topic.

    A pair whose sections sit in different clusters is filed under whichever
    cluster comes first in agenda order.
    """
    rank = {c: i for i, c in enumerate(order)}
    buckets = bucket_pairs(section_pairs, tau_hi, tau_lo)
    out = []
    for kind in BUCKET_KINDS:
        by_topic: dict[int, list[PairScore]] = defaultdict(list)
        for p in buckets[kind]:
            ca, cb = section_cluster.get(p.a_ref, -1), section_cluster.get(p.b_ref, -1)
            topic = min((ca, cb), key=lambda c: rank.get(c, len(rank)))
            by_topic[topic].append(p)
        entries = []
        for topic in sorted(by_topic, key=lambda c: rank.get(c, len(rank))):
            pairs = by_topic[topic]
            if kind == "disputed":
                pairs.sort(key=lambda p: (p.combined, p.pair_id))
            else:
                pairs.sort(key=lambda p: (-p.combined, p.pair_id))
            companies = sorted({p.a_company for p in pairs} | {p.b_company for p in pairs})
            lead = summaries.get(pairs[0].a_ref)
            entries.append(
                AgendaEntry(
                    topic=topic,
                    topic_label=", ".join(labels.get(topic, [])),
                    companies=companies,
                    representative_summary=lead.summary_text if lead else "",
                    pair_ids=[p.pair_id for p in pairs],
                )
            )
        out.append(AgendaBucket(kind, entries))
    return out


# --- bundle -----------------------------------------------------------------


@dataclass
class DocumentInfo:
    id: str
    company: str
    title: str
    role: str
    source_format: str
    digest: str
    leaf_sections: int
    image_count: int


@dataclass
class SectionInfo:
    ref: str
    doc_id: str
    path: str
    company: str
    heading: str
    paragraphs: int
    image_count: int


@dataclass
class AnalysisBundle:
    manifest_digest: str = ""
    documents: list[DocumentInfo] = field(default_factory=list)
    sections: list[SectionInfo] = field(default_factory=list)
    summaries: list[SummaryRecord] = field(default_factory=list)
    section_pairs: list[PairScore] = field(default_factory=list)
    document_pairs: list[PairScore] = field(default_factory=list)
    top_section_pairs: list[str] = field(default_factory=list)
    bottom_section_pairs: list[str] = field(default_factory=list)
    top_document_pairs: list[str] = field(default_factory=list)
    bottom_document_pairs: list[str] = field(default_factory=list)
    cluster_model: ClusterModel | None = None
    projection: Projection2D | None = None
    distributions: list[DistributionData] = field(default_factory=list)
    agenda: list[AgendaBucket] = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "manifest_digest": self.manifest_digest,
            "documents": [asdict(d) for d in self.documents],
            "sections": [asdict(s) for s in self.sections],
            "summaries": [asdict(s) for s in self.summaries],
            "section_pairs": [asdict(p) for p in self.section_pairs],
            "document_pairs": [asdict(p) for p in self.document_pairs],
            "top_section_pairs": list(self.top_section_pairs),
            "bottom_section_pairs": list(self.bottom_section_pairs),
            "top_document_pairs": list(self.top_document_pairs),
            "bottom_document_pairs": list(self.bottom_document_pairs),
            "cluster_model": _cluster_to_dict(self.cluster_model),
            "projection": _projection_to_dict(self.projection),
            "distributions": [asdict(d) for d in self.distributions],
            "agenda": [asdict(b) for b in self.agenda],
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisBundle":
        return cls(
            manifest_digest=d["manifest_digest"],
            documents=[DocumentInfo(**x) for x in d["documents"]],
            sections=[SectionInfo(**x) for x in d["sections"]],
            summaries=[_summary_from_dict(x) for x in d["summaries"]],
            section_pairs=[PairScore(**x) for x in d["section_pairs"]],
            document_pairs=[PairScore(**x) for x in d["document_pairs"]],
            top_section_pairs=list(d["top_section_pairs"]),
            bottom_section_pairs=list(d["bottom_section_pairs"]),
            top_document_pairs=list(d["top_document_pairs"]),
            bottom_document_pairs=list(d["bottom_document_pairs"]),
            cluster_model=_cluster_from_dict(d["cluster_model"]),
            projection=_projection_from_dict(d["projection"]),
            distributions=[DistributionData(**x) for x in d["distributions"]],
            agenda=[
                AgendaBucket(b["kind"], [AgendaEntry(**e) for e in b["entries"]]) for b in d["agenda"]
            ],
            config=d["config"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AnalysisBundle":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AnalysisBundle):
            return NotImplemented
        return self.to_json() == other.to_json()

    # lookups
    def section_cluster(self) -> dict[str, int]:
        if self.cluster_model is None:
            return {}
        return {s.ref: c for s, c in zip(self.sections, self.cluster_model.assignments)}

    def summary_map(self) -> dict[str, SummaryRecord]:
        return {s.ref: s for s in self.summaries}

    def pair_map(self) -> dict[str, PairScore]:
        return {p.pair_id: p for p in self.section_pairs + self.document_pairs}


def _cluster_to_dict(m: ClusterModel | None) -> dict | None:
    if m is None:
        return None
    return {
        "k": m.k,
        "assignments": list(m.assignments),
        "centroids": np.asarray(m.centroids).tolist(),
        "inertia": m.inertia,
        "n_iter": m.n_iter,
        "converged": m.converged,
        "inertia_history": list(m.inertia_history),
        "labels": {str(k): v for k, v in m.labels.items()},
    }


def _cluster_from_dict(d: dict | None) -> ClusterModel | None:
    if d is None:
        return None
    return ClusterModel(
        k=d["k"],
        assignments=list(d["assignments"]),
        centroids=np.asarray(d["centroids"], dtype=np.float64),
        inertia=d["inertia"],
        n_iter=d["n_iter"],
        converged=d["converged"],
        inertia_history=list(d["inertia_history"]),
        labels={int(k): v for k, v in d["labels"].items()},
    )


def _projection_to_dict(p: Projection2D | None) -> dict | None:
    if p is None:
        return None
    return {
        "coords": np.asarray(p.coords).tolist(),
        "perplexity": p.perplexity,
        "kl_divergence_final": p.kl_divergence_final,
        "seed": p.seed,
        "kl_history": [list(x) for x in p.kl_history],
    }


def _projection_from_dict(d: dict | None) -> Projection2D | None:
    if d is None:
        return None
    return Projection2D(
        coords=np.asarray(d["coords"], dtype=np.float64).reshape(-1, 2),
        perplexity=d["perplexity"],
        kl_divergence_final=d["kl_divergence_final"],
        seed=d["seed"],
        kl_history=[(int(i), float(v)) for i, v in d["kl_history"]],
    )


def _summary_from_dict(d: dict) -> SummaryRecord:
    d = dict(d)
    d["markers"] = MarkerCounts(**d["markers"])
    return SummaryRecord(**d)


# --- agenda -----------------------------------------------------------------


def company_tallies(summaries: Iterable[SummaryRecord], doc_company: dict[str, str]) -> dict[str, MarkerCounts]:
    out: dict[str, MarkerCounts] = {}
    for s in summaries:
        company = doc_company.get(s.doc_id, s.doc_id)
        counts = MarkerCounts(s.markers.proposals, s.markers.observations, s.markers.scenarios)
        out[company] = out.get(company, MarkerCounts()) + counts
    return dict(sorted(out.items()))


def _tally_text(m: MarkerCounts) -> str:
    return f"Proposals: {m.proposals}, Scenarios: {m.scenarios}, Observations: {m.observations}"


def _fmt(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.2f}"


def generate_agenda(bundle: AnalysisBundle, max_items: int = 5) -> str:
    """Render the bundle's agenda buckets as a markdown meeting agenda."""
    members = [d for d in bundle.documents if d.role != "chair"]
    if not members or not bundle.sections:
        return "# Draft agenda\n\nNo contributions to discuss.\n"

    doc_company = {d.id: d.company for d in bundle.documents}
    summaries = bundle.summary_map()
    pairs = bundle.pair_map()
    section_cluster = bundle.section_cluster()
    model = bundle.cluster_model
    cfg = bundle.config
    tau_hi, tau_lo = cfg.get("tau_hi", 0.8), cfg.get("tau_lo", 0.3)
    companies = sorted({d.company for d in members})

    lines = ["# Draft agenda", ""]
    lines.append(
        f"{len(members)} contributions from {len(companies)} companies, "
        f"{len(bundle.sections)} sections, {len(bundle.section_pairs)} cross-document section pairs."
    )
    lines.append(
        f"Pairs with combined similarity >= {tau_hi:g} are listed as agreed, <= {tau_lo:g} as disputed, "
        "anything in between needs discussion."
    )
    lines.append("")
    lines.append("## Proposals and scenarios per company")
    lines.append("")
    for company, tally in company_tallies(bundle.summaries, doc_company).items():
        lines.append(f"- {company}: {_tally_text(tally)}")
    lines.append("")

    by_kind_topic: dict[tuple[str, int], AgendaEntry] = {}
    for b in bundle.agenda:
        for e in b.entries:
            by_kind_topic[(b.kind, e.topic)] = e

    members_of: dict[int, list[SectionInfo]] = defaultdict(list)
    for s in bundle.sections:
        members_of[section_cluster.get(s.ref, -1)].append(s)
    order = topic_order(model) if model is not None else [-1]

    for n, topic in enumerate(order, start=1):
        secs = members_of.get(topic, [])
        if not secs:
            continue
        label = ", ".join(model.labels.get(topic, [])) if model is not None else "all sections"
        lines.append(f"## Topic {n}: {label} ({len(secs)} sections)")
        lines.append("")
        topic_companies = sorted({s.company for s in secs})
        lines.append(f"Contributors: {', '.join(topic_companies)}")
        lines.append("")
        topic_summaries = [summaries[s.ref] for s in secs if s.ref in summaries]
        for company, tally in company_tallies(topic_summaries, doc_company).items():
            lines.append(f"- {company}: {_tally_text(tally)}")
        lines.append("")
        for kind in BUCKET_KINDS:
            entry = by_kind_topic.get((kind, topic))
            if entry is None:
                continue
            lines.append(f"### {BUCKET_TITLES[kind]}")
            lines.append("")
            if kind == "agreed":
                lines.append(f"Companies in agreement: {', '.join(entry.companies)}")
                lines.append("")
            for pid in entry.pair_ids[:max_items]:
                p = pairs[pid]
                lines.append(
                    f"- {p.a_company} `{p.a_ref}` / {p.b_company} `{p.b_ref}`: "
                    f"combined {_fmt(p.combined)} (heading {_fmt(p.heading_sim)}, content {_fmt(p.content_sim)})"
                )
                if kind == "agreed":
                    s = summaries.get(p.a_ref)
                    if s is not None:
                        lines.append(f"  - {s.heading}: {s.summary_text}")
                else:
                    for ref in (p.a_ref, p.b_ref):
                        s = summaries.get(ref)
                        if s is not None:
                            lines.append(f"  - {doc_company.get(s.doc_id, s.doc_id)}, {s.heading}: {s.summary_text}")
            extra = len(entry.pair_ids) - max_items
            if extra > 0:
                lines.append(f"- ... and {extra} more pairs")
            lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


# --- chart data -------------------------------------------------------------


PAIR_COLUMNS = ["pair_id", "a_ref", "b_ref", "a_company", "b_company", "heading_sim", "content_sim", "combined"]


def _num(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def pairs_csv(pairs: Sequence[PairScore]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PAIR_COLUMNS)
    for p in sorted(pairs, key=lambda p: (-p.combined, p.pair_id)):
        w.writerow([p.pair_id, p.a_ref, p.b_ref, p.a_company, p.b_company, _num(p.heading_sim), _num(p.content_sim), _num(p.combined)])
    return buf.getvalue()


def scatter_points(bundle: AnalysisBundle) -> list[dict]:
    coords = bundle.projection.coords if bundle.projection is not None else None
    model = bundle.cluster_model
    out = []
    for i, s in enumerate(bundle.sections):
        cluster = model.assignments[i] if model is not None else None
        out.append(
            {
                "x": float(coords[i, 0]) if coords is not None else None,
                "y": float(coords[i, 1]) if coords is not None else None,
                "cluster": cluster,
                "label": ", ".join(model.labels.get(cluster, [])) if model is not None else "",
                "doc_id": s.doc_id,
                "section_path": s.path,
                "company": s.company,
                "heading": s.heading,
            }
        )
    return out


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def emit_chart_data(bundle: AnalysisBundle, out_dir: str | Path, max_items: int = 5) -> list[Path]:
    out_dir = Path(out_dir)
    files = {
        "pairs_sections.csv": pairs_csv(bundle.section_pairs),
        "pairs_documents.csv": pairs_csv(bundle.document_pairs),
        "scatter.json": _dump(scatter_points(bundle)),
        "distributions.json": _dump([asdict(d) for d in bundle.distributions]),
        "agenda.md": generate_agenda(bundle, max_items=max_items),
        "bundle.json": bundle.to_json(),
    }
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportIoError(out_dir, exc) from exc
    for name, text in files.items():
        path = out_dir / name
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ReportIoError(path, exc) from exc
        written.append(path)
    return written


# --- evaluation -------------------------------------------------------------


MISSING_TOKENS = {"na", "n/a"}


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc


def parse_human_scores(text: str) -> list[tuple[str, float | None]]:
    """Rows of a ``pair_id,score`` CSV; ``NA`` becomes None."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"pair_id", "score"} <= set(reader.fieldnames):
        raise InputError("human score CSV needs a 'pair_id,score' header")
    out = []
    for i, row in enumerate(reader, start=2):
        raw = (row["score"] or "").strip()
        if raw.lower() in MISSING_TOKENS:
            out.append((row["pair_id"].strip(), None))
            continue
        try:
            val = float(raw)
        except ValueError as exc:
            raise InputError(f"line {i}: bad score {raw!r}") from exc
        if not 0.0 <= val <= 1.0:
            raise InputError(f"line {i}: score {val} outside [0, 1]")
        out.append((row["pair_id"].strip(), val))
    return out


def parse_pair_scores(text: str) -> dict[str, float]:
    """Algorithm scores from a pairs CSV (``pair_id`` plus ``combined`` or ``score``)."""
    reader = csv.DictReader(io.StringIO(text))
    fields = set(reader.fieldnames or ())
    col = "combined" if "combined" in fields else "score"
    if "pair_id" not in fields or col not in fields:
        raise InputError("pairs CSV needs 'pair_id' and 'combined' columns")
    out = {}
    for i, row in enumerate(reader, start=2):
        try:
            out[row["pair_id"].strip()] = float(row[col])
        except (TypeError, ValueError) as exc:
            raise InputError(f"line {i}: bad {col} value {row[col]!r}") from exc
    return out


def read_human_scores(path: str | Path) -> list[tuple[str, float | None]]:
    return parse_human_scores(_read_text(path))


def read_pair_scores(path: str | Path) -> dict[str, float]:
    return parse_pair_scores(_read_text(path))


@dataclass
class EvaluationReport:
    r: float
    n_used: int
    n_dropped: int
    rows: list[tuple[str, float, float | None]]

    def render(self) -> str:
        lines = [f"r = {self.r:.2f}  (exact {self.r:.6f}; {self.n_used} pairs used, {self.n_dropped} dropped)", ""]
        lines.append(f"{'pair_id':<40} {'algorithm':>9} {'human':>6}")
        for pid, a, h in self.rows:
            lines.append(f"{pid:<40} {a:>9.2f} {'NA' if h is None else format(h, '.2f'):>6}")
        return "\n".join(lines) + "\n"


def evaluation_report(
    algorithm: dict[str, float] | Sequence[PairScore],
    human: str | Path | Sequence[tuple[str, float | None]],
) -> EvaluationReport:
    """Join algorithm and human scores on pair id and correlate them.

    ``human`` is a path to a ``pair_id,score`` CSV or already-parsed rows.
    """
    if not isinstance(algorithm, dict):
        algorithm = {p.pair_id: p.combined for p in algorithm}
    human_rows = read_human_scores(human) if isinstance(human, (str, Path)) else list(human)
    rows = []
    for pid, h in human_rows:
        if pid not in algorithm:
            raise UnknownPairIdError(pid)
        rows.append((pid, algorithm[pid], h))
    dropped = sum(1 for _, _, h in rows if h is None)
    r = pearson([a for _, a, _ in rows], [h for _, _, h in rows])
    if math.isnan(r):
        raise InsufficientDataError("correlation undefined")
    return EvaluationReport(r=r, n_used=len(rows) - dropped, n_dropped=dropped, rows=rows)
