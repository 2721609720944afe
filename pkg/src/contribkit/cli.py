"""Command-line entry point: ``contribkit analyze|summarize|eval|report``.

Exit codes: 0 success, 1 input/data errors, 2 model-backend errors.
Progress goes to stderr; results go to files or stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from .errors import BackendError, ContribError, InputError
from .ingest import format_path, leaf_items, load_document
from .pipeline import RunConfig, run_analysis
from .report import AnalysisBundle, emit_chart_data, evaluation_report, read_pair_scores
from .summarize import Summarizer
from .textproc import DEFAULT_STOPWORDS, load_stopwords

log = logging.getLogger("contribkit")

EXIT_OK, EXIT_INPUT, EXIT_BACKEND = 0, 1, 2

# flag dest -> RunConfig field
_FLAG_FIELDS = {
    "k": "k",
    "perplexity": "perplexity",
    "dim": "dim",
    "seed": "seed",
    "backend_embed": "backend_embed",
    "backend_summarize": "backend_summarize",
    "endpoint": "endpoint",
    "tau_hi": "tau_hi",
    "tau_lo": "tau_lo",
    "top_k": "top_k",
    "out": "out",
    "jobs": "jobs",
    "manifest": "manifest",
    "stopwords": "stopwords",
    "max_sentences": "max_sentences",
    "min_ratio": "min_ratio",
    "input": "input",
}


def parse_weights(text: str) -> float:
    """``0.5`` (heading weight) or ``heading,content`` such as ``0.6,0.4``."""
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        w = parts[0]
    elif len(parts) == 2 and sum(parts) > 0:
        w = parts[0] / (parts[0] + parts[1])
    else:
        raise argparse.ArgumentTypeError(f"bad weights {text!r}")
    if not 0.0 <= w <= 1.0:
        raise argparse.ArgumentTypeError("heading weight must lie in [0, 1]")
    return w


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contribkit", description="Analyze and summarize meeting contribution documents.")
    parser.add_argument("-q", "--quiet", action="store_true", help="only warnings and errors on stderr")
    # also accepted after the subcommand; SUPPRESS keeps a subparser from resetting the top-level value
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="run the full pipeline over a corpus directory")
    a.add_argument("input", nargs="?", help="directory of .docx/.md/.txt contributions")
    a.add_argument("--config", help="JSON run configuration; flags override it")
    a.add_argument("--manifest", help="corpus manifest (JSON list of {path, company, role})")
    a.add_argument("--weights", type=parse_weights, help="heading weight, or heading,content weights")
    a.add_argument("--k", type=int, help="number of topic clusters")
    a.add_argument("--perplexity", type=float)
    a.add_argument("--dim", type=int, help="embedding dimension")
    a.add_argument("--seed", type=int)
    a.add_argument("--backend-embed", choices=["baseline", "remote"])
    a.add_argument("--backend-summarize", choices=["baseline", "remote"])
    a.add_argument("--endpoint", help="base URL of the remote model service")
    a.add_argument("--tau-hi", type=float, help="agreement threshold")
    a.add_argument("--tau-lo", type=float, help="dispute threshold")
    a.add_argument("--top-k", type=int)
    a.add_argument("--max-sentences", type=int)
    a.add_argument("--min-ratio", type=float)
    a.add_argument("--stopwords", help="extra stopword file, one term per line")
    a.add_argument("--out", help="output directory")
    a.add_argument("--jobs", type=int, help="worker threads")
    a.add_argument("--print-config", action="store_true", help="print the effective config and exit")

    s = sub.add_parser("summarize", parents=[common], help="print per-section summaries of one document")
    s.add_argument("file")
    s.add_argument("--backend-summarize", choices=["baseline", "remote"], default="baseline")
    s.add_argument("--endpoint")
    s.add_argument("--max-sentences", type=int, default=3)
    s.add_argument("--min-ratio", type=float, default=0.2)
    s.add_argument("--stopwords")

    e = sub.add_parser("eval", parents=[common], help="correlate algorithm pair scores with human scores")
    e.add_argument("pairs_file", help="CSV with pair_id and combined columns")
    e.add_argument("human_csv", help="CSV with header pair_id,score (score may be NA)")

    r = sub.add_parser("report", parents=[common], help="re-emit agenda and chart files from a bundle.json")
    r.add_argument("bundle")
    r.add_argument("--out", required=True)
    r.add_argument("--max-items", type=int, default=5)
    return parser


def effective_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.from_file(args.config).to_dict() if args.config else {}
    for dest, name in _FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            base[name] = value
    if args.weights is not None:
        base["heading_weight"] = args.weights
    known = {f.name for f in fields(RunConfig)}
    return RunConfig.from_dict({k: v for k, v in base.items() if k in known})


def cmd_analyze(args: argparse.Namespace) -> int:
    config = effective_config(args)
    if args.print_config:
        print(json.dumps(config.to_dict(), indent=2, sort_keys=True))
        return EXIT_OK
    bundle = run_analysis(config)
    if not bundle.sections:
        log.error("no analysable sections in %s", config.input)
        return EXIT_INPUT
    written = emit_chart_data(bundle, config.out, max_items=config.agenda_max_items)
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_summarize(args: argparse.Namespace) -> int:
    stopwords = load_stopwords(args.stopwords) if args.stopwords else DEFAULT_STOPWORDS
    doc = load_document(args.file)
    summarizer = Summarizer(
        backend="remote" if args.backend_summarize == "remote" else "extractive",
        max_sentences=args.max_sentences,
        min_ratio=args.min_ratio,
        endpoint=args.endpoint,
        stopwords=stopwords,
    )
    out = []
    for path, sec in leaf_items(doc):
        if not sec.paragraphs:
            continue
        rec = summarizer.summarize(sec.paragraphs, doc.id, format_path(path), sec.heading)
        m = rec.markers
        out.append(f"## {format_path(path)} {rec.heading or '(preamble)'}")
        out.append(f"Proposals: {m.proposals}, Scenarios: {m.scenarios}, Observations: {m.observations}")
        out.append(f"Sentences: {rec.sentence_count_summary} of {rec.sentence_count_original}")
        out.append("")
        out.append(rec.summary_text)
        for item in m.items:
            out.append(f"- {item['text']}")
        out.append("")
    if not out:
        log.error("%s: no sections with text", args.file)
        return EXIT_INPUT
    sys.stdout.write(f"# {doc.title}\n\n" + "\n".join(out))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    report = evaluation_report(read_pair_scores(args.pairs_file), Path(args.human_csv))
    sys.stdout.write(report.render())
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        bundle = AnalysisBundle.from_json(Path(args.bundle).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{args.bundle}: unreadable bundle ({exc})") from exc
    for path in emit_chart_data(bundle, args.out, max_items=args.max_items):
        log.info("wrote %s", path)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "summarize": cmd_summarize, "eval": cmd_eval, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        return COMMANDS[args.command](args)
    except BackendError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_BACKEND
    except ContribError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
