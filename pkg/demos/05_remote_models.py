"""Swap the built-in embedder and summarizer for an HTTP model service.

A local stub stands in for the service here. Its embeddings come from the
hashing embedder and its summaries are the first words of the input, so the
point is the plumbing: batching, caching and the request shapes.
"""

from pathlib import Path

from contribkit.ingest import load_corpus
from contribkit.pipeline import RunConfig, run_analysis
from contribkit.stub import StubState, serve_stub

ROOT = Path(__file__).resolve().parent.parent
docs = load_corpus(ROOT / "corpus")[:3]

with serve_stub(StubState(summary_words=12)) as (url, state):
    config = RunConfig(
        input=str(ROOT / "corpus"),
        backend_embed="remote",
        backend_summarize="remote",
        endpoint=url,
        dim=64,
        jobs=2,
    )
    bundle = run_analysis(config, docs)

calls = {}
for path, _ in state.requests:
    calls[path] = calls.get(path, 0) + 1
print(f"service at {url} saw {calls}")
for s in bundle.summaries[:3]:
    print(f"  {s.ref}: {s.summary_text}")
top = bundle.pair_map()[bundle.top_section_pairs[0]]
print(f"top pair {top.pair_id} at {top.combined:.3f}")
