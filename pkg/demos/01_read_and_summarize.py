"""Read one contribution, walk its sections and print extractive summaries.

Run from the repository root:  python3 demos/01_read_and_summarize.py
"""

from pathlib import Path

from contribkit.ingest import format_path, leaf_items, load_document
from contribkit.summarize import Summarizer

ROOT = Path(__file__).resolve().parent.parent

doc = load_document(ROOT / "corpus" / "Borealis_R1-2102.md", company="Borealis")
print(f"{doc.id}: {doc.title!r} from {doc.company}")
print(f"preamble lines: {doc.root.paragraphs}\n")

# Leaf sections are the unit of analysis. Each keeps its heading and raw paragraphs.
summarizer = Summarizer(max_sentences=2)
for path, section in leaf_items(doc):
    record = summarizer.summarize(section.paragraphs, doc.id, format_path(path), section.heading)
    m = record.markers
    print(f"[{record.ref}] {section.heading}")
    print(f"  kept {record.sentence_count_summary} of {record.sentence_count_original} sentences")
    print(f"  proposals={m.proposals} observations={m.observations} scenarios={m.scenarios}")
    print(f"  {record.summary_text}\n")
