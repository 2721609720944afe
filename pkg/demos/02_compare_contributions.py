"""Score every cross-company section pair and show the extremes.

The corpus has one near-duplicate pair and one pair with no shared
vocabulary, so they should surface at the top and the bottom.
"""

from pathlib import Path

from contribkit.pipeline import RunConfig, run_analysis
from contribkit.report import classify

ROOT = Path(__file__).resolve().parent.parent

bundle = run_analysis(RunConfig(input=str(ROOT / "corpus")))
pairs = bundle.pair_map()
print(f"{len(bundle.sections)} sections, {len(bundle.section_pairs)} section pairs, "
      f"{len(bundle.document_pairs)} document pairs\n")


def show(title, ids):
    print(title)
    for pid in ids:
        p = pairs[pid]
        print(f"  {p.combined:.3f}  heading {p.heading_sim:.3f}  content {p.content_sim:.3f}  "
              f"{classify(p.combined):<16} {pid}")
    print()


show("Most similar section pairs", bundle.top_section_pairs)
show("Least similar section pairs", bundle.bottom_section_pairs)

# Whole documents compare by their mean section vectors, which pulls scores toward the middle.
print("Document pairs")
for p in sorted(bundle.document_pairs, key=lambda p: -p.combined):
    print(f"  {p.combined:.3f}  {p.a_company} vs {p.b_company}")
