"""Correlate algorithm scores with human ratings of the same pairs.

The fixtures hold ten rated pairs per table. Rows a reviewer left as NA
are dropped pairwise before the correlation is taken.
"""

from pathlib import Path

from contribkit.report import evaluation_report, read_pair_scores

FIX = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

for level in ("section", "document"):
    algorithm = read_pair_scores(FIX / f"{level}_pairs_algorithm.csv")
    for rater in ("expert", "delegate"):
        rep = evaluation_report(algorithm, FIX / f"{level}_pairs_{rater}.csv")
        print(f"{level:<8} pairs vs {rater:<8}: r = {rep.r:.3f} over {rep.n_used} pairs ({rep.n_dropped} dropped)")

print()
print(evaluation_report(read_pair_scores(FIX / "document_pairs_algorithm.csv"),
                        FIX / "document_pairs_delegate.csv").render())
