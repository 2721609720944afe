"""Cluster sections into topics and project them to 2-D.

Prints the cluster labels and a coarse character plot of the projection.
Pass an output path to also save the scatter as PNG if matplotlib is installed.
"""

import sys
from pathlib import Path

import numpy as np

from contribkit.pipeline import RunConfig, run_analysis
from contribkit.report import scatter_points

ROOT = Path(__file__).resolve().parent.parent

bundle = run_analysis(RunConfig(input=str(ROOT / "corpus"), k=4))
model = bundle.cluster_model
print(f"k-means: {model.k} clusters, inertia {model.inertia:.4f} after {model.n_iter} iterations")
for c, size in enumerate(model.sizes()):
    print(f"  cluster {c} ({size} sections): {', '.join(model.labels[c])}")

points = scatter_points(bundle)
xy = np.array([[p["x"], p["y"]] for p in points])
print(f"\nt-SNE at perplexity {bundle.projection.perplexity:.2f}, final KL {bundle.projection.kl_divergence_final:.4f}\n")

width, height = 60, 20
lo, hi = xy.min(axis=0), xy.max(axis=0)
grid = [[" "] * width for _ in range(height)]
for (x, y), p in zip(xy, points):
    col = int((x - lo[0]) / (hi[0] - lo[0] + 1e-12) * (width - 1))
    row = int((y - lo[1]) / (hi[1] - lo[1] + 1e-12) * (height - 1))
    grid[height - 1 - row][col] = str(p["cluster"])
print("\n".join("|" + "".join(r) + "|" for r in grid))

if len(sys.argv) > 1:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(xy[:, 0], xy[:, 1], c=[p["cluster"] for p in points], cmap="tab10")
    for (x, y), p in zip(xy, points):
        ax.annotate(f"{p['company']} {p['section_path']}", (x, y), fontsize=7)
    fig.savefig(sys.argv[1], dpi=150, bbox_inches="tight")
    print(f"\nsaved {sys.argv[1]}")
