import itertools

import numpy as np
import pytest
from analytics_fixtures import SIX, blobs

from contribkit.analytics.kmeans import assign, kmeans, label_clusters
from contribkit.errors import TooFewPointsError
from contribkit.textproc import TokenStats


def brute_force_two_partition(x):
    """Minimum-inertia split into two non-empty groups by trying every subset."""
    n = len(x)
    best = None
    for mask in range(1, 2 ** (n - 1)):
        groups = [[x[i] for i in range(n) if (mask >> i) & 1 == g] for g in (0, 1)]
        if not all(groups):
            continue
        cost = sum(((np.array(g) - np.mean(g, axis=0)) ** 2).sum() for g in groups)
        if best is None or cost < best[0]:
            best = (cost, frozenset(frozenset(i for i in range(n) if (mask >> i) & 1 == g) for g in (0, 1)))
    return best


def partition(assignments):
    groups = {}
    for i, c in enumerate(assignments):
        groups.setdefault(c, set()).add(i)
    return frozenset(frozenset(g) for g in groups.values())


class TestSixPoints:
    def test_oracle_partition(self):
        cost, expected = brute_force_two_partition(SIX)
        assert expected == frozenset({frozenset({0, 1, 2}), frozenset({3, 4, 5})})
        assert cost == pytest.approx(8 / 3)

    @pytest.mark.parametrize("seed", range(20))
    def test_recovers_oracle_for_every_seed(self, seed):
        model = kmeans(SIX, 2, seed=seed)
        assert partition(model.assignments) == frozenset({frozenset({0, 1, 2}), frozenset({3, 4, 5})})
        centroids = sorted(model.centroids.tolist())
        np.testing.assert_allclose(centroids, [[1 / 3, 1 / 3], [31 / 3, 31 / 3]], atol=1e-12)
        assert model.inertia == pytest.approx(8 / 3)
        assert model.converged


class TestEdgeCases:
    def test_k_equals_n(self):
        model = kmeans(SIX, 6, seed=1)
        assert sorted(model.assignments) == list(range(6))
        assert model.inertia == 0.0

    def test_k_one(self):
        model = kmeans(SIX, 1)
        np.testing.assert_allclose(model.centroids[0], SIX.mean(axis=0))
        assert model.inertia == pytest.approx(SIX.var(axis=0).sum() * len(SIX))

    def test_too_few_points(self):
        with pytest.raises(TooFewPointsError):
            kmeans(SIX[:2], 3)

    def test_duplicate_points_fill_every_cluster(self):
        x = np.zeros((5, 3))
        model = kmeans(x, 3, seed=4)
        assert sorted(set(model.assignments)) == [0, 1, 2]

    def test_deterministic(self):
        x, _ = blobs(7)
        a, b = kmeans(x, 4, seed=9), kmeans(x, 4, seed=9)
        assert a.assignments == b.assignments
        np.testing.assert_array_equal(a.centroids, b.centroids)


@pytest.mark.parametrize("fixture", ["six", "blobs", "uniform"])
def test_inertia_never_rises(fixture):
    rng = np.random.default_rng(0)
    x = {"six": SIX, "blobs": blobs(3)[0], "uniform": rng.random((40, 5))}[fixture]
    k = 2 if fixture == "six" else 4
    for seed in range(25):
        model = kmeans(x, k, seed=seed)
        hist = model.inertia_history
        assert all(b <= a + 1e-9 for a, b in itertools.pairwise(hist))
        # a converged model is a fixed point of the assignment step
        labels, _ = assign(x, model.centroids)
        assert labels.tolist() == model.assignments


class TestLabels:
    def test_repeated_term_ranks_first(self):
        stats = [TokenStats({"bandwidth": 3, "cost": 1}, 4), TokenStats({"bandwidth": 2, "uplink": 2}, 4)]
        assert label_clusters([0, 0], stats, m=2) == {0: ["bandwidth", "uplink"]}

    def test_singleton_cluster_uses_own_terms(self):
        stats = [TokenStats({"paging": 2, "idle": 1, "pdcch": 3}, 6), TokenStats({"uplink": 1}, 1)]
        assert label_clusters([0, 1], stats, k=2) == {0: ["pdcch", "paging", "idle"], 1: ["uplink"]}

    def test_ties_alphabetical_and_stopwords(self):
        stats = [TokenStats({"uplink": 2, "downlink": 2, "ue": 5}, 9)]
        assert label_clusters([0], stats, m=2, stopwords={"ue"}) == {0: ["downlink", "uplink"]}

    def test_empty_cluster_gets_no_terms(self):
        assert label_clusters([0], [TokenStats({"x1": 1}, 1)], k=2)[1] == []

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            label_clusters([0, 1], [TokenStats()])
