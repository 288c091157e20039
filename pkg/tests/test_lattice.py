import pytest

from conftest import make_window, random_window
from oracles import explicit_lattice_walk
from resprof.errors import NotAPermutation, ValidationError
from resprof.lattice import RankedEntry, RankedMetricList, enumerate_lattice_path, rank_by_elimination
from resprof.measures import DtwSimilarity, PearsonAbs
from resprof.model import MetricCatalog
from resprof.simulator import ScenarioSpec, generate


def test_singleton_catalog():
    w = make_window({"cpu": [1.0, 3.0, 2.0]}, {"cpu": [0.0, 0.0, 0.0]})
    ranked = rank_by_elimination(w, PearsonAbs())
    assert ranked.metrics == ("cpu",)
    assert ranked.entries[0].contribution == pytest.approx(1.0)


def test_unchanged_metrics_rank_lexicographically():
    data = {"m3": [1.0, 2.0], "m1": [0.0, 4.0], "bz": [2.0, 2.0], "m2": [5.0, 1.0]}
    ranked = rank_by_elimination(make_window(data, data), PearsonAbs())
    assert ranked.metrics == ("bz", "m1", "m2", "m3")
    assert all(e.contribution == 0.0 for e in ranked)


def test_injected_metric_ranked_first():
    catalog = MetricCatalog({"m1": "system_performance", "m2": "system_performance",
                             "m3": "system_performance", "b1": "user_aware"})
    spec = ScenarioSpec(seed=11, catalog=catalog, T=60, failure_preset="cpu_overload",
                        affected_system_metrics=["m2"], disseminate=False)
    w = generate(spec).window
    for measure in (PearsonAbs(), DtwSimilarity()):
        assert rank_by_elimination(w, measure).metrics[0] == "m2"


def test_matches_explicit_lattice(rng):
    for _ in range(20):
        w = random_window(rng, int(rng.integers(1, 5)), int(rng.integers(2, 10)))
        for measure in (PearsonAbs(), DtwSimilarity(2)):
            ranked = rank_by_elimination(w, measure)
            assert [(e.metric, e.contribution) for e in ranked] == explicit_lattice_walk(w, measure)


def test_deterministic(rng):
    w = random_window(rng, 5, 20)
    assert rank_by_elimination(w, DtwSimilarity()) == rank_by_elimination(w, DtwSimilarity())


class TestLatticePath:
    def test_four_metric_chain(self):
        chain = enumerate_lattice_path(["m2", "m4", "m1", "m3"], {"m1", "m2", "m3", "m4"})
        assert chain == [
            frozenset({"m1", "m2", "m3", "m4"}),
            frozenset({"m1", "m3", "m4"}),
            frozenset({"m1", "m3"}),
            frozenset({"m3"}),
            frozenset(),
        ]
        assert all(len(a - b) == 1 for a, b in zip(chain, chain[1:]))

    def test_singleton(self):
        assert enumerate_lattice_path(["m"], ["m"]) == [frozenset({"m"}), frozenset()]

    def test_accepts_ranked_list(self):
        ranked = RankedMetricList((RankedEntry("b", 0.5), RankedEntry("a", 0.1)))
        assert enumerate_lattice_path(ranked, ["a", "b"])[1] == frozenset({"a"})

    def test_missing_member(self):
        with pytest.raises(NotAPermutation):
            enumerate_lattice_path(["m1", "m2"], ["m1", "m2", "m3"])


class TestRankedList:
    def test_rank_is_one_based(self):
        ranked = RankedMetricList((("x", 0.2), ("y", 0.1)))
        assert ranked.rank("x") == 1 and ranked.rank("y") == 2

    def test_duplicates_rejected(self):
        with pytest.raises(ValidationError):
            RankedMetricList((("x", 0.2), ("x", 0.1)))

    def test_negative_contribution_rejected(self):
        with pytest.raises(ValidationError):
            RankedMetricList((("x", -0.2),))
