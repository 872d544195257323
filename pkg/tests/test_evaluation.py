import pytest
from hypothesis import given
from hypothesis import strategies as st

from disambig.evaluation import (cluster_size_histogram, format_report, pairwise_metrics,
                                 write_histogram_csv, write_metrics_csv)
from disambig.exceptions import DataError
from disambig.records import LabeledCluster


def truth(*groups):
    return [LabeledCluster(f"t{i}", frozenset(g)) for i, g in enumerate(groups)]


def test_worked_example():
    pred = {"a": 0, "b": 0, "c": 0, "d": 1}
    m = pairwise_metrics(pred, truth("ab", "cd"))
    assert (m.matched_pairs, m.predicted_pairs, m.truth_pairs) == (1, 3, 2)
    assert m.precision == 1 / 3
    assert m.recall == 1 / 2
    assert m.f1 == 0.4


def test_identical():
    m = pairwise_metrics({"a": 5, "b": 5, "c": 7}, truth("ab", "c"))
    assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)


def test_all_singletons():
    with pytest.warns(UserWarning):
        m = pairwise_metrics({"a": 0, "b": 1}, truth("ab"))
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)


def test_missing_and_extra_mentions():
    with pytest.raises(DataError, match="b"):
        pairwise_metrics({"a": 0}, truth("ab"))
    m = pairwise_metrics({"a": 0, "b": 0, "x": 0, "y": 0}, truth("ab"))
    assert m.predicted_pairs == 1 and m.precision == 1.0


partitions = st.lists(st.integers(0, 4), min_size=1, max_size=12)


@given(partitions, partitions, st.permutations(range(5)))
def test_metric_properties(p, t, relabel):
    n = min(len(p), len(t))
    ids = [f"m{i}" for i in range(n)]
    pred = {ids[i]: p[i] for i in range(n)}
    groups = {}
    for i in range(n):
        groups.setdefault(t[i], set()).add(ids[i])
    tr = [LabeledCluster(str(k), frozenset(v)) for k, v in groups.items()]
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m = pairwise_metrics(pred, tr)
        m2 = pairwise_metrics({k: relabel[v] for k, v in pred.items()}, tr)
    assert m == m2
    assert m.matched_pairs <= min(m.predicted_pairs, m.truth_pairs)
    same = sorted(map(sorted, groups.values())) == sorted(
        sorted(mid for mid in ids if pred[mid] == lab) for lab in set(pred.values()))
    if m.truth_pairs and m.predicted_pairs:
        assert (m.precision == 1 and m.recall == 1) == same
    if m.precision + m.recall > 0:
        assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))


def test_histogram():
    hist, mean = cluster_size_histogram({"a": 1, "b": 1, "c": 2, "d": 2, "e": 3, "f": 3, "g": 3})
    assert hist == {2: 2, 3: 1} and mean == 7 / 3
    assert cluster_size_histogram({}) == ({}, 0.0)
    hist, mean = cluster_size_histogram({c: c for c in "abcde"})
    assert hist == {1: 5} and mean == 1.0


def test_report_files(tmp_path):
    m = pairwise_metrics({"a": 0, "b": 0, "c": 0, "d": 1}, truth("ab", "cd"))
    write_metrics_csv(tmp_path / "m.csv", m)
    write_histogram_csv(tmp_path / "h.csv", {3: 1, 1: 1})
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "metric,value" and lines[3] == "f1,0.4"
    assert (tmp_path / "h.csv").read_text() == "size,count\n1,1\n3,1\n"
    assert "precision" in format_report(m, {3: 1, 1: 1}, 2.0)
