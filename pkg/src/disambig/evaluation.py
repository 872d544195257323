"""Pairwise precision / recall / F1 and cluster-size statistics."""

import csv
import warnings
from collections import Counter
from dataclasses import dataclass

from .exceptions import DataError


@dataclass(frozen=True)
class PairwiseMetrics:
    precision: float
    recall: float
    f1: float
    matched_pairs: int
    predicted_pairs: int
    truth_pairs: int


def _pairs(n):
    return n * (n - 1) // 2


def pairwise_metrics(pred, truth):
    """Compare a predicted clustering with labeled clusters.

    Parameters
    ----------
    pred : mapping
        ``mention_id -> cluster label``.  Mentions not covered by ``truth``
        are ignored.
    truth : list of LabeledCluster

    Raises
    ------
    DataError
        If a labeled mention has no predicted cluster.
    """
    truth_of = {mid: c.cluster_id for c in truth for mid in c.member_ids}
    missing = sorted(mid for mid in truth_of if mid not in pred)
    if missing:
        raise DataError(
            f"{len(missing)} labeled mention(s) missing from the clustering: "
            + ", ".join(missing[:10]))
    pred_sizes = Counter(pred[mid] for mid in truth_of)
    cells = Counter((pred[mid], cid) for mid, cid in truth_of.items())
    truth_sizes = Counter(truth_of.values())

    matched = sum(_pairs(n) for n in cells.values())
    predicted = sum(_pairs(n) for n in pred_sizes.values())
    actual = sum(_pairs(n) for n in truth_sizes.values())

    if predicted == 0:
        warnings.warn("clustering predicts no pairs; precision set to 0")
    if actual == 0:
        warnings.warn("ground truth has no pairs; recall set to 0")
    precision = matched / predicted if predicted else 0.0
    recall = matched / actual if actual else 0.0
    # 2PR/(P+R) simplifies to 2m/(p+t), which avoids rounding in the ratio
    f1 = 2 * matched / (predicted + actual) if matched else 0.0
    return PairwiseMetrics(precision, recall, f1, matched, predicted, actual)


def cluster_size_histogram(pred):
    """``({size: frequency}, mean size)`` of a ``mention_id -> label`` mapping."""
    sizes = Counter(pred.values())
    hist = Counter(sizes.values())
    mean = sum(sizes.values()) / len(sizes) if sizes else 0.0
    return dict(sorted(hist.items())), mean


def format_report(metrics, hist=None, mean_size=None):
    lines = [
        f"{'metric':<18}{'value':>12}",
        f"{'precision':<18}{metrics.precision:>12.4f}",
        f"{'recall':<18}{metrics.recall:>12.4f}",
        f"{'f1':<18}{metrics.f1:>12.4f}",
        f"{'matched_pairs':<18}{metrics.matched_pairs:>12d}",
        f"{'predicted_pairs':<18}{metrics.predicted_pairs:>12d}",
        f"{'truth_pairs':<18}{metrics.truth_pairs:>12d}",
    ]
    if hist is not None:
        lines.append(f"{'clusters':<18}{sum(hist.values()):>12d}")
        lines.append(f"{'mean_cluster_size':<18}{mean_size:>12.4f}")
    return "\n".join(lines)


def write_metrics_csv(path, metrics):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("metric", "value"))
        for name in ("precision", "recall", "f1", "matched_pairs", "predicted_pairs", "truth_pairs"):
            w.writerow((name, repr(getattr(metrics, name))))


def write_histogram_csv(path, hist):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("size", "count"))
        for size, count in sorted(hist.items()):
            w.writerow((size, count))
