"""Train, block, cluster: the end-to-end disambiguation flow and its block scheduler."""

import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .blocking import DEFAULT_BLOCK, DEFAULT_COARSE, BlockingKeySpec, group_by_size, partition
from .cluster import DbscanParams, cluster_block
from .exceptions import DataError, ModelError
from .features import FEATURE_LABELS, FEATURE_NAMES, FEATURE_ORDER_ID, PairFeaturizer
from .forest import RandomForestLinker
from .sampler import build_pairs

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS = (500, 5000)
DEFAULT_CAPS = (24, 12, 6)


def _spec(value):
    return value if isinstance(value, BlockingKeySpec) else BlockingKeySpec.parse(value)


def training_matrix(mentions, labels, coarse_block=DEFAULT_COARSE, max_neg_per_pos=1.0,
                    seed=0, stop_words=None):
    """Sample training pairs and featurize them.

    Returns ``(X, y, pairs, featurizer)``; the featurizer's IDF table covers
    every mention passed in.
    """
    pairs = build_pairs(mentions, labels, _spec(coarse_block), max_neg_per_pos, seed)
    by_id = {m.mention_id: m for m in mentions}
    featurizer = PairFeaturizer(stop_words=stop_words).fit(mentions)
    X = featurizer.transform((by_id[p.a_id], by_id[p.b_id]) for p in pairs)
    y = np.array([p.label for p in pairs], dtype=np.int64)
    if y.min() == y.max():
        raise DataError("training pairs contain a single class; "
                        "no negative pairs share a coarse block")
    return X, y, pairs, featurizer


class BlockScheduler:
    """Run one job per block with a concurrency cap per block-size group.

    Groups run one after another, largest blocks first; within a group at
    most ``cap`` jobs are in flight.  Results come back keyed by block key,
    so the merge does not depend on completion order.

    ``on_start`` / ``on_finish`` are called with ``(group_index, block)``
    from the worker threads (thread backend only); tests use them to watch
    in-flight counts.
    """

    def __init__(self, thresholds=DEFAULT_THRESHOLDS, caps=DEFAULT_CAPS, backend="thread",
                 on_start=None, on_finish=None):
        self.thresholds = tuple(thresholds)
        self.caps = tuple(caps)
        if backend not in ("thread", "process"):
            raise ValueError(f"backend must be 'thread' or 'process', got {backend!r}")
        self.backend = backend
        self.on_start = on_start
        self.on_finish = on_finish

    def plan(self, blocks):
        groups = group_by_size(blocks, self.thresholds, self.caps)
        ordered = []
        for gi in reversed(range(len(groups))):
            bucket, cap = groups[gi]
            bucket = sorted(bucket, key=lambda b: (-len(b.member_ids), b.key))
            ordered.append((gi, bucket, cap))
        return ordered

    def run(self, blocks, job, initializer=None, initargs=()):
        results = {}
        for gi, bucket, cap in self.plan(blocks):
            if not bucket:
                continue
            if cap == 1 and self.backend == "thread":
                for b in bucket:
                    results[b.key] = self._call(gi, b, job)
                continue
            if self.backend == "process":
                with ProcessPoolExecutor(cap, initializer=initializer, initargs=initargs) as pool:
                    futures = {b.key: pool.submit(job, b) for b in bucket}
                    for key, fut in futures.items():
                        results[key] = fut.result()
            else:
                with ThreadPoolExecutor(cap) as pool:
                    futures = {b.key: pool.submit(self._call, gi, b, job) for b in bucket}
                    for key, fut in futures.items():
                        results[key] = fut.result()
        return results

    def _call(self, gi, block, job):
        if self.on_start:
            self.on_start(gi, block)
        try:
            return job(block)
        finally:
            if self.on_finish:
                self.on_finish(gi, block)


# worker-process state for the process backend
_WORKER = {}


def _init_worker(mentions, forest, ctx, params, cache_cap):
    _WORKER.update(mentions=mentions, forest=forest, ctx=ctx, params=params, cache_cap=cache_cap)


def _worker_job(block):
    w = _WORKER
    return cluster_block(block, w["mentions"], w["forest"], w["ctx"], w["params"], w["cache_cap"])


def disambiguate(mentions, forest, ctx, block=DEFAULT_BLOCK, params=DbscanParams(),
                 scheduler=None, cache_cap=5000):
    """Cluster every block and merge into ``{mention_id: "<block key>#<n>"}``."""
    order_id = getattr(forest, "feature_order_id_", FEATURE_ORDER_ID)
    if order_id != FEATURE_ORDER_ID:
        raise ModelError(
            f"model feature order {order_id!r} does not match this build's {FEATURE_ORDER_ID!r}")
    scheduler = scheduler or BlockScheduler()
    by_id = {m.mention_id: m for m in mentions}
    blocks = partition(mentions, _spec(block))
    logger.info("%d mentions in %d blocks", len(by_id), len(blocks))

    def job(b):
        return cluster_block(b, by_id, forest, ctx, params, cache_cap)

    if scheduler.backend == "process":
        local = scheduler.run(blocks, _worker_job, _init_worker,
                              (by_id, forest, ctx, params, cache_cap))
    else:
        local = scheduler.run(blocks, job)
    out = {}
    for key in sorted(local):
        for mid, lab in local[key].items():
            out[mid] = f"{key}#{lab}"
    return dict(sorted(out.items()))


class Disambiguator(BaseEstimator):
    """End-to-end inventor disambiguation.

    ``fit(mentions, labels)`` samples pairs from labeled clusters and trains
    the linkage forest; ``predict(mentions)`` blocks the mentions, clusters
    each block with DBSCAN on forest vote distances and returns
    ``{mention_id: cluster_id}``.
    """

    def __init__(self, block="FN(1)+LN(f)", coarse_block="FN(1)+LN(3)", n_estimators=100,
                 max_features=5, min_samples_leaf=1, eps=0.5, min_pts=2,
                 max_neg_per_pos=1.0, thresholds=DEFAULT_THRESHOLDS, caps=DEFAULT_CAPS,
                 stop_words=None, cache_cap=5000, backend="thread", random_state=0):
        self.block = block
        self.coarse_block = coarse_block
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.eps = eps
        self.min_pts = min_pts
        self.max_neg_per_pos = max_neg_per_pos
        self.thresholds = thresholds
        self.caps = caps
        self.stop_words = stop_words
        self.cache_cap = cache_cap
        self.backend = backend
        self.random_state = random_state

    def fit(self, mentions, labels):
        X, y, pairs, featurizer = training_matrix(
            mentions, labels, self.coarse_block, self.max_neg_per_pos,
            self.random_state, self.stop_words)
        forest = RandomForestLinker(self.n_estimators, self.max_features,
                                    self.min_samples_leaf, self.random_state)
        forest.fit(X, y)
        forest.feature_order_id_ = FEATURE_ORDER_ID
        self.forest_ = forest
        self.training_pairs_ = pairs
        self.n_positive_ = int(y.sum())
        self.n_negative_ = int(len(y) - y.sum())
        return self

    def predict(self, mentions, scheduler=None):
        check_is_fitted(self, "forest_")
        ctx = PairFeaturizer(self.stop_words).fit(mentions).context_
        scheduler = scheduler or BlockScheduler(self.thresholds, self.caps, self.backend)
        return disambiguate(mentions, self.forest_, ctx, self.block,
                            DbscanParams(self.eps, self.min_pts), scheduler, self.cache_cap)

    def fit_predict(self, mentions, labels):
        return self.fit(mentions, labels).predict(mentions)


def training_report(forest, n_positive=None, n_negative=None, k=10):
    lines = ["# training report"]
    if n_positive is not None:
        lines.append(f"positive_pairs\t{n_positive}")
        lines.append(f"negative_pairs\t{n_negative}")
    lines.append(f"trees\t{len(forest.estimators_)}")
    lines.append(f"features_per_split\t{forest.max_features}")
    lines.append(f"oob_error\t{forest.oob_error_:.6f}")
    lines.append("")
    lines.append(importance_table(forest, k))
    return "\n".join(lines) + "\n"


def importance_table(forest, k=10):
    lines = [f"Top {k} important features (mean Gini decrease)",
             f"{'rank':<6}{'feature':<34}{'importance':>12}"]
    for rank, name, imp in forest.top_features(FEATURE_NAMES, k):
        lines.append(f"{rank:<6}{FEATURE_LABELS[name]:<34}{imp:>12.6f}")
    return "\n".join(lines)

