"""DBSCAN over the mentions of one block, using forest vote fractions as distance."""

from collections import deque
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .exceptions import ModelError
from .features import FEATURE_ORDER_ID, block_pair_features, profiles_for, row_features

NOISE = -1
_UNSEEN = -2


@dataclass(frozen=True)
class DbscanParams:
    eps: float = 0.5
    min_pts: int = 2

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise ValueError(f"eps must lie in [0, 1), got {self.eps}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be >= 1, got {self.min_pts}")


def dbscan(n, neighbors, min_pts):
    """Run DBSCAN over points ``0..n-1`` in index order.

    ``neighbors(i)`` returns the indices ``j != i`` within eps of ``i``; the
    point itself counts toward ``min_pts``.  Each point's neighborhood is
    requested at most once.  A border point joins the first cluster whose
    expansion reaches it.  Noise points become singleton clusters.

    Returns ``(labels, core)``: dense integer labels numbered by first
    appearance in index order, and a boolean core-point mask.
    """
    labels = np.full(n, _UNSEEN, dtype=np.int64)
    core = np.zeros(n, dtype=bool)
    n_clusters = 0
    for i in range(n):
        if labels[i] != _UNSEEN:
            continue
        nb = neighbors(i)
        if len(nb) + 1 < min_pts:
            labels[i] = NOISE
            continue
        c = n_clusters
        n_clusters += 1
        labels[i] = c
        core[i] = True
        queue = deque(nb)
        while queue:
            q = queue.popleft()
            if labels[q] == NOISE:
                labels[q] = c
                continue
            if labels[q] != _UNSEEN:
                continue
            labels[q] = c
            nbq = neighbors(q)
            if len(nbq) + 1 >= min_pts:
                core[q] = True
                queue.extend(nbq)
    for i in np.flatnonzero(labels == NOISE):
        labels[i] = n_clusters
        n_clusters += 1
    return _relabel_dense(labels), core


def _relabel_dense(labels):
    mapping = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        out[i] = mapping.setdefault(int(lab), len(mapping))
    return out


def _check_distance_matrix(D):
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.array_equal(D, D.T):
        raise ValueError("distance matrix must be symmetric")
    return D


class VoteDBSCAN(ClusterMixin, BaseEstimator):
    """DBSCAN on a precomputed distance matrix.

    Parameters
    ----------
    eps : float, default=0.5
    min_pts : int, default=2
        Neighborhood size for a core point, counting the point itself.

    Attributes
    ----------
    labels_ : ndarray of int
        Dense cluster labels; former noise points hold their own label.
    core_sample_mask_ : ndarray of bool
    """

    def __init__(self, eps=0.5, min_pts=2):
        self.eps = eps
        self.min_pts = min_pts

    def fit(self, X, y=None):
        params = DbscanParams(self.eps, self.min_pts)
        D = _check_distance_matrix(X)
        n = D.shape[0]
        within = D <= params.eps

        def neighbors(i):
            nb = np.flatnonzero(within[i])
            return nb[nb != i]

        self.labels_, self.core_sample_mask_ = dbscan(n, neighbors, params.min_pts)
        return self


def brute_force_reference(distances, params):
    """DBSCAN straight from the definitions, for testing.

    Core points are found by counting each row of the full matrix, clusters
    by propagating the minimum index over the core eps-graph until nothing
    changes, and each border point takes the cluster of its lowest-index
    core neighbor.  Returns ``(labels, core)`` like ``dbscan``.
    """
    D = _check_distance_matrix(distances)
    n = D.shape[0]
    adj = D <= params.eps
    np.fill_diagonal(adj, True)
    core = adj.sum(axis=1) >= params.min_pts

    comp = np.arange(n)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if not core[i]:
                continue
            for j in range(n):
                if core[j] and adj[i, j] and comp[j] < comp[i]:
                    comp[i] = comp[j]
                    changed = True
    labels = comp.copy()
    for i in range(n):
        if core[i]:
            continue
        core_nb = [j for j in range(n) if core[j] and adj[i, j]]
        labels[i] = comp[core_nb[0]] if core_nb else n + i
    return _relabel_dense(labels), core


class _BlockDistances:
    """Vote-fraction distances within one block, cached or on demand."""

    def __init__(self, members, forest, ctx, cache_cap):
        self.members = members
        self.forest = forest
        self.ctx = ctx
        self.n = len(members)
        self.n_trees = len(forest.estimators_)
        self.cached = self.n <= cache_cap
        if self.cached:
            # condensed upper triangle of non-match vote counts, row-major
            self.table = np.zeros(self.n * (self.n - 1) // 2, dtype=np.uint16)
            if self.n > 1:
                self.table[:] = forest.predict_votes(block_pair_features(members, ctx))[:, 0]
        else:
            self.profiles = profiles_for(members, ctx)

    def _condensed_index(self, i, j):
        n = self.n
        return n * i - i * (i + 1) // 2 + (j - i - 1)

    def row(self, i):
        """Distances from member ``i`` to all others, in index order without ``i``."""
        if self.cached:
            lower = np.arange(i)
            upper = np.arange(i + 1, self.n)
            k = np.concatenate((self._condensed_index(lower, i),
                                self._condensed_index(i, upper)))
            return self.table[k] / self.n_trees
        X = row_features(self.members, i, self.ctx, self.profiles)
        return self.forest.distance(X)


def cluster_block(block, mentions, forest, ctx, params=DbscanParams(), cache_cap=5000,
                  return_core=False):
    """Cluster one block's mentions.

    Members are scanned in ascending mention-id order.  ``mentions`` maps
    mention id to Mention.  Returns ``{mention_id: local int label}``, or
    ``(labels, core_ids)`` with ``return_core``.
    """
    order_id = getattr(forest, "feature_order_id_", FEATURE_ORDER_ID)
    if order_id != FEATURE_ORDER_ID:
        raise ModelError(
            f"forest feature order {order_id!r} does not match {FEATURE_ORDER_ID!r}")
    ids = sorted(block.member_ids)
    members = [mentions[i] for i in ids]
    n = len(members)
    if n == 1:
        single = {ids[0]: 0}
        core = frozenset(ids) if params.min_pts <= 1 else frozenset()
        return (single, core) if return_core else single
    dist = _BlockDistances(members, forest, ctx, cache_cap)
    others = np.arange(n)

    def neighbors(i):
        d = dist.row(i)
        idx = np.delete(others, i)
        return idx[d <= params.eps]

    labels, core = dbscan(n, neighbors, params.min_pts)
    out = {mid: int(lab) for mid, lab in zip(ids, labels)}
    if return_core:
        return out, frozenset(mid for mid, c in zip(ids, core) if c)
    return out
