"""Random forest pairwise linkage classifier.

CART trees with Gini splits on bootstrap samples, ``max_features`` candidate
features per split, out-of-bag error and Gini importance.  Labels are 1 for
"same person" and 0 for "different person"; the negative-vote fraction of
the ensemble is the clustering distance.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

LEAF = -1
_TIE_TOL = 1e-12
_MAX_BOOTSTRAP_REDRAWS = 100


class DecisionTree:
    """A fitted tree stored as flat pre-order node arrays.

    ``feature[i] == LEAF`` marks a leaf; otherwise samples with
    ``x[feature[i]] <= threshold[i]`` go to ``left[i]`` (always ``i + 1``)
    and the rest to ``right[i]``.  ``value[i]`` holds the weighted
    ``(non-match, match)`` counts reaching node ``i``.
    """

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.value = np.asarray(value, dtype=np.float64).reshape(-1, 2)

    @property
    def node_count(self):
        return len(self.feature)

    @property
    def depth(self):
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X):
        """Index of the leaf reached by each row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.int32)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def vote(self, X):
        """1 where the reached leaf holds strictly more match weight, else 0."""
        leaf = self.value[self.apply(X)]
        return (leaf[:, 1] > leaf[:, 0]).astype(np.int8)


def _gini_weighted(w_pos, w_tot):
    # total weight times Gini impurity: W * 2p(1-p) = 2 * pos * neg / W
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 2.0 * w_pos * (w_tot - w_pos) / w_tot
    return np.where(w_tot > 0, out, 0.0)


def _best_split(X, y, w, cnt, idx, rng, max_features, min_leaf):
    """Best (feature, threshold, children impurity) at a node, or None.

    Candidate features are visited in a random order; constant features are
    skipped and do not count toward ``max_features``.  Among equal scores the
    lowest feature index, then the lowest threshold, wins.
    """
    n_features = X.shape[1]
    order_f = rng.permutation(n_features)
    wy = w[idx] * y[idx]
    wn = w[idx]
    cn = cnt[idx]
    best = None
    tried = 0
    for f in order_f:
        if tried >= max_features:
            break
        x = X[idx, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        tried += 1
        cpos = np.cumsum(wy[order])
        ctot = np.cumsum(wn[order])
        ccnt = np.cumsum(cn[order])
        tot_pos, tot_w, tot_c = cpos[-1], ctot[-1], ccnt[-1]
        cut = np.flatnonzero(xs[:-1] < xs[1:])
        cut = cut[(ccnt[cut] >= min_leaf) & (tot_c - ccnt[cut] >= min_leaf)]
        if cut.size == 0:
            continue
        imp = (_gini_weighted(cpos[cut], ctot[cut])
               + _gini_weighted(tot_pos - cpos[cut], tot_w - ctot[cut]))
        k = int(np.argmin(imp))
        score = float(imp[k])
        lo, hi = xs[cut[k]], xs[cut[k] + 1]
        thr = lo + (hi - lo) / 2.0
        if not lo <= thr < hi:
            thr = lo
        cand = (score, int(f), float(thr))
        if best is None or score < best[0] - _TIE_TOL or (
                abs(score - best[0]) <= _TIE_TOL and cand[1:] < best[1:]):
            best = cand
    if best is None:
        return None
    return best[1], best[2], best[0]


def build_tree(X, y, weight, count, rng, max_features, min_leaf=1):
    """Grow one tree on the rows with positive ``count``.

    Returns the tree and its per-feature total weighted Gini decrease,
    divided by the root weight.
    """
    n_features = X.shape[1]
    importance = np.zeros(n_features)
    idx0 = np.flatnonzero(count > 0)
    w = weight * count
    root_w = w[idx0].sum()

    feature, threshold, left, right, value = [], [], [], [], []
    # (sample indices, parent node id awaiting a right child or -1)
    stack = [(idx0, -1)]
    while stack:
        idx, parent = stack.pop()
        node = len(feature)
        if parent >= 0:
            right[parent] = node
        w_pos = float(np.dot(w[idx], y[idx]))
        w_tot = float(w[idx].sum())
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append((w_tot - w_pos, w_pos))

        node_imp = float(_gini_weighted(w_pos, w_tot))
        if node_imp <= 0.0 or count[idx].sum() < 2 * min_leaf:
            continue
        split = _best_split(X, y, w, count, idx, rng, max_features, min_leaf)
        if split is None:
            continue
        f, thr, child_imp = split
        if child_imp >= node_imp - _TIE_TOL:
            continue
        importance[f] += (node_imp - child_imp) / root_w
        feature[node] = f
        threshold[node] = thr
        left[node] = node + 1
        go_left = X[idx, f] <= thr
        # right pushed first so the left subtree is laid out immediately after
        stack.append((idx[~go_left], node))
        stack.append((idx[go_left], -1))
    return DecisionTree(feature, threshold, left, right, value), importance


def _tree_rng(seed, i):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, i)))


class RandomForestLinker(ClassifierMixin, BaseEstimator):
    """Bagged Gini trees voting match (1) / non-match (0) on pair vectors.

    Parameters
    ----------
    n_estimators : int, default=100
    max_features : int, default=5
        Non-constant features examined at each split.
    min_samples_leaf : int, default=1
        Minimum bootstrap-sample count on each side of a split.
    random_state : int, default=0
        Root seed.  Tree ``i`` draws from a stream derived from
        ``(random_state, i)``, so adding trees leaves earlier trees unchanged.
    n_jobs : int, default=1
        Threads used to grow trees; the result does not depend on it.

    Attributes
    ----------
    estimators_ : list of DecisionTree
    in_bag_ : ndarray of shape (n_estimators, n_samples)
        Bootstrap multiplicity of each training row per tree.
    oob_error_ : float
        NaN when every training row was drawn by every tree.
    gini_importance_ : ndarray of shape (n_features,)
        Mean over trees of the total weighted Gini decrease per feature.
    """

    def __init__(self, n_estimators=100, max_features=5, min_samples_leaf=1,
                 random_state=0, n_jobs=1):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.min_samples_leaf = min_samples_leaf
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _validate_params(self, n_features):
        if int(self.n_estimators) < 1:
            raise ValueError("n_estimators must be >= 1")
        if not 1 <= int(self.max_features) <= n_features:
            raise ValueError(
                f"max_features must lie in 1..{n_features}, got {self.max_features}")
        if int(self.min_samples_leaf) < 1:
            raise ValueError("min_samples_leaf must be >= 1")

    def _bootstrap(self, rng, y):
        n = len(y)
        for _ in range(_MAX_BOOTSTRAP_REDRAWS):
            count = np.bincount(rng.integers(0, n, n), minlength=n)
            if 0 < y[count > 0].sum() < np.count_nonzero(count):
                return count
        return count

    def _fit_one(self, i, X, y, weight, seed):
        rng = _tree_rng(seed, i)
        count = self._bootstrap(rng, y)
        tree, imp = build_tree(X, y, weight, count, rng, int(self.max_features),
                               int(self.min_samples_leaf))
        return tree, imp, count

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y, dtype=np.float64)
        classes = np.unique(y)
        if not np.all(np.isin(classes, (0, 1))):
            raise ValueError(f"labels must be 0 (non-match) or 1 (match), got {classes}")
        if classes.size < 2:
            raise ValueError("training data must contain both match and non-match examples")
        y = y.astype(np.float64)
        self._validate_params(X.shape[1])
        if sample_weight is None:
            weight = np.ones(len(y))
        else:
            weight = np.asarray(sample_weight, dtype=np.float64)
            if weight.shape != y.shape or np.any(weight < 0):
                raise ValueError("sample_weight must be non-negative, one per example")
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % (2**63))
        self.seed_ = int(seed)

        jobs = range(int(self.n_estimators))
        if self.n_jobs and self.n_jobs > 1:
            with ThreadPoolExecutor(self.n_jobs) as pool:
                results = list(pool.map(lambda i: self._fit_one(i, X, y, weight, self.seed_), jobs))
        else:
            results = [self._fit_one(i, X, y, weight, self.seed_) for i in jobs]

        self.estimators_ = [r[0] for r in results]
        self.gini_importance_ = np.mean([r[1] for r in results], axis=0)
        self.in_bag_ = np.vstack([r[2] for r in results]).astype(np.int32)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        try:
            self.oob_error_ = self.oob_error(X, y)
        except ValueError:
            warnings.warn("no out-of-bag examples; oob_error_ set to NaN")
            self.oob_error_ = float("nan")
        return self

    def _check_X(self, X):
        check_is_fitted(self, "estimators_")
        X = check_array(X, dtype=np.float64, ensure_2d=False)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected feature vectors of length {self.n_features_in_}, got {X.shape[1]}")
        return X

    def predict_votes(self, X):
        """Per-row ``(non-match votes, match votes)`` as an ``(n, 2)`` int array."""
        X = self._check_X(X)
        pos = np.zeros(X.shape[0], dtype=np.int64)
        for tree in self.estimators_:
            pos += tree.vote(X)
        return np.column_stack((len(self.estimators_) - pos, pos))

    def predict_proba(self, X):
        votes = self.predict_votes(X)
        return votes / len(self.estimators_)

    def predict(self, X):
        votes = self.predict_votes(X)
        return (votes[:, 1] > votes[:, 0]).astype(np.int64)

    def distance(self, X):
        """Fraction of trees voting non-match."""
        return self.predict_votes(X)[:, 0] / len(self.estimators_)

    def oob_error(self, X, y):
        """Majority-vote error using, for each row, only trees that left it out.

        Rows drawn by every tree are excluded.  Raises ``ValueError`` if no
        row is out of bag or ``X`` is not the training matrix.
        """
        check_is_fitted(self, "in_bag_")
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] != self.in_bag_.shape[1] or len(y) != X.shape[0]:
            raise ValueError("oob_error needs the training data the forest was fit on")
        pos = np.zeros(X.shape[0])
        n_votes = np.zeros(X.shape[0])
        for tree, count in zip(self.estimators_, self.in_bag_):
            oob = np.flatnonzero(count == 0)
            if oob.size == 0:
                continue
            pos[oob] += tree.vote(X[oob])
            n_votes[oob] += 1
        has = n_votes > 0
        if not has.any():
            raise ValueError("no out-of-bag examples")
        pred = (pos[has] > n_votes[has] - pos[has]).astype(int)
        return float(np.mean(pred != y[has].astype(int)))

    @property
    def feature_importances_(self):
        check_is_fitted(self, "gini_importance_")
        total = self.gini_importance_.sum()
        if total <= 0:
            return np.zeros_like(self.gini_importance_)
        return self.gini_importance_ / total

    def top_features(self, names, k=10):
        """``[(rank, name, importance), ...]`` for the ``k`` most important features."""
        imp = self.gini_importance_
        order = sorted(range(len(imp)), key=lambda i: (-imp[i], i))[:k]
        return [(r + 1, names[i], float(imp[i])) for r, i in enumerate(order)]
