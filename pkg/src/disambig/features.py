"""Pairwise comparison vectors for mention pairs.

The vector layout is fixed by ``FEATURE_NAMES``; trained models record
``FEATURE_ORDER_ID`` and refuse to score vectors built under another layout.
"""

import zlib
from dataclasses import dataclass
from importlib import resources
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .textmetrics import NameIdfTable, idf, jaccard, jaro_winkler, soundex, tiered_exact

FEATURE_NAMES = (
    "fn_tier", "fn_jw", "fn_sdx",
    "mn_tier", "mn_jw", "mn_sdx",
    "ln_tier", "ln_jw", "ln_sdx", "ln_idf",
    "suffix_eq", "order_cmp",
    "city_eq", "city_jw", "city_sdx",
    "state_eq", "country_eq",
    "coauth_shared", "coauth_idf", "coauth_jacc",
    "asg_eq", "asg_jw", "asg_sdx",
    "group_eq", "subgroup_eq",
    "title_shared",
)
N_FEATURES = len(FEATURE_NAMES)
FEATURE_ORDER_ID = "pair26-v1-%08x" % zlib.crc32(",".join(FEATURE_NAMES).encode())

FEATURE_LABELS = {
    "fn_tier": "First name (Exact)", "fn_jw": "First name (Jaro-Winkler)",
    "fn_sdx": "First name (Soundex)", "mn_tier": "Middle name (Exact)",
    "mn_jw": "Middle name (Jaro-Winkler)", "mn_sdx": "Middle name (Soundex)",
    "ln_tier": "Last name (Exact)", "ln_jw": "Last name (Jaro-Winkler)",
    "ln_sdx": "Last name (Soundex)", "ln_idf": "Last name (IDF)",
    "suffix_eq": "Suffix (Exact)", "order_cmp": "Order (Order comparison)",
    "city_eq": "Affiliation city (Exact)", "city_jw": "Affiliation city (Jaro-Winkler)",
    "city_sdx": "Affiliation city (Soundex)", "state_eq": "State (Exact)",
    "country_eq": "Country (Exact)", "coauth_shared": "Co-inventor (# of name shared)",
    "coauth_idf": "Co-inventor (IDF)", "coauth_jacc": "Co-inventor (Jaccard)",
    "asg_eq": "Assignee (Exact)", "asg_jw": "Assignee (Jaro-Winkler)",
    "asg_sdx": "Assignee (Soundex)", "group_eq": "Group (Exact)",
    "subgroup_eq": "Subgroup (Exact)", "title_shared": "Title (# of term shared)",
}


def default_stop_words():
    text = resources.files("disambig").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def read_stop_words(path):
    with open(path, encoding="utf-8") as fh:
        words = frozenset(w.strip().casefold() for w in fh if w.strip())
    if not words:
        raise ValueError(f"{path}: stop-word file is empty")
    return words


@dataclass(frozen=True)
class FeatureContext:
    last_name_idf: NameIdfTable
    stop_words: frozenset

    def __post_init__(self):
        if not self.stop_words:
            raise ValueError("stop_words must be non-empty")

    @classmethod
    def from_mentions(cls, mentions, stop_words=None):
        table = NameIdfTable.from_names(m.last_name for m in mentions)
        return cls(table, frozenset(stop_words) if stop_words else default_stop_words())


def order_feature(a, b):
    if a.inventor_order == 1 and b.inventor_order == 1:
        return 2
    if a.inventor_order == a.inventor_count and b.inventor_order == b.inventor_count:
        return 1
    return 0


class _Profile(NamedTuple):
    m: object
    fn_sdx: str
    mn_sdx: str
    ln_sdx: str
    city_sdx: str
    asg_sdx: str
    coauthors: frozenset
    title: frozenset


def _profile(m, ctx):
    return _Profile(
        m, soundex(m.first_name), soundex(m.middle_name), soundex(m.last_name),
        soundex(m.city), soundex(m.assignee_name),
        frozenset(m.coinventor_last_names),
        frozenset(t for t in m.title_terms if t not in ctx.stop_words),
    )


def _compare(pa, pb, ctx):
    a, b = pa.m, pb.m
    table = ctx.last_name_idf
    if a.last_name == b.last_name:
        ln_idf = idf(a.last_name, table)
    else:
        ln_idf = min(idf(a.last_name, table), idf(b.last_name, table))
    shared = pa.coauthors & pb.coauthors
    return (
        tiered_exact(a.first_name, b.first_name),
        jaro_winkler(a.first_name, b.first_name),
        float(pa.fn_sdx == pb.fn_sdx),
        tiered_exact(a.middle_name, b.middle_name),
        jaro_winkler(a.middle_name, b.middle_name),
        float(pa.mn_sdx == pb.mn_sdx),
        tiered_exact(a.last_name, b.last_name),
        jaro_winkler(a.last_name, b.last_name),
        float(pa.ln_sdx == pb.ln_sdx),
        ln_idf,
        float(a.suffix == b.suffix),
        order_feature(a, b),
        float(a.city == b.city),
        jaro_winkler(a.city, b.city),
        float(pa.city_sdx == pb.city_sdx),
        float(a.state == b.state),
        float(a.country == b.country),
        len(shared),
        # sorted so the float sum does not depend on set iteration order
        sum(idf(n, table) for n in sorted(shared)),
        jaccard(pa.coauthors, pb.coauthors),
        float(a.assignee_name == b.assignee_name),
        jaro_winkler(a.assignee_name, b.assignee_name),
        float(pa.asg_sdx == pb.asg_sdx),
        float(a.group == b.group),
        float(a.subgroup == b.subgroup),
        len(pa.title & pb.title),
    )


def extract(a, b, ctx):
    """Return the 26-element comparison vector for mentions ``a`` and ``b``."""
    if a.mention_id == b.mention_id:
        raise ValueError(f"cannot compare mention {a.mention_id!r} with itself")
    return np.asarray(_compare(_profile(a, ctx), _profile(b, ctx), ctx), dtype=np.float64)


def block_pair_features(mentions, ctx):
    """Feature rows for every unordered pair ``i < j`` of ``mentions``.

    Rows follow ``np.triu_indices(len(mentions), k=1)`` order.
    """
    profiles = [_profile(m, ctx) for m in mentions]
    n = len(profiles)
    rows = [_compare(profiles[i], profiles[j], ctx)
            for i in range(n) for j in range(i + 1, n)]
    if not rows:
        return np.empty((0, N_FEATURES))
    return np.asarray(rows, dtype=np.float64)


def row_features(mentions, i, ctx, profiles=None):
    """Feature rows comparing ``mentions[i]`` with every other mention, in index order."""
    if profiles is None:
        profiles = [_profile(m, ctx) for m in mentions]
    rows = [_compare(profiles[i], profiles[j], ctx) for j in range(len(mentions)) if j != i]
    if not rows:
        return np.empty((0, N_FEATURES))
    return np.asarray(rows, dtype=np.float64)


def profiles_for(mentions, ctx):
    return [_profile(m, ctx) for m in mentions]


class PairFeaturizer(TransformerMixin, BaseEstimator):
    """Turn mention pairs into comparison vectors.

    ``fit`` learns the last-name IDF table from a mention collection;
    ``transform`` maps a sequence of ``(Mention, Mention)`` pairs to an
    ``(n_pairs, 26)`` array.

    Parameters
    ----------
    stop_words : iterable of str, optional
        Title terms ignored when counting shared terms.  Defaults to the
        bundled English list.
    """

    def __init__(self, stop_words=None):
        self.stop_words = stop_words

    def fit(self, mentions, y=None):
        self.context_ = FeatureContext.from_mentions(mentions, self.stop_words)
        self.n_features_out_ = N_FEATURES
        return self

    def transform(self, pairs):
        check_is_fitted(self, "context_")
        ctx = self.context_
        cache = {}

        def prof(m):
            p = cache.get(m.mention_id)
            if p is None:
                p = cache[m.mention_id] = _profile(m, ctx)
            return p

        rows = []
        for a, b in pairs:
            if a.mention_id == b.mention_id:
                raise ValueError(f"cannot compare mention {a.mention_id!r} with itself")
            rows.append(_compare(prof(a), prof(b), ctx))
        if not rows:
            return np.empty((0, N_FEATURES))
        return np.asarray(rows, dtype=np.float64)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)
