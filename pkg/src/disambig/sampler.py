"""Pairwise training samples from labeled clusters."""

import csv
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .blocking import DEFAULT_COARSE, block_key
from .exceptions import DataError

MATCH = 1
NON_MATCH = 0


@dataclass(frozen=True)
class PairSample:
    a_id: str
    b_id: str
    label: int

    def __post_init__(self):
        if self.a_id == self.b_id:
            raise ValueError(f"pair of mention {self.a_id!r} with itself")


def build_pairs(mentions, labels, coarse_key=DEFAULT_COARSE, max_neg_per_pos=1.0,
                seed=0, singleton_negatives=False):
    """Positive and negative training pairs.

    Singleton clusters are dropped.  Positives are every within-cluster pair;
    negatives are pairs from different clusters that share a coarse block,
    drawn uniformly without replacement, at most ``max_neg_per_pos`` per
    positive.  With ``singleton_negatives`` the members of singleton clusters
    stay available as negative endpoints.

    Pairs are returned with ``a_id < b_id``: positives first, then negatives,
    each sorted.
    """
    if max_neg_per_pos < 0:
        raise ValueError("max_neg_per_pos must be >= 0")
    by_id = {m.mention_id: m for m in mentions}
    cluster_of = {}
    for c in labels:
        if len(c.member_ids) < 2 and not singleton_negatives:
            continue
        for mid in c.member_ids:
            if mid not in by_id:
                raise DataError(f"labeled mention {mid!r} is not in the mention set")
            cluster_of[mid] = c.cluster_id

    positives = []
    for c in labels:
        if len(c.member_ids) >= 2:
            positives.extend(combinations(sorted(c.member_ids), 2))
    if not positives:
        raise DataError(
            "no positive training pairs: every labeled cluster has a single mention")
    positives.sort()

    blocks = {}
    for mid in sorted(cluster_of):
        blocks.setdefault(block_key(by_id[mid], coarse_key), []).append(mid)
    candidates = []
    for key in sorted(blocks):
        members = blocks[key]
        for a, b in combinations(members, 2):
            if cluster_of[a] != cluster_of[b]:
                candidates.append((a, b))

    budget = int(np.floor(max_neg_per_pos * len(positives)))
    if len(candidates) > budget:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
        keep = np.sort(rng.choice(len(candidates), size=budget, replace=False))
        candidates = [candidates[i] for i in keep]
    negatives = sorted(candidates)

    return ([PairSample(a, b, MATCH) for a, b in positives]
            + [PairSample(a, b, NON_MATCH) for a, b in negatives])


def write_pairs(path, pairs):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("a_id", "b_id", "label"))
        for p in pairs:
            writer.writerow((p.a_id, p.b_id, p.label))
