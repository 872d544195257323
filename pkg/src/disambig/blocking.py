"""Name-prefix blocking and size grouping of blocks."""

import re
from dataclasses import dataclass

FULL = None

_SPEC_RE = re.compile(r"^\s*FN\((\d+|f)\)\s*\+\s*LN\((\d+|f)\)\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class BlockingKeySpec:
    """Prefix lengths of first and last name forming a block key; ``None`` means the full name."""

    first_name_prefix: int | None = 1
    last_name_prefix: int | None = FULL

    def __post_init__(self):
        for v in (self.first_name_prefix, self.last_name_prefix):
            if v is not None and (not isinstance(v, int) or v < 1):
                raise ValueError(f"prefix length must be a positive integer or FULL, got {v!r}")

    @classmethod
    def parse(cls, text):
        """Parse ``"FN(n|f)+LN(n|f)"``, e.g. ``"FN(1)+LN(f)"``."""
        m = _SPEC_RE.match(text)
        if not m:
            raise ValueError(f"bad blocking spec {text!r}; expected e.g. 'FN(1)+LN(f)'")
        fn, ln = (None if g.lower() == "f" else int(g) for g in m.groups())
        return cls(fn, ln)

    def __str__(self):
        def part(v):
            return "f" if v is None else str(v)
        return f"FN({part(self.first_name_prefix)})+LN({part(self.last_name_prefix)})"


DEFAULT_BLOCK = BlockingKeySpec(1, FULL)
DEFAULT_COARSE = BlockingKeySpec(1, 3)


@dataclass(frozen=True)
class Block:
    key: str
    member_ids: tuple


def block_key(m, spec):
    first = m.first_name if spec.first_name_prefix is None else m.first_name[:spec.first_name_prefix]
    last = m.last_name if spec.last_name_prefix is None else m.last_name[:spec.last_name_prefix]
    return f"{last}|{first}"


def partition(mentions, spec):
    """Group mentions by block key.

    Blocks are sorted by key and members by mention id.
    """
    groups = {}
    for m in mentions:
        groups.setdefault(block_key(m, spec), []).append(m.mention_id)
    return [Block(k, tuple(sorted(groups[k]))) for k in sorted(groups)]


def group_by_size(blocks, thresholds, caps):
    """Bucket blocks by member count.

    A block of size ``s`` goes to bucket ``i``, the number of thresholds
    ``<= s``.  Thresholds ``[500, 5000]`` give the buckets ``s < 500``,
    ``500 <= s < 5000`` and ``s >= 5000``.

    Returns ``[(blocks, cap), ...]`` with one entry per cap, in threshold
    order, empty buckets included.
    """
    thresholds = list(thresholds)
    caps = list(caps)
    if len(caps) != len(thresholds) + 1:
        raise ValueError(f"need {len(thresholds) + 1} caps for {len(thresholds)} thresholds, got {len(caps)}")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError(f"thresholds must be strictly ascending, got {thresholds}")
    if any(c < 1 for c in caps):
        raise ValueError(f"caps must be positive, got {caps}")
    buckets = [[] for _ in caps]
    for b in blocks:
        size = len(b.member_ids)
        i = sum(1 for t in thresholds if size >= t)
        buckets[i].append(b)
    return [(bucket, cap) for bucket, cap in zip(buckets, caps)]


def scale_caps(caps, max_threads, reference=24):
    """Scale concurrency caps tuned for ``reference`` threads to ``max_threads``."""
    return [max(1, (c * max_threads) // reference) for c in caps]
