"""String comparison primitives: tiered name match, Jaro, Jaro-Winkler, Soundex, IDF."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType

logger = logging.getLogger(__name__)

WINKLER_SCALE = 0.1
WINKLER_MAX_PREFIX = 4


def tiered_exact(a, b):
    """Four-level name agreement score.

    3: both full names and equal; 0: both full names and different;
    2: not both full and the initials agree; 1: not both full and the
    initials differ.  A one-character name is an initial.  An empty side
    scores 1.
    """
    if not a or not b:
        return 1
    if len(a) > 1 and len(b) > 1:
        return 3 if a == b else 0
    return 2 if a[0] == b[0] else 1


def jaro(s1, s2):
    len1, len2 = len(s1), len(s2)
    if len1 == 0 and len2 == 0:
        return 1.0
    if len1 == 0 or len2 == 0:
        return 0.0
    window = max(max(len1, len2) // 2 - 1, 0)

    flags2 = [False] * len2
    matched1 = []
    for i, ch in enumerate(s1):
        lo = max(0, i - window)
        hi = min(len2, i + window + 1)
        for j in range(lo, hi):
            if not flags2[j] and s2[j] == ch:
                flags2[j] = True
                matched1.append(ch)
                break
    n_m = len(matched1)
    if n_m == 0:
        return 0.0
    matched2 = [s2[j] for j in range(len2) if flags2[j]]
    n_t = sum(c1 != c2 for c1, c2 in zip(matched1, matched2))
    return (n_m / len1 + n_m / len2 + (n_m - n_t / 2) / n_m) / 3


def common_prefix(s1, s2, limit=WINKLER_MAX_PREFIX):
    n = 0
    for c1, c2 in zip(s1[:limit], s2[:limit]):
        if c1 != c2:
            break
        n += 1
    return n


def jaro_winkler(s1, s2, p=WINKLER_SCALE):
    d = jaro(s1, s2)
    return d + common_prefix(s1, s2) * p * (1.0 - d)


_SOUNDEX_CODES = {}
for _digit, _letters in enumerate(("bfpv", "cgjkqsxz", "dt", "l", "mn", "r"), start=1):
    for _ch in _letters:
        _SOUNDEX_CODES[_ch] = str(_digit)


def soundex(s):
    """American Soundex code, e.g. ``robert`` -> ``R163``.

    Non-letters are ignored.  ``h`` and ``w`` do not separate equal codes;
    vowels (and ``y``) do.  Input without letters yields ``"0000"``.
    """
    letters = [c for c in s.casefold() if "a" <= c <= "z"]
    if not letters:
        return "0000"
    first = letters[0]
    code = [first.upper()]
    prev = _SOUNDEX_CODES.get(first, "")
    for c in letters[1:]:
        digit = _SOUNDEX_CODES.get(c)
        if digit is None:
            if c not in "hw":
                prev = ""
            continue
        if digit != prev:
            code.append(digit)
            if len(code) == 4:
                break
        prev = digit
    return "".join(code).ljust(4, "0")


def soundex_equal(a, b):
    return int(soundex(a) == soundex(b))


@dataclass(frozen=True)
class NameIdfTable:
    """Record counts per name, for ``total / count`` rarity weights."""

    total_records: int
    name_counts: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        counts = dict(self.name_counts)
        if any(c < 1 for c in counts.values()):
            raise ValueError("name counts must be >= 1")
        if counts and self.total_records < max(counts.values()):
            raise ValueError("total_records smaller than an individual name count")
        if self.total_records < 1:
            raise ValueError("total_records must be >= 1")
        object.__setattr__(self, "name_counts", MappingProxyType(counts))

    @classmethod
    def from_names(cls, names):
        names = list(names)
        return cls(max(len(names), 1), Counter(n for n in names if n))

    def idf(self, name):
        return idf(name, self)


def idf(name, table):
    count = table.name_counts.get(name)
    if count is None:
        logger.debug("name %r absent from IDF table; treating as unique", name)
        count = 1
    return table.total_records / count


def jaccard(a, b):
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)
