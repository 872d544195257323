"""Mention records, ground-truth clusters and their file formats."""

import csv
import json
import re
from collections import defaultdict
from dataclasses import dataclass, field

from .exceptions import DataError

MENTION_FIELDS = (
    "mention_id", "patent_id", "first_name", "middle_name", "last_name",
    "suffix", "inventor_order", "inventor_count", "city", "state", "country",
    "assignee", "group", "subgroup", "title",
)
LABEL_FIELDS = ("mention_id", "cluster_id")

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def normalize_name(value):
    """Case-fold a name part and strip surrounding whitespace and trailing periods.

    A result of a single character is an initial; it needs no further marking
    because every comparison treats one-character names as initials.
    """
    return value.strip().casefold().rstrip(".").strip()


def normalize_text(value):
    return value.strip().casefold()


def tokenize_title(title):
    return tuple(t for t in _TOKEN_SPLIT.split(title.casefold()) if t)


@dataclass(frozen=True)
class Mention:
    """One inventor appearance on one patent."""

    mention_id: str
    patent_id: str
    first_name: str
    middle_name: str
    last_name: str
    suffix: str
    inventor_order: int
    inventor_count: int
    city: str = ""
    state: str = ""
    country: str = ""
    assignee_name: str = ""
    group: str = ""
    subgroup: str = ""
    title_terms: tuple = ()
    coinventor_last_names: tuple = ()

    def __post_init__(self):
        if not self.last_name:
            raise ValueError(f"mention {self.mention_id!r}: last_name is empty")
        if not 1 <= self.inventor_order <= self.inventor_count:
            raise ValueError(
                f"mention {self.mention_id!r}: inventor_order {self.inventor_order} "
                f"outside 1..{self.inventor_count}")


@dataclass(frozen=True)
class LabeledCluster:
    cluster_id: str
    member_ids: frozenset = field(default_factory=frozenset)


def _int_field(row, name, lineno):
    raw = row.get(name)
    try:
        return int(str(raw).strip())
    except (TypeError, ValueError):
        raise DataError(f"row {lineno}: field {name!r} is not an integer: {raw!r}") from None


def _str_field(row, name, lineno):
    raw = row.get(name, "")
    if raw is None:
        return ""
    if not isinstance(raw, str):
        raise DataError(f"row {lineno}: field {name!r} must be a string, got {raw!r}")
    return raw


def _row_to_kwargs(row, lineno):
    missing = [f for f in MENTION_FIELDS if f not in row]
    if missing:
        raise DataError(f"row {lineno}: missing field(s) {', '.join(missing)}")
    kw = dict(
        mention_id=_str_field(row, "mention_id", lineno).strip(),
        patent_id=_str_field(row, "patent_id", lineno).strip(),
        first_name=normalize_name(_str_field(row, "first_name", lineno)),
        middle_name=normalize_name(_str_field(row, "middle_name", lineno)),
        last_name=normalize_name(_str_field(row, "last_name", lineno)),
        suffix=normalize_name(_str_field(row, "suffix", lineno)),
        inventor_order=_int_field(row, "inventor_order", lineno),
        inventor_count=_int_field(row, "inventor_count", lineno),
        city=normalize_text(_str_field(row, "city", lineno)),
        state=normalize_text(_str_field(row, "state", lineno)),
        country=normalize_text(_str_field(row, "country", lineno)),
        assignee_name=normalize_text(_str_field(row, "assignee", lineno)),
        group=_str_field(row, "group", lineno).strip(),
        subgroup=_str_field(row, "subgroup", lineno).strip(),
        title_terms=tokenize_title(_str_field(row, "title", lineno)),
    )
    if not kw["mention_id"]:
        raise DataError(f"row {lineno}: field 'mention_id' is empty")
    if not kw["last_name"]:
        raise DataError(f"row {lineno}: field 'last_name' is empty after normalization")
    if not 1 <= kw["inventor_order"] <= kw["inventor_count"]:
        raise DataError(
            f"row {lineno}: field 'inventor_order' ({kw['inventor_order']}) must lie in "
            f"1..inventor_count ({kw['inventor_count']})")
    return kw


def _iter_rows(path, fmt):
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [f for f in MENTION_FIELDS if f not in header]
            if missing:
                raise DataError(f"{path}: header lacks column(s) {', '.join(missing)}")
            # row 1 is the header
            for lineno, row in enumerate(reader, start=2):
                if None in row:
                    raise DataError(f"row {lineno}: more values than header columns")
                yield lineno, row
    elif fmt == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"row {lineno}: invalid JSON ({exc.msg})") from None
                if not isinstance(row, dict):
                    raise DataError(f"row {lineno}: expected a JSON object")
                yield lineno, row
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'jsonl'")


def guess_format(path):
    return "jsonl" if str(path).endswith((".jsonl", ".ndjson", ".json")) else "csv"


def load_mentions(path, format=None):
    """Read mentions from a CSV or JSONL file.

    Co-inventor last names are filled in from the other mentions sharing a
    ``patent_id``, so every mention is self-contained afterwards.

    Raises
    ------
    DataError
        On a malformed row (the message names the row number and field) or a
        duplicate ``mention_id``.
    """
    fmt = format or guess_format(path)
    rows = []
    seen = {}
    for lineno, row in _iter_rows(path, fmt):
        kw = _row_to_kwargs(row, lineno)
        if kw["mention_id"] in seen:
            raise DataError(
                f"row {lineno}: duplicate mention_id {kw['mention_id']!r} "
                f"(first seen at row {seen[kw['mention_id']]})")
        seen[kw["mention_id"]] = lineno
        rows.append(kw)
    return attach_coinventors(rows)


def attach_coinventors(rows):
    """Build Mention objects from keyword dicts, deriving co-inventor names by patent."""
    by_patent = defaultdict(list)
    for kw in rows:
        by_patent[kw["patent_id"]].append((kw["mention_id"], kw["last_name"]))
    mentions = []
    for kw in rows:
        others = sorted(ln for mid, ln in by_patent[kw["patent_id"]] if mid != kw["mention_id"])
        mentions.append(Mention(coinventor_last_names=tuple(others), **kw))
    return mentions


def mention_to_row(m):
    return {
        "mention_id": m.mention_id,
        "patent_id": m.patent_id,
        "first_name": m.first_name,
        "middle_name": m.middle_name,
        "last_name": m.last_name,
        "suffix": m.suffix,
        "inventor_order": m.inventor_order,
        "inventor_count": m.inventor_count,
        "city": m.city,
        "state": m.state,
        "country": m.country,
        "assignee": m.assignee_name,
        "group": m.group,
        "subgroup": m.subgroup,
        "title": " ".join(m.title_terms),
    }


def write_mentions(path, mentions, format=None):
    fmt = format or guess_format(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if fmt == "csv":
            writer = csv.DictWriter(fh, fieldnames=MENTION_FIELDS, lineterminator="\n")
            writer.writeheader()
            for m in mentions:
                writer.writerow(mention_to_row(m))
        elif fmt == "jsonl":
            for m in mentions:
                fh.write(json.dumps(mention_to_row(m), sort_keys=True) + "\n")
        else:
            raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'jsonl'")


def load_labels(path):
    """Read a ``mention_id,cluster_id`` CSV into disjoint clusters.

    Clusters keep the order in which their ids first appear.
    """
    groups = {}
    owner = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return []
        missing = [f for f in LABEL_FIELDS if f not in reader.fieldnames]
        if missing:
            raise DataError(f"{path}: header lacks column(s) {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            mid = (row["mention_id"] or "").strip()
            cid = (row["cluster_id"] or "").strip()
            if not mid or not cid:
                raise DataError(f"row {lineno}: empty mention_id or cluster_id")
            prev = owner.get(mid)
            if prev is not None and prev != cid:
                raise DataError(
                    f"row {lineno}: mention_id {mid!r} labeled with both "
                    f"{prev!r} and {cid!r}")
            owner[mid] = cid
            groups.setdefault(cid, set()).add(mid)
    return [LabeledCluster(cid, frozenset(ids)) for cid, ids in groups.items()]


def write_labels(path, clusters):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LABEL_FIELDS)
        for c in clusters:
            for mid in sorted(c.member_ids):
                writer.writerow((mid, c.cluster_id))


def check_labels(labels, mentions):
    """Ensure every labeled id resolves to a known mention."""
    known = {m.mention_id for m in mentions}
    unknown = sorted(mid for c in labels for mid in c.member_ids if mid not in known)
    if unknown:
        shown = ", ".join(unknown[:10])
        raise DataError(f"{len(unknown)} labeled mention id(s) not in the mention set: {shown}")
