import json

import pytest

from disambig.exceptions import DataError
from disambig.records import (MENTION_FIELDS, load_labels, load_mentions, normalize_name,
                              write_mentions)

HEADER = ",".join(MENTION_FIELDS)


def write(tmp_path, lines, name="m.csv"):
    p = tmp_path / name
    p.write_text("\n".join(lines) + "\n")
    return p


def row(mid, first="John", last="Doe", order=1, count=2, patent="P1", title="Fast widget"):
    return f"{mid},{patent},{first},,{last},,{order},{count},Austin,TX,US,Acme Inc,G06,G06/12,{title}"


def test_initial_is_normalized(tmp_path):
    p = write(tmp_path, [HEADER, row("m1", first="J.")])
    (m,) = load_mentions(p)
    assert m.first_name == "j"


def test_order_beyond_count_is_rejected(tmp_path):
    p = write(tmp_path, [HEADER, row("m1", order=3, count=2)])
    with pytest.raises(DataError, match=r"row 2.*inventor_order"):
        load_mentions(p)


def test_two_rows(tmp_path):
    p = write(tmp_path, [HEADER, row("m1"), row("m2", first="Jane", order=2)])
    ms = load_mentions(p)
    assert [m.mention_id for m in ms] == ["m1", "m2"]
    assert ms[0].coinventor_last_names == ("doe",)
    assert ms[0].title_terms == ("fast", "widget")
    assert ms[0].assignee_name == "acme inc"


def test_duplicate_id(tmp_path):
    p = write(tmp_path, [HEADER, row("m1"), row("m1")])
    with pytest.raises(DataError, match="duplicate"):
        load_mentions(p)


def test_bad_integer_names_row_and_field(tmp_path):
    p = write(tmp_path, [HEADER, row("m1"), row("m2").replace(",1,2,", ",x,2,")])
    with pytest.raises(DataError, match=r"row 3: field 'inventor_order'"):
        load_mentions(p)


def test_missing_column(tmp_path):
    p = write(tmp_path, ["mention_id,patent_id", "m1,P1"])
    with pytest.raises(DataError, match="header"):
        load_mentions(p)


def test_empty_last_name(tmp_path):
    p = write(tmp_path, [HEADER, row("m1", last=" . ")])
    with pytest.raises(DataError, match="last_name"):
        load_mentions(p)


def test_jsonl(tmp_path):
    rec = dict(zip(MENTION_FIELDS, ["m1", "P1", "Ann", "B", "Lee", "", 1, 1, "", "", "",
                                    "", "", "", "Optical fiber-amplifier"]))
    p = tmp_path / "m.jsonl"
    p.write_text(json.dumps(rec) + "\n\n")
    (m,) = load_mentions(p)
    assert (m.first_name, m.middle_name, m.last_name) == ("ann", "b", "lee")
    assert m.title_terms == ("optical", "fiber", "amplifier")


def test_jsonl_bad_line(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text("{not json\n")
    with pytest.raises(DataError, match="row 1"):
        load_mentions(p, "jsonl")


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_round_trip(tmp_path, fmt):
    p = write(tmp_path, [HEADER, row("m1", first="J."), row("m2", first="Mary-Ann", order=2),
                         row("m3", patent="P2", count=1, title="\"A/B testing, v2\"")])
    first = load_mentions(p)
    out = tmp_path / f"out.{fmt}"
    write_mentions(out, first, fmt)
    assert load_mentions(out, fmt) == first


@pytest.mark.parametrize("raw", ["J.", "  John ", "JOHN.", "", "o'hara", "Jr."])
def test_normalize_idempotent(raw):
    once = normalize_name(raw)
    assert normalize_name(once) == once


def test_labels(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("mention_id,cluster_id\nm1,c1\nm2,c1\nm3,c2\n")
    clusters = {c.cluster_id: set(c.member_ids) for c in load_labels(p)}
    assert clusters == {"c1": {"m1", "m2"}, "c2": {"m3"}}


def test_labels_conflict(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("mention_id,cluster_id\nm1,c1\nm1,c2\n")
    with pytest.raises(DataError, match="m1"):
        load_labels(p)


def test_labels_empty(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("")
    assert load_labels(p) == []
    p.write_text("mention_id,cluster_id\n")
    assert load_labels(p) == []
