"""Synthetic labeled inventor corpora with controllable name corruption.

Each synthetic person belongs to an organization (employer, technology
field, site, title vocabulary) and collaborates with a few colleagues from
it.  Patents are generated per lead inventor with some of those colleagues,
and every inventor on a patent yields one mention.  Mentions are then corrupted independently: first names
cut to an initial, middle names dropped, single-character typos, and
swapped first/last names.  The person index is the ground-truth label.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .records import MENTION_FIELDS

FIRST_NAMES = (
    "james john robert michael william david richard joseph thomas charles "
    "christopher daniel matthew anthony mark donald steven paul andrew joshua "
    "kenneth kevin brian george timothy ronald edward jason jeffrey ryan "
    "mary patricia jennifer linda elizabeth barbara susan jessica sarah karen "
    "lisa nancy betty margaret sandra ashley kimberly emily donna michelle "
    "wei jun hiroshi takashi yuki akira sanjay rajesh priya anil "
    "hans klaus jurgen stefan olga ivan pierre jean marco giulia"
).split()

LAST_NAMES = (
    "smith johnson williams brown jones garcia miller davis rodriguez martinez "
    "hernandez lopez gonzalez wilson anderson thomas taylor moore jackson martin "
    "lee perez thompson white harris sanchez clark ramirez lewis robinson "
    "wang li zhang liu chen yang huang zhao wu zhou "
    "tanaka suzuki sato watanabe kumar sharma patel singh mueller schmidt"
).split()

CITIES = (
    ("san jose", "ca", "us"), ("palo alto", "ca", "us"), ("austin", "tx", "us"),
    ("boston", "ma", "us"), ("seattle", "wa", "us"), ("rochester", "ny", "us"),
    ("armonk", "ny", "us"), ("portland", "or", "us"), ("raleigh", "nc", "us"),
    ("tokyo", "", "jp"), ("osaka", "", "jp"), ("munich", "", "de"),
    ("berlin", "", "de"), ("haifa", "", "il"), ("tel aviv", "", "il"),
    ("bangalore", "", "in"), ("beijing", "", "cn"), ("shanghai", "", "cn"),
    ("toronto", "on", "ca"), ("paris", "", "fr"), ("eindhoven", "", "nl"),
    ("seoul", "", "kr"), ("cambridge", "", "gb"), ("zurich", "", "ch"),
)

ASSIGNEES = (
    "international business machines", "intel corporation", "apple inc",
    "microsoft corporation", "google llc", "qualcomm incorporated",
    "samsung electronics", "sony corporation", "siemens aktiengesellschaft",
    "general electric company", "hewlett packard", "texas instruments",
    "cisco technology", "oracle international", "nokia technologies",
    "canon kabushiki kaisha", "philips", "medtronic", "pfizer", "3m innovative",
    "boeing company", "honeywell international", "xerox corporation", "amgen",
)

VOCAB = (
    "semiconductor wafer etching lithography transistor gate oxide memory cell "
    "cache processor pipeline branch predictor instruction decoder network "
    "packet router switch optical fiber laser amplifier antenna wireless "
    "channel modulation encoder decoder video image sensor pixel display "
    "panel liquid crystal battery electrode lithium polymer catalyst reactor "
    "polymerization compound pharmaceutical composition antibody protein "
    "peptide vaccine stent catheter implant valve engine turbine blade "
    "combustion fuel injector vehicle brake steering suspension printer toner "
    "cartridge paper sheet feeder database query index storage file server "
    "client authentication encryption key certificate voltage regulator "
    "converter inductor capacitor resistor circuit clock signal"
).split()

TITLE_FILLERS = ("method", "system", "apparatus", "for", "of", "and", "the", "with", "using")


@dataclass
class SynthConfig:
    n_persons: int = 200
    mean_patents: float = 3.0
    max_coinventors: int = 2
    initial_rate: float = 0.15
    middle_drop_rate: float = 0.2
    typo_rate: float = 0.03
    swap_rate: float = 0.01
    move_rate: float = 0.1
    surname_pool: int = 50
    seed: int = 0

    def validate(self):
        if self.n_persons < 1:
            raise ValueError("n_persons must be >= 1")
        if self.mean_patents < 1:
            raise ValueError("mean_patents must be >= 1")
        if self.max_coinventors < 0:
            raise ValueError("max_coinventors must be >= 0")
        for name in ("initial_rate", "middle_drop_rate", "typo_rate", "swap_rate", "move_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not 1 <= self.surname_pool <= len(LAST_NAMES):
            raise ValueError(f"surname_pool must lie in 1..{len(LAST_NAMES)}")


@dataclass
class _Person:
    index: int
    first: str
    middle: str
    last: str
    suffix: str
    home: tuple
    alt_home: tuple
    assignee: str
    group: str
    subgroup: str
    topics: list
    collaborators: list = field(default_factory=list)


def _make_people(cfg, rng):
    surnames = LAST_NAMES[:cfg.surname_pool]
    # Zipf-like surname frequencies so a few surnames are very common
    weights = 1.0 / np.arange(1, len(surnames) + 1) ** 0.8
    weights /= weights.sum()
    # organizations: an employer, a technology field and a site; people
    # collaborate inside their organization
    n_orgs = max(1, cfg.n_persons // 5)
    orgs = []
    for _ in range(n_orgs):
        field_no = int(rng.integers(0, 8))
        orgs.append((
            ASSIGNEES[int(rng.integers(len(ASSIGNEES)))],
            f"H{field_no:02d}",
            CITIES[int(rng.integers(len(CITIES)))],
            [str(w) for w in rng.choice(VOCAB, size=10, replace=False)],
        ))
    people = []
    members = {}
    for i in range(cfg.n_persons):
        org_no = int(rng.integers(n_orgs))
        assignee, group, site, vocab = orgs[org_no]
        members.setdefault(org_no, []).append(i)
        r = rng.random()
        if r < 0.5:
            middle = chr(ord("a") + int(rng.integers(0, 26)))
        elif r < 0.75:
            middle = str(rng.choice(FIRST_NAMES))
        else:
            middle = ""
        people.append(_Person(
            index=i,
            first=str(rng.choice(FIRST_NAMES)),
            middle=middle,
            last=str(surnames[rng.choice(len(surnames), p=weights)]),
            suffix="jr" if rng.random() < 0.03 else "",
            home=site,
            alt_home=CITIES[int(rng.integers(len(CITIES)))],
            assignee=assignee,
            group=group,
            subgroup=f"{group}/{int(rng.integers(1, 40)):02d}",
            topics=[str(w) for w in rng.choice(vocab, size=6, replace=False)],
        ))
    for org_no, ids in members.items():
        for i in ids:
            others = [q for q in ids if q != i]
            k = min(3, len(others))
            if k:
                people[i].collaborators = sorted(int(q) for q in rng.choice(others, size=k, replace=False))
    return people


def _typo(name, rng):
    if len(name) < 3:
        return name
    letters = "abcdefghijklmnopqrstuvwxyz"
    pos = int(rng.integers(1, len(name)))
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return name[:pos] + letters[int(rng.integers(26))] + name[pos + 1:]
    if kind == 1:
        return name[:pos] + letters[int(rng.integers(26))] + name[pos:]
    if kind == 2:
        return name[:pos] + name[pos + 1:]
    if pos < len(name) - 1:
        return name[:pos] + name[pos + 1] + name[pos] + name[pos + 2:]
    return name[:pos - 1] + name[pos] + name[pos - 1]


def _display(name):
    if len(name) == 1:
        return name.upper() + "."
    return name.title()


def generate(cfg):
    """Return ``(rows, labels)``: raw mention rows and ``(mention_id, person_id)`` pairs."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    people = _make_people(cfg, rng)
    rows, labels = [], []
    patent_no = 0
    for lead in people:
        n_patents = 1 + int(rng.poisson(cfg.mean_patents - 1))
        for _ in range(n_patents):
            patent_no += 1
            k = int(rng.integers(0, cfg.max_coinventors + 1)) if lead.collaborators else 0
            k = min(k, len(lead.collaborators))
            team = [lead] + [people[q] for q in sorted(rng.choice(lead.collaborators, size=k, replace=False))]
            words = list(rng.choice(lead.topics, size=int(rng.integers(2, 5)), replace=False))
            words.insert(int(rng.integers(0, len(words) + 1)), str(rng.choice(TITLE_FILLERS)))
            title = " ".join(words).capitalize()
            for order, person in enumerate(team, start=1):
                mid = f"M{len(rows) + 1:06d}"
                first, middle, last = person.first, person.middle, person.last
                if rng.random() < cfg.initial_rate:
                    first = first[0]
                if rng.random() < cfg.middle_drop_rate:
                    middle = ""
                if rng.random() < cfg.typo_rate:
                    if rng.random() < 0.5:
                        last = _typo(last, rng)
                    else:
                        first = _typo(first, rng)
                if rng.random() < cfg.swap_rate:
                    first, last = last, first
                home = person.alt_home if rng.random() < cfg.move_rate else person.home
                rows.append({
                    "mention_id": mid,
                    "patent_id": f"P{patent_no:07d}",
                    "first_name": _display(first),
                    "middle_name": _display(middle) if middle else "",
                    "last_name": _display(last),
                    "suffix": person.suffix.title() + ("." if person.suffix else ""),
                    "inventor_order": order,
                    "inventor_count": len(team),
                    "city": home[0].title(),
                    "state": home[1].upper(),
                    "country": home[2].upper(),
                    "assignee": lead.assignee.title(),
                    "group": lead.group,
                    "subgroup": lead.subgroup,
                    "title": title,
                })
                labels.append((mid, f"person-{person.index:05d}"))
    return rows, labels


def write_corpus(rows, labels, mentions_path, labels_path):
    if str(mentions_path).endswith(".jsonl"):
        with open(mentions_path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    else:
        with open(mentions_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=MENTION_FIELDS, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    with open(labels_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("mention_id", "cluster_id"))
        w.writerows(labels)
