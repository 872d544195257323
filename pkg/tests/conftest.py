import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from disambig.records import Mention, attach_coinventors  # noqa: E402
from disambig.synth import SynthConfig, generate, write_corpus  # noqa: E402


def mention(mention_id, first="john", last="doe", **kw):
    fields = dict(
        mention_id=mention_id, patent_id=kw.pop("patent_id", "P" + mention_id),
        first_name=first, middle_name=kw.pop("middle", ""), last_name=last,
        suffix=kw.pop("suffix", ""), inventor_order=kw.pop("order", 1),
        inventor_count=kw.pop("count", 1),
    )
    fields.update(kw)
    return Mention(**fields)


@pytest.fixture
def make_mention():
    return mention


def small_corpus(tmp_path, seed=0, n_persons=60, **kw):
    rows, labels = generate(SynthConfig(n_persons=n_persons, seed=seed, **kw))
    mpath, lpath = tmp_path / f"m{seed}.csv", tmp_path / f"l{seed}.csv"
    write_corpus(rows, labels, mpath, lpath)
    return mpath, lpath


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("corpus")


@pytest.fixture(scope="session")
def trained(corpus_dir):
    """A small corpus and a 20-tree model trained on it."""
    from disambig.pipeline import Disambiguator
    from disambig.records import load_labels, load_mentions

    mpath, lpath = small_corpus(corpus_dir, seed=11, n_persons=80)
    mentions = load_mentions(mpath)
    labels = load_labels(lpath)
    est = Disambiguator(n_estimators=20, random_state=3).fit(mentions, labels)
    return mentions, labels, est


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
