import subprocess
import sys

import pytest

from disambig.cli import EXIT_DATA, EXIT_MODEL, EXIT_OK, EXIT_USAGE, main, read_clusters


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["synth", "--mentions", str(d / "m.csv"), "--labels", str(d / "l.csv"),
                 "--persons", "60", "--seed", "4"]) == EXIT_OK
    assert main(["train", "--mentions", str(d / "m.csv"), "--labels", str(d / "l.csv"),
                 "--model", str(d / "model.bin"), "--trees", "10", "--seed", "1",
                 "--pairs-out", str(d / "pairs.csv")]) == EXIT_OK
    return d


def test_full_flow(workdir, capsys):
    d = workdir
    assert (d / "model.bin.report.txt").read_text().startswith("# training report")
    assert (d / "pairs.csv").read_text().startswith("a_id,b_id,label\n")
    assert main(["disambiguate", "--mentions", str(d / "m.csv"), "--model", str(d / "model.bin"),
                 "--out", str(d / "c.csv")]) == EXIT_OK
    clusters = read_clusters(d / "c.csv")
    assert list(clusters) == sorted(clusters)
    assert main(["evaluate", "--clusters", str(d / "c.csv"), "--labels", str(d / "l.csv"),
                 "--out", str(d / "eval")]) == EXIT_OK
    assert "f1" in capsys.readouterr().out
    assert (d / "eval.metrics.csv").read_text().startswith("metric,value\n")
    assert (d / "eval.histogram.csv").read_text().startswith("size,count\n")
    assert main(["importance", "--model", str(d / "model.bin")]) == EXIT_OK
    assert "Top 10" in capsys.readouterr().out


def test_training_is_byte_identical(workdir):
    d = workdir
    assert main(["train", "--mentions", str(d / "m.csv"), "--labels", str(d / "l.csv"),
                 "--model", str(d / "again.bin"), "--trees", "10", "--seed", "1"]) == EXIT_OK
    assert (d / "again.bin").read_bytes() == (d / "model.bin").read_bytes()


def test_config_precedence(workdir):
    d = workdir
    (d / "run.conf").write_text(
        f"# settings\nmentions = {d / 'm.csv'}\nlabels={d / 'l.csv'}\n"
        f"model={d / 'conf.bin'}\ntrees=3\nseed=1\n")
    assert main(["train", "--config", str(d / "run.conf")]) == EXIT_OK
    from disambig.modelio import load
    assert len(load(d / "conf.bin")[0].estimators_) == 3
    assert main(["train", "--config", str(d / "run.conf"), "--trees", "10"]) == EXIT_OK
    assert (d / "conf.bin").read_bytes() == (d / "model.bin").read_bytes()


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["evaluate", "--labels", "l.csv"], ["train", "--trees", "many"],
    ["disambiguate", "--block", "LN(f)"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE


def test_bad_config_key(tmp_path):
    (tmp_path / "bad.conf").write_text("colour=blue\n")
    assert main(["train", "--config", str(tmp_path / "bad.conf")]) == EXIT_USAGE


def test_data_errors(workdir, tmp_path):
    d = workdir
    (tmp_path / "broken.csv").write_text("mention_id,patent_id\nx,y\n")
    assert main(["disambiguate", "--mentions", str(tmp_path / "broken.csv"),
                 "--model", str(d / "model.bin"), "--out", str(tmp_path / "c.csv")]) == EXIT_DATA
    assert main(["train", "--mentions", str(tmp_path / "missing.csv"), "--labels",
                 str(d / "l.csv"), "--model", str(tmp_path / "x.bin")]) == EXIT_DATA


def test_model_errors(workdir, tmp_path):
    d = workdir
    (tmp_path / "junk.bin").write_bytes(b"not a model at all, just bytes")
    assert main(["importance", "--model", str(tmp_path / "junk.bin")]) == EXIT_MODEL
    data = bytearray((d / "model.bin").read_bytes())
    data[8] = 9  # major version
    (tmp_path / "v9.bin").write_bytes(bytes(data))
    assert main(["disambiguate", "--mentions", str(d / "m.csv"), "--model",
                 str(tmp_path / "v9.bin"), "--out", str(tmp_path / "c.csv")]) == EXIT_MODEL
    assert main(["importance", "--model", str(tmp_path / "absent.bin")]) == EXIT_MODEL


def test_module_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "disambig", "importance", "--model",
                           str(workdir / "model.bin")], capture_output=True, text=True)
    assert proc.returncode == 0 and "Top 10" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "disambig", "train"], capture_output=True,
                          text=True)
    assert proc.returncode == EXIT_USAGE and "--mentions" in proc.stderr
