"""Command line entry point: ``disambig train|disambiguate|evaluate|synth|importance``.

Settings resolve as command-line flag, then ``--config`` file entry
(``key=value`` lines, keys named like the long flags with dashes or
underscores), then the built-in default.

Exit codes: 0 success, 1 usage, 2 data error, 3 model error.
"""

import argparse
import csv
import logging
import sys

from . import modelio
from .blocking import BlockingKeySpec, scale_caps
from .cluster import DbscanParams
from .evaluation import (cluster_size_histogram, format_report, pairwise_metrics,
                         write_histogram_csv, write_metrics_csv)
from .exceptions import DataError, DisambigError
from .features import FEATURE_ORDER_ID, PairFeaturizer, read_stop_words
from .pipeline import BlockScheduler, Disambiguator, disambiguate, importance_table, training_report
from .records import check_labels, load_labels, load_mentions
from .sampler import write_pairs
from .synth import SynthConfig, generate, write_corpus

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 0, 1, 2, 3

logger = logging.getLogger("disambig")


def _ints(text):
    return tuple(int(t) for t in str(text).split(",") if t.strip())


def _spec(text):
    BlockingKeySpec.parse(text)
    return text


# name -> (converter, default)
SETTINGS = {
    "mentions": (str, None),
    "labels": (str, None),
    "model": (str, None),
    "out": (str, None),
    "clusters": (str, None),
    "format": (str, None),
    "block": (_spec, "FN(1)+LN(f)"),
    "coarse_block": (_spec, "FN(1)+LN(3)"),
    "trees": (int, 100),
    "mtry": (int, 5),
    "min_leaf": (int, 1),
    "neg_ratio": (float, 1.0),
    "eps": (float, 0.5),
    "min_pts": (int, 2),
    "seed": (int, 0),
    "max_threads": (int, None),
    "thresholds": (_ints, (500, 5000)),
    "caps": (_ints, (24, 12, 6)),
    "cache_cap": (int, 5000),
    "backend": (str, "thread"),
    "stopwords": (str, None),
    "pairs_out": (str, None),
    "persons": (int, 200),
    "mean_patents": (float, 3.0),
    "max_coinventors": (int, 2),
    "initial_rate": (float, 0.15),
    "middle_drop_rate": (float, 0.2),
    "typo_rate": (float, 0.03),
    "swap_rate": (float, 0.01),
    "move_rate": (float, 0.1),
    "surname_pool": (int, 50),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add(p, *names, **kw):
    p.add_argument(*names, default=None, **kw)


def build_parser():
    parser = _Parser(prog="disambig", description="Inventor name disambiguation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    _add(common, "--config", help="key=value settings file")
    _add(common, "--seed", help="root seed for every randomized stage")
    _add(common, "--stopwords", help="title stop-word file, one word per line")

    t = sub.add_parser("train", parents=[common], help="train the pairwise linkage forest")
    _add(t, "--mentions")
    _add(t, "--labels")
    _add(t, "--model", help="model file to write")
    _add(t, "--out", help="training report path (default: MODEL.report.txt)")
    _add(t, "--coarse-block", help="negative-sampling block spec, e.g. 'FN(1)+LN(3)'")
    _add(t, "--trees")
    _add(t, "--mtry")
    _add(t, "--min-leaf")
    _add(t, "--neg-ratio", help="max negative pairs per positive pair")
    _add(t, "--pairs-out", help="also write sampled pairs as CSV")
    _add(t, "--format", choices=("csv", "jsonl"))

    d = sub.add_parser("disambiguate", parents=[common], help="cluster mentions into persons")
    _add(d, "--mentions")
    _add(d, "--model")
    _add(d, "--out", help="clusters CSV to write")
    _add(d, "--block", help="blocking spec, e.g. 'FN(1)+LN(f)'")
    _add(d, "--eps")
    _add(d, "--min-pts")
    _add(d, "--max-threads")
    _add(d, "--thresholds", help="ascending block-size thresholds, e.g. 500,5000")
    _add(d, "--caps", help="concurrency cap per size group, e.g. 24,12,6")
    _add(d, "--cache-cap")
    _add(d, "--backend", choices=("thread", "process"))
    _add(d, "--format", choices=("csv", "jsonl"))

    e = sub.add_parser("evaluate", parents=[common], help="pairwise precision/recall/F1")
    _add(e, "--clusters", help="clusters CSV from 'disambiguate'")
    _add(e, "--labels")
    _add(e, "--out", help="prefix for OUT.metrics.csv and OUT.histogram.csv")

    s = sub.add_parser("synth", parents=[common], help="write a synthetic labeled corpus")
    _add(s, "--mentions", help="mentions file to write (.csv or .jsonl)")
    _add(s, "--labels", help="labels CSV to write")
    _add(s, "--persons")
    _add(s, "--mean-patents")
    _add(s, "--max-coinventors")
    _add(s, "--initial-rate")
    _add(s, "--middle-drop-rate")
    _add(s, "--typo-rate")
    _add(s, "--swap-rate")
    _add(s, "--move-rate")
    _add(s, "--surname-pool")

    i = sub.add_parser("importance", parents=[common], help="print top Gini importances")
    _add(i, "--model")
    return parser


def read_config(path):
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc.strerror}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in SETTINGS:
                raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
            out[key] = value
    return out


def resolve(args):
    """Merge flags, config file and defaults into one settings dict."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    settings = {}
    for key, (conv, default) in SETTINGS.items():
        value = getattr(args, key, None)
        if value is None:
            value = config.get(key)
        if value is None:
            settings[key] = default
            continue
        try:
            settings[key] = conv(value)
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {exc}") from None
    return settings


def _need(settings, *keys):
    missing = [k for k in keys if not settings.get(k)]
    if missing:
        raise UsageError("missing required setting(s): "
                         + ", ".join("--" + k.replace("_", "-") for k in missing))


def _stop_words(settings):
    return read_stop_words(settings["stopwords"]) if settings["stopwords"] else None


def cmd_train(settings):
    _need(settings, "mentions", "labels", "model")
    mentions = load_mentions(settings["mentions"], settings["format"])
    labels = load_labels(settings["labels"])
    check_labels(labels, mentions)
    est = Disambiguator(coarse_block=settings["coarse_block"], n_estimators=settings["trees"],
                        max_features=settings["mtry"], min_samples_leaf=settings["min_leaf"],
                        max_neg_per_pos=settings["neg_ratio"], stop_words=_stop_words(settings),
                        random_state=settings["seed"])
    try:
        est.fit(mentions, labels)
    except DisambigError:
        raise
    except ValueError as exc:
        raise DataError(f"training: {exc}") from None
    modelio.save(est.forest_, settings["model"], FEATURE_ORDER_ID)
    if settings["pairs_out"]:
        write_pairs(settings["pairs_out"], est.training_pairs_)
    report = training_report(est.forest_, est.n_positive_, est.n_negative_)
    with open(settings["out"] or settings["model"] + ".report.txt", "w", encoding="utf-8") as fh:
        fh.write(report)
    print(report, end="")
    return EXIT_OK


def write_clusters(path, assignment):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("mention_id", "cluster_id"))
        for mid in sorted(assignment):
            w.writerow((mid, assignment[mid]))


def read_clusters(path):
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"mention_id", "cluster_id"} <= set(reader.fieldnames):
            raise DataError(f"{path}: expected header mention_id,cluster_id")
        for lineno, row in enumerate(reader, start=2):
            if row["mention_id"] in out:
                raise DataError(f"row {lineno}: duplicate mention_id {row['mention_id']!r}")
            out[row["mention_id"]] = row["cluster_id"]
    return out


def cmd_disambiguate(settings):
    _need(settings, "mentions", "model", "out")
    forest, _ = modelio.load(settings["model"], expected_feature_order=FEATURE_ORDER_ID)
    mentions = load_mentions(settings["mentions"], settings["format"])
    caps = settings["caps"]
    if settings["max_threads"]:
        caps = scale_caps(caps, settings["max_threads"])
    try:
        scheduler = BlockScheduler(settings["thresholds"], caps, settings["backend"])
        params = DbscanParams(settings["eps"], settings["min_pts"])
        scheduler.plan([])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ctx = PairFeaturizer(_stop_words(settings)).fit(mentions).context_
    assignment = disambiguate(mentions, forest, ctx, settings["block"], params,
                              scheduler, settings["cache_cap"])
    write_clusters(settings["out"], assignment)
    n_clusters = len(set(assignment.values()))
    print(f"{len(assignment)} mentions -> {n_clusters} clusters; wrote {settings['out']}")
    return EXIT_OK


def cmd_evaluate(settings):
    _need(settings, "clusters", "labels")
    pred = read_clusters(settings["clusters"])
    truth = load_labels(settings["labels"])
    metrics = pairwise_metrics(pred, truth)
    hist, mean = cluster_size_histogram(pred)
    print(format_report(metrics, hist, mean))
    if settings["out"]:
        write_metrics_csv(settings["out"] + ".metrics.csv", metrics)
        write_histogram_csv(settings["out"] + ".histogram.csv", hist)
    return EXIT_OK


def cmd_synth(settings):
    _need(settings, "mentions", "labels")
    cfg = SynthConfig(
        n_persons=settings["persons"], mean_patents=settings["mean_patents"],
        max_coinventors=settings["max_coinventors"], initial_rate=settings["initial_rate"],
        middle_drop_rate=settings["middle_drop_rate"], typo_rate=settings["typo_rate"],
        swap_rate=settings["swap_rate"], move_rate=settings["move_rate"],
        surname_pool=settings["surname_pool"], seed=settings["seed"])
    try:
        rows, labels = generate(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_corpus(rows, labels, settings["mentions"], settings["labels"])
    print(f"wrote {len(rows)} mentions of {cfg.n_persons} persons")
    return EXIT_OK


def cmd_importance(settings):
    _need(settings, "model")
    forest, _ = modelio.load(settings["model"], expected_feature_order=FEATURE_ORDER_ID)
    print(importance_table(forest))
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "disambiguate": cmd_disambiguate,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "importance": cmd_importance,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        settings = resolve(args)
        return COMMANDS[args.command](settings)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"disambig {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DisambigError as exc:
        print(f"disambig {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"disambig {args.command}: DataError: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_DATA
    except (OSError, ValueError) as exc:
        print(f"disambig {args.command}: DataError: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
