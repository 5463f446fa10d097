"""Command-line entry point: ``passerrec <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import evaluation as ev
from .bilstm import BiLstmClassifier, load_model, predict, save_model
from .data import label_records, parse_reviews, read_records, write_records
from .features import ReviewFeaturizer, load_features, save_features
from .optim import OPTIMIZERS, PLConfig, benchmark_suite

logger = logging.getLogger("passerrec")


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _words(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


# key: (parser, default, help)
CONFIG_SCHEMA = {
    "max_terms": (int, 1936, "TF-IDF vocabulary cap"),
    "rank": (int, 64, "graph embedding dimension"),
    "walks_per_node": (int, 10, "random walks started per graph node"),
    "walk_length": (int, 8, "nodes per random walk"),
    "window": (int, 2, "co-occurrence window"),
    "eig_iters": (int, 100, "orthogonal-iteration sweeps"),
    "steps": (int, 20, "Bi-LSTM time steps T"),
    "hidden": (int, 8, "Bi-LSTM hidden size H"),
    "combine": (str, "concat", "concat | add | average | multiply"),
    "param_bound": (float, 2.0, "weight search box [-B, B]"),
    "optimizer": (str, "passer", "passer | pso | random"),
    "pop_size": (int, 30, "optimizer population size"),
    "max_iter": (int, 100, "optimizer iterations for `train`"),
    "producer_fraction": (float, 0.2, "share of producers"),
    "investigator_fraction": (float, 0.1, "share of investigators"),
    "awareness_probability": (float, 0.8, "alarm threshold"),
    "flight_length": (float, 1.0, "producer flight length"),
    "threshold": (float, 0.5, "score threshold for a positive prediction"),
    "fractions": (_floats, ev.DEFAULT_FRACTIONS, "experiment training fractions"),
    "budgets": (_ints, ev.DEFAULT_BUDGETS, "experiment budget levels"),
    "budget_scale": (int, 10, "optimizer iterations per budget level"),
    "seeds": (_ints, (0,), "experiment seeds"),
    "methods": (_words, ("passer",), "experiment methods: passer, pso, random, majority"),
    "dataset_id": (str, "dataset", "dataset label in reports"),
    "bench_dims": (_ints, (2, 5, 10), "benchmark dimensions"),
    "bench_iter": (int, 200, "benchmark iterations"),
    "n_jobs": (int, 1, "threads for fitness evaluation"),
}


def load_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            if key not in CONFIG_SCHEMA:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = CONFIG_SCHEMA[key][0](value.strip())
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


def resolve_config(args):
    """Defaults < config file < ``--set key=value`` flags."""
    cfg = {key: spec[1] for key, spec in CONFIG_SCHEMA.items()}
    if args.config:
        cfg.update(load_config(args.config))
    for item in args.set or ():
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in CONFIG_SCHEMA:
            raise ValueError(f"bad --set {item!r}; unknown key or missing '='")
        cfg[key] = CONFIG_SCHEMA[key][0](value.strip())
    return cfg


def _featurizer(cfg, seed):
    return ReviewFeaturizer(cfg["max_terms"], cfg["rank"], cfg["walks_per_node"],
                            cfg["walk_length"], cfg["window"], cfg["eig_iters"], seed)


def _classifier_params(cfg):
    keys = ("steps", "hidden", "combine", "param_bound", "pop_size", "producer_fraction",
            "investigator_fraction", "awareness_probability", "flight_length", "n_jobs")
    return {k: cfg[k] for k in keys}


def cmd_ingest(args, cfg):
    with open(args.reviews, "rb") as fh:
        records, skipped = parse_reviews(fh)
    with open(args.out, "w", encoding="utf-8") as out:
        write_records(records, out)
    print(f"{len(records)} records written, {skipped} lines skipped")


def cmd_featurize(args, cfg):
    examples = label_records(read_records(args.records))
    if not examples:
        raise ValueError(f"no records in {args.records}")
    featurizer = _featurizer(cfg, args.seed)
    X = featurizer.fit_transform([e.record for e in examples])
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "features.txt"), "w") as fh:
        save_features(fh, X, [e.label for e in examples])
    with open(os.path.join(args.out, "tfidf.txt"), "w", encoding="utf-8") as fh:
        featurizer.tfidf_.model_.dump(fh)
    with open(os.path.join(args.out, "gemb.txt"), "w", encoding="utf-8") as fh:
        featurizer.graph_.table_.dump(fh)
    print(f"{X.shape[0]} x {X.shape[1]} features written to {args.out}")


def _features_path(path):
    return os.path.join(path, "features.txt") if os.path.isdir(path) else path


def cmd_train(args, cfg):
    with open(_features_path(args.features)) as fh:
        X, y = load_features(fh)
    clf = BiLstmClassifier(**_classifier_params(cfg), optimizer=cfg["optimizer"],
                           max_iter=cfg["max_iter"], threshold=cfg["threshold"], seed=args.seed)
    clf.fit(X, y)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "params.csv"), "w") as p, \
            open(os.path.join(args.out, "model.txt"), "w") as h:
        save_model(clf.model_, p, h, cfg["param_bound"])
    with open(os.path.join(args.out, "trace.csv"), "w") as fh:
        clf.result_.write_trace(fh)
    print(f"trained; final training MSE {clf.result_.best_fitness:.6g}")


def cmd_evaluate(args, cfg):
    with open(os.path.join(args.model, "params.csv")) as p, \
            open(os.path.join(args.model, "model.txt")) as h:
        model = load_model(p, h)
    with open(_features_path(args.features)) as fh:
        X, y = load_features(fh)
    scores = predict(model, X) if len(X) else np.zeros(0)
    report = ev.evaluate_scores(scores, y, cfg["threshold"])
    record = ev.RunRecord(cfg["dataset_id"], "model", 1.0, 0, args.seed, report)
    paths = ev.emit_report([record], args.out)
    print(", ".join(f"{k}={v:.4f}" for k, v in report.as_dict().items()))
    print("wrote " + " ".join(paths))


def cmd_experiment(args, cfg):
    examples = label_records(read_records(args.records))
    records = ev.run_experiment(
        examples, cfg["fractions"], cfg["budgets"], cfg["seeds"] if args.seed is None else (args.seed,),
        cfg["methods"], cfg["budget_scale"],
        featurizer_params=dict(max_terms=cfg["max_terms"], rank=cfg["rank"],
                               walks_per_node=cfg["walks_per_node"], walk_length=cfg["walk_length"],
                               window=cfg["window"], n_iter=cfg["eig_iters"]),
        classifier_params=_classifier_params(cfg), dataset_id=cfg["dataset_id"],
        threshold=cfg["threshold"])
    failed = [r for r in records if r.error]
    for r in failed:
        logger.warning("run %s/%s failed: %s", r.method, r.key, r.error)
    if len(failed) == len(records):
        raise RuntimeError("every experiment run failed")
    paths = ev.emit_report(records, args.out)
    by_method = {}
    for r in records:
        by_method.setdefault(r.method, []).append(r)
    table = ev.format_table(ev.compare_table(by_method))
    with open(os.path.join(args.out, "compare.txt"), "w") as fh:
        fh.write(table)
    sys.stdout.write(table)
    print("wrote " + " ".join(paths))


def cmd_bench_opt(args, cfg):
    os.makedirs(args.out, exist_ok=True)
    seed = 0 if args.seed is None else args.seed
    for fn in benchmark_suite(cfg["bench_dims"]):
        config = PLConfig(fn.bounds, dim=fn.dim, pop_size=cfg["pop_size"],
                          max_iter=cfg["bench_iter"], producer_fraction=cfg["producer_fraction"],
                          investigator_fraction=cfg["investigator_fraction"],
                          awareness_probability=cfg["awareness_probability"],
                          flight_length=cfg["flight_length"], seed=seed)
        for name, run in OPTIMIZERS.items():
            result = run(fn, config)
            with open(os.path.join(args.out, f"{fn.name}_{name}.csv"), "w") as fh:
                result.write_trace(fh)
            print(f"{fn.name:<14} {name:<7} best {result.best_fitness:.6g}")


def _config_epilog():
    lines = ["config keys (file lines `key = value`, or --set key=value):"]
    for key, (_, default, text) in CONFIG_SCHEMA.items():
        shown = ",".join(map(str, default)) if isinstance(default, tuple) else default
        lines.append(f"  {key:<22} {text} (default {shown})")
    return "\n".join(lines)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key = value config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    common.add_argument("--seed", type=int, default=None, help="random seed (u64)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress")

    parser = argparse.ArgumentParser(
        prog="passerrec", description="Passer Learning trained Bi-LSTM review recommender.",
        epilog=_config_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text,
                           epilog=_config_epilog(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, "parse raw review JSON lines into a clean records file")
    p.add_argument("reviews")
    p.add_argument("--out", required=True, help="records file to write")

    p = add("featurize", cmd_featurize, "fit TF-IDF + graph features on records")
    p.add_argument("records")
    p.add_argument("--out", required=True, help="output directory")

    p = add("train", cmd_train, "train a Bi-LSTM on a features file")
    p.add_argument("features")
    p.add_argument("--out", required=True, help="model directory")

    p = add("evaluate", cmd_evaluate, "score a trained model on a features file")
    p.add_argument("model")
    p.add_argument("features")
    p.add_argument("--out", required=True, help="report directory")

    p = add("experiment", cmd_experiment, "run the training-fraction x budget grid")
    p.add_argument("records")
    p.add_argument("--grid-defaults", action="store_true",
                   help="use the default grid (6 fractions x 5 budgets) unless the config overrides it")
    p.add_argument("--out", required=True, help="report directory")

    p = add("bench-opt", cmd_bench_opt, "run passer, pso and random search on benchmark functions")
    p.add_argument("--suite", action="store_true", help="run the full benchmark suite (default)")
    p.add_argument("--out", required=True, help="trace directory")
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.seed is None and args.command in ("featurize", "train", "evaluate"):
            args.seed = 0
        args.func(args, cfg)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"passerrec {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
