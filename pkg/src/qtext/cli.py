"""Command-line entry point.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric or
convergence failure.
"""

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import kernels as kn
from . import pipeline, svm
from .config import ExperimentConfig, load_config
from .errors import ConfigError, ConvergenceError, QTextError, ShapeError
from .text.features import read_features_csv
from .text.sources import export_imdb

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    return cfg.with_overrides(
        shots=args.shots,
        seed=args.seed,
        map=args.map,
        qubits=args.qubits,
        dim=args.dim,
        workdir=args.workdir,
    )


def _workdir(cfg):
    path = Path(cfg.workdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_embed(args):
    cfg = _config(args)
    out = _workdir(cfg) / "features.csv"
    vocab, dim, rows = pipeline.export_features(cfg, out)
    print(f"vocabulary={vocab} dim={dim} rows={rows} -> {out}")
    return EXIT_OK


def _split_features(path):
    X, labels, splits = read_features_csv(path)
    train = [i for i, s in enumerate(splits) if s == "train"]
    test = [i for i, s in enumerate(splits) if s == "test"]
    if not train or not test:
        raise ShapeError(f"{path} needs both train and test rows")
    return X[train], labels[train], X[test], labels[test]


def cmd_kernel(args):
    cfg = _config(args)
    wd = _workdir(cfg)
    Xtr, ytr, Xte, yte = _split_features(wd / "features.csv")
    kind = cfg.map
    qubits = cfg.qubits_for(kind, Xtr.shape[1])
    shots = 0 if kind == "classical-linear" else cfg.shots
    shot_cfg = kn.ShotConfig(shots, cfg.seed)
    K, Kt = pipeline.kernel_blocks(cfg, kind, Xtr, Xte, shot_cfg)
    kn.write_gram_csv(wd / "train_gram.csv", K, shots, cfg.seed)
    kn.write_gram_csv(wd / "test_block.csv", Kt, shots, cfg.seed)
    labels = {"train": [int(v) for v in ytr], "test": [int(v) for v in yte]}
    (wd / "labels.json").write_text(json.dumps(labels) + "\n")
    msg = f"map={kind} qubits={qubits} shots={shots} train={K.shape} test={Kt.shape}"
    if shots > 0:
        K0, Kt0 = pipeline.kernel_blocks(cfg, kind, Xtr, Xte, kn.ShotConfig(0, cfg.seed))
        kn.write_gram_csv(wd / "exact_train_gram.csv", K0, 0, cfg.seed)
        kn.write_gram_csv(wd / "exact_test_block.csv", Kt0, 0, cfg.seed)
        stats = {
            "shots": shots,
            "seed": cfg.seed,
            "frobenius_train": kn.frobenius_distance(K, K0),
            "frobenius_test": kn.frobenius_distance(Kt, Kt0),
        }
        (wd / "kernel_stats.json").write_text(pipeline.dumps(stats))
        msg += f" frobenius_train={stats['frobenius_train']:.6g}"
    print(msg)
    return EXIT_OK


def cmd_train_eval(args):
    cfg = _config(args)
    wd = _workdir(cfg)
    t0 = time.perf_counter()
    K, _ = kn.read_gram_csv(wd / "train_gram.csv")
    Kt, _ = kn.read_gram_csv(wd / "test_block.csv")
    with open(wd / "labels.json") as fh:
        labels = json.load(fh)
    t1 = time.perf_counter()
    if K.shape[0] != len(labels["train"]) or Kt.shape[0] != len(labels["test"]):
        raise ShapeError(
            f"Gram sizes {K.shape}/{Kt.shape} do not match {len(labels['train'])} train "
            f"and {len(labels['test'])} test labels"
        )
    model, score = pipeline.fit_and_score(
        K, labels["train"], Kt, labels["test"], svm.TrainConfig(cfg.C, cfg.tol, cfg.max_passes)
    )
    t2 = time.perf_counter()
    svm.save_model(model, wd / "model.json")
    payload = {"kind": "train-eval", "config": cfg.echo(), **score}
    (wd / "report.json").write_text(pipeline.dumps(payload))
    (wd / "timing.json").write_text(pipeline.dumps({"load": t1 - t0, "train": t2 - t1}))
    with open(wd / "report.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["map", "dim", "shots", "seed", "n_train", "n_test", "accuracy"])
        w.writerow([cfg.map, cfg.dim, cfg.shots, cfg.seed, K.shape[0], Kt.shape[0], score["accuracy"]])
    print(f"accuracy={score['accuracy']:.4f} ({len(score['gold'])} test documents)")
    return EXIT_OK


def cmd_experiment(args):
    cfg = _config(args)
    wd = _workdir(cfg)
    payload, timing = pipeline.run_experiment(cfg, wd)
    (wd / "report.json").write_text(pipeline.dumps(payload))
    (wd / "timing.json").write_text(pipeline.dumps(timing))
    rows = pipeline.table_rows(payload)
    with open(wd / "table.csv", "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)
    width = max(len(c) for r in rows for c in r)
    for r in rows:
        print("  ".join(c.ljust(width) for c in r))
    if pipeline.failed_majority(payload):
        print("more than half of the seeds failed in at least one cell", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_fetch_imdb(args):
    counts = export_imdb(args.out, args.limit)
    print(f"neg={counts['neg']} pos={counts['pos']} -> {args.out}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="qtext", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="experiment config file (key = value lines)")
        p.add_argument("--shots", type=int, help="shots per kernel entry; 0 for exact")
        p.add_argument("--seed", type=int)
        p.add_argument("--map", choices=("amplitude", "zz", "classical-linear"))
        p.add_argument("--qubits", type=int)
        p.add_argument("--dim", type=int, help="embedding dimension")
        p.add_argument("--workdir", help="directory for stage artifacts")
        p.set_defaults(func=func)
        return p

    add("embed", cmd_embed, "write sentence features to <workdir>/features.csv")
    add("kernel", cmd_kernel, "write train Gram and test block CSVs")
    add("train-eval", cmd_train_eval, "train the SVM on the Gram files and evaluate")
    add("experiment", cmd_experiment, "multi-seed sweep with per-cell accuracy tables")
    p = sub.add_parser("fetch-imdb", help="export the IMDB reviews from the movie-reviews package")
    p.add_argument("--out", required=True)
    p.add_argument("--limit", type=int, help="reviews per class")
    p.set_defaults(func=cmd_fetch_imdb)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qtext: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"qtext: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QTextError, OSError) as exc:
        print(f"qtext: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
