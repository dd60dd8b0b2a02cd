"""End-to-end stages shared by the CLI and the experiment runner."""

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import feature_maps as fm
from . import kernels as kn
from . import svm
from .errors import ConfigError, QTextError
from .text import corpus
from .text.embeddings import load_embeddings_text, train_embeddings
from .text.features import featurize, write_features_csv
from .text.qbow import qbow_classify, qbow_train

STD_DEFINITION = "sample standard deviation (n-1); 0 with single_sample=true for one seed"


def load_dataset(cfg):
    """``(full, fixed_split)``; ``fixed_split`` is ``(train, test)`` for lambeq, else None."""
    if cfg.dataset == "lambeq":
        train, test = corpus.load_lambeq_split(cfg.data_path or None)
        full = corpus.LabeledDataset(train.documents + test.documents, train.class_names)
        return full, (train, test)
    if not cfg.data_path:
        raise ConfigError("dataset imdb needs data_path")
    return corpus.load_imdb(cfg.data_path), None


def build_embeddings(cfg, full, dim):
    if cfg.embedding == "self":
        return train_embeddings(full, dim, cfg.window, cfg.max_vocab, cfg.min_count)
    table = load_embeddings_text(cfg.embedding)
    if dim > table.dim:
        raise ConfigError(f"requested dim {dim} but {cfg.embedding} has {table.dim}-d vectors")
    return table.truncate(dim) if dim < table.dim else table


def split_for_seed(cfg, full, fixed, seed):
    if fixed is not None:
        return fixed
    return corpus.sample_subset(full, cfg.n_train, cfg.n_test, seed)


def feature_map(cfg, kind, dim):
    qubits = cfg.qubits_for(kind, dim)
    if kind == "classical-linear":
        return None
    return fm.FeatureMapSpec(fm.AMPLITUDE if kind == "amplitude" else fm.ZZ, qubits, cfg.reps)


def kernel_blocks(cfg, kind, Xtr, Xte, shot_cfg):
    """Train Gram and test-vs-train block for one map.

    The classical-linear kernel is the plain dot product and ignores shots.
    ZZ inputs are rescaled to [0, pi] using training-set ranges.
    """
    Xtr = np.asarray(Xtr, dtype=float)
    Xte = np.asarray(Xte, dtype=float)
    if kind == "classical-linear":
        K = Xtr @ Xtr.T
        return np.triu(K) + np.triu(K, 1).T, Xte @ Xtr.T
    fmap = feature_map(cfg, kind, Xtr.shape[1])
    if kind == "zz":
        scaler = fm.AngleScaler().fit(Xtr)
        Xtr, Xte = scaler.transform(Xtr), scaler.transform(Xte)
    K = kn.gram_matrix(fmap, list(Xtr), None, shot_cfg)
    Kt = kn.gram_matrix(fmap, list(Xte), list(Xtr), shot_cfg)
    return K, Kt


def fit_and_score(K, y_train, K_test, y_test, train_cfg):
    """Fit on the PSD-repaired Gram and score the test block.  Labels are class indices (0/1)."""
    K_fit, shift = kn.repair_psd(K)
    model = svm.train(K_fit, [corpus.signed(v) for v in y_train], train_cfg)
    pred = svm.predict(model, K_test)
    gold = [corpus.signed(v) for v in y_test]
    return model, {
        "accuracy": svm.accuracy(pred, gold),
        "predictions": [int(p) for p in pred],
        "gold": gold,
        "psd_shift": shift,
        "n_support": int(len(model.support_indices)),
    }


def aggregate(values):
    """``(mean, std, single_sample)`` with the n-1 standard deviation."""
    values = [float(v) for v in values]
    if not values:
        return None, None, False
    mean = math.fsum(values) / len(values)
    if len(values) == 1:
        return mean, 0.0, True
    var = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var), False


def format_cell(mean, std):
    if mean is None:
        return "n/a"
    return f"{mean:.3f}±{std:.3f}"


def dumps(payload):
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


@dataclass
class Timer:
    stages: dict = field(default_factory=dict)

    def add(self, stage, seconds):
        self.stages[stage] = self.stages.get(stage, 0.0) + seconds

    def time(self, stage):
        return _Span(self, stage)


class _Span:
    def __init__(self, timer, stage):
        self.timer, self.stage = timer, stage

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.timer.add(self.stage, time.perf_counter() - self.t0)


def _cell_summary(extra, seeds, accs, failures):
    mean, std, single = aggregate(accs)
    out = dict(extra)
    out.update(
        seeds=seeds,
        accuracies=accs,
        failures=failures,
        n=len(accs),
        mean=mean,
        std=std,
        single_sample=single,
        formatted=format_cell(mean, std),
    )
    return out


def run_experiment(cfg, workdir=None, write_artifacts=True, baselines=True):
    """Full pipeline per seed over every (dim, map) cell.

    Returns ``(payload, timing)``.  ``payload`` holds only deterministic
    content; wall-clock figures live in ``timing``.
    """
    timer = Timer()
    workdir = Path(workdir if workdir is not None else cfg.workdir)
    with timer.time("load"):
        full, fixed = load_dataset(cfg)
    dims = cfg.sweep_dims
    maps = cfg.sweep_maps
    for kind in maps:
        for d in dims:
            cfg.qubits_for(kind, d)
    with timer.time("embed"):
        table = build_embeddings(cfg, full, max(dims))
    train_cfg = svm.TrainConfig(cfg.C, cfg.tol, cfg.max_passes)

    results = {(k, d): ([], [], []) for d in dims for k in maps}
    bow = ([], [], [])
    for seed in cfg.sweep_seeds:
        try:
            train, test = split_for_seed(cfg, full, fixed, seed)
        except QTextError as exc:
            for acc in list(results.values()) + ([bow] if baselines else []):
                acc[2].append({"seed": seed, "error": f"{type(exc).__name__}: {exc}"})
            continue
        if baselines:
            try:
                model = qbow_train(train)
                pred = [qbow_classify(model, d) for d in test]
                gold = [test.class_names[d.label] for d in test]
                bow[0].append(seed)
                bow[1].append(sum(p == g for p, g in zip(pred, gold)) / len(gold))
            except QTextError as exc:
                bow[2].append({"seed": seed, "error": f"{type(exc).__name__}: {exc}"})
        shot_cfg = kn.ShotConfig(cfg.shots, seed)
        for d in dims:
            sub = table.truncate(d) if d < table.dim else table
            try:
                with timer.time("featurize"):
                    Xtr, ytr = featurize(train, sub)
                    Xte, yte = featurize(test, sub)
            except QTextError as exc:
                for k in maps:
                    results[(k, d)][2].append({"seed": seed, "error": f"{type(exc).__name__}: {exc}"})
                continue
            for kind in maps:
                seeds_ok, accs, fails = results[(kind, d)]
                try:
                    with timer.time("kernel"):
                        K, Kt = kernel_blocks(cfg, kind, Xtr, Xte, shot_cfg)
                    with timer.time("train"):
                        model, score = fit_and_score(K, ytr, Kt, yte, train_cfg)
                except QTextError as exc:
                    fails.append({"seed": seed, "error": f"{type(exc).__name__}: {exc}"})
                    continue
                seeds_ok.append(seed)
                accs.append(score["accuracy"])
                if write_artifacts:
                    cell_dir = workdir / f"seed_{seed}" / f"{kind}_d{d}"
                    cell_dir.mkdir(parents=True, exist_ok=True)
                    shots = 0 if kind == "classical-linear" else cfg.shots
                    kn.write_gram_csv(cell_dir / "train_gram.csv", K, shots, seed)
                    kn.write_gram_csv(cell_dir / "test_block.csv", Kt, shots, seed)
                    svm.save_model(model, cell_dir / "model.json")
                    (cell_dir / "result.json").write_text(dumps(score))

    cells = []
    for d in dims:
        for kind in maps:
            seeds_ok, accs, fails = results[(kind, d)]
            cells.append(_cell_summary(
                {"map": kind, "dim": d, "qubits": cfg.qubits_for(kind, d)}, seeds_ok, accs, fails
            ))
    payload = {
        "kind": "experiment",
        "config": cfg.echo(),
        "seeds": list(cfg.sweep_seeds),
        "std_definition": STD_DEFINITION,
        "vocabulary_size": len(table),
        "cells": cells,
    }
    if baselines:
        payload["bow"] = _cell_summary({"map": "bow"}, *bow)
    return payload, dict(timer.stages)


TABLE_COLUMNS = (("classical-linear", "CSVM"), ("zz", "ZZ"), ("amplitude", "Amplitude"))


def table_rows(payload):
    """Rows of ``dim, CSVM, ZZ, Amplitude, BoW`` formatted cells."""
    by_key = {(c["map"], c["dim"]): c["formatted"] for c in payload["cells"]}
    dims = sorted({c["dim"] for c in payload["cells"]})
    bow = payload.get("bow", {}).get("formatted", "")
    rows = [["dim"] + [label for _, label in TABLE_COLUMNS] + ["BoW"]]
    for d in dims:
        rows.append([str(d)] + [by_key.get((k, d), "") for k, _ in TABLE_COLUMNS] + [bow])
    return rows


def failed_majority(payload):
    """True when some cell failed for more than half of the seeds."""
    n_seeds = len(payload["seeds"])
    cells = payload["cells"] + ([payload["bow"]] if "bow" in payload else [])
    return any(len(c["failures"]) * 2 > n_seeds for c in cells)


def export_features(cfg, path):
    """Write the feature CSV for ``cfg.dim``; returns ``(vocab size, dim, rows)``."""
    full, fixed = load_dataset(cfg)
    table = build_embeddings(cfg, full, cfg.dim)
    train, test = split_for_seed(cfg, full, fixed, cfg.seed)
    Xtr, ytr = featurize(train, table)
    Xte, yte = featurize(test, table)
    X = np.vstack([Xtr, Xte])
    labels = list(ytr) + list(yte)
    splits = ["train"] * len(ytr) + ["test"] * len(yte)
    write_features_csv(path, X, labels, splits)
    return len(table), table.dim, len(labels)
