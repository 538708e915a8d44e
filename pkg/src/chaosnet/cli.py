"""``chaosnet`` command line.

Data goes to the ``--out`` file (written only once the command has finished);
summaries go to stdout and diagnostics to stderr.  Tables are comma-delimited
with a header row, preceded by ``#`` lines echoing the command and config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import coding, docformat
from .classifier import (
    evaluate,
    evaluate_labels,
    extract_test_features,
    classify_features,
    load_model,
    predict,
    save_model,
    train_dataset,
)
from .config import ConfigError, ExperimentConfig, load_config
from .datakit import DatasetError, load_csv, load_features_csv, sample_per_class
from .multilayer import LayerConfigError
from .noise import noise_sweep
from .ttss import NonConvergenceError


class CliError(Exception):
    pass


def _atomic_write(path: str, data, binary: bool = False) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".chaosnet-")
    try:
        with os.fdopen(fd, "wb" if binary else "w", **({} if binary else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _table(header: list[str], rows, echo: list[str]) -> str:
    buf = io.StringIO()
    for line in echo:
        buf.write(f"# {line}\n" if line else "#\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _echo(args, raw_config: str) -> list[str]:
    lines = [f"chaosnet {args.command}" + (f" --seed {args.seed}" if args.seed is not None else "")]
    if raw_config:
        lines.append("config:")
        lines += raw_config.rstrip("\n").splitlines()
    return lines


def _need(value, what: str):
    if value is None:
        raise CliError(f"{what} is required")
    return value


def _load_dataset(cfg: ExperimentConfig):
    path = _need(cfg.dataset, "config key 'dataset'")
    if not os.path.exists(path):
        raise CliError(f"dataset file not found: {path}")
    ds = load_csv(path, cfg.label_column, cfg.has_header)
    if ds.dropped_rows:
        print(f"dropped {ds.dropped_rows} rows with missing values", file=sys.stderr)
    return ds


def _split(cfg: ExperimentConfig, ds, seed: int):
    if cfg.k is None:
        return ds, None
    return sample_per_class(ds, cfg.k, seed)


def cmd_train(cfg: ExperimentConfig, args, raw: str) -> None:
    out = _need(args.out, "--out")
    params = cfg.hyperparams()
    layers = cfg.layer_specs()
    ds = _load_dataset(cfg)
    train_ds, _ = _split(cfg, ds, args.seed_value)
    model = train_dataset(train_ds, params, cfg.test_scaling, layers)
    buf = io.StringIO()
    save_model(model, buf)
    _atomic_write(out, buf.getvalue())
    summary = {
        "classes": len(model.classes),
        "n_features": model.n_features,
        "representation_dim": int(model.mean_vectors.shape[1]),
        "samples_per_class": {c: int(len(train_ds.class_index[c])) for c in model.classes},
        "model": out,
    }
    print(json.dumps(summary))


def _model_path(cfg: ExperimentConfig, args) -> str:
    path = args.model or cfg.model
    path = _need(path, "a model file (--model or config key 'model')")
    if not os.path.exists(path):
        raise CliError(f"model file not found: {path}")
    return path


def cmd_predict(cfg: ExperimentConfig, args, raw: str) -> None:
    out = _need(args.out, "--out")
    model = load_model(_model_path(cfg, args))
    path = _need(cfg.dataset, "config key 'dataset'")
    if not os.path.exists(path):
        raise CliError(f"dataset file not found: {path}")
    data = load_features_csv(path, cfg.has_header, cfg.label_column)
    preds = predict(model, data)
    header = ["row", "label"] + [f"similarity_{c}" for c in model.classes]
    rows = [[i, p.label, *map(float, p.similarities)] for i, p in enumerate(preds)]
    _atomic_write(out, _table(header, rows, _echo(args, raw)))
    print(json.dumps({"rows": len(rows), "out": out}))


def cmd_eval(cfg: ExperimentConfig, args, raw: str) -> None:
    model = load_model(_model_path(cfg, args))
    ds = _load_dataset(cfg)
    _, rest = _split(cfg, ds, args.seed_value)
    test = rest if rest is not None else ds
    result = evaluate(model, test.features, test.labels)
    rows = [[t, p, int(result.confusion[i, j])] for i, t in enumerate(model.classes) for j, p in enumerate(model.classes)]
    if args.out:
        echo = _echo(args, raw) + [f"accuracy: {result.accuracy!r}"]
        _atomic_write(args.out, _table(["true", "predicted", "count"], rows, echo))
    print(json.dumps({"accuracy": result.accuracy, "rows": len(test), "confusion": result.confusion.tolist(),
                      "classes": list(model.classes)}))


def cmd_sweep(cfg: ExperimentConfig, args, raw: str) -> None:
    out = _need(args.out, "--out")
    k_lo, k_hi = _need(cfg.k_range, "config key 'k_range'")
    params = cfg.hyperparams()
    layers = cfg.layer_specs()
    ds = _load_dataset(cfg)
    smallest = min(len(v) for v in ds.class_index.values())
    if k_hi >= smallest:
        raise CliError(f"k_range upper bound {k_hi} leaves no test rows in the smallest class ({smallest} rows)")
    seeds = np.random.SeedSequence(args.seed_value).spawn((k_hi - k_lo + 1) * cfg.trials)
    rows = []
    idx = 0
    for k in range(k_lo, k_hi + 1):
        for t in range(cfg.trials):
            seed = int(seeds[idx].generate_state(1, dtype=np.uint32)[0])
            idx += 1
            train_ds, test_ds = sample_per_class(ds, k, seed)
            model = train_dataset(train_ds, params, cfg.test_scaling, layers)
            acc = evaluate(model, test_ds.features, test_ds.labels).accuracy
            rows.append([k, t, seed, acc])
    _atomic_write(out, _table(["k", "trial", "seed", "accuracy"], rows, _echo(args, raw)))
    means = {k: float(np.mean([r[3] for r in rows if r[0] == k])) for k in range(k_lo, k_hi + 1)}
    print(json.dumps({"records": len(rows), "mean_accuracy": means, "out": out}))


def cmd_noise(cfg: ExperimentConfig, args, raw: str) -> None:
    out = _need(args.out, "--out")
    sigmas = cfg.sigma_grid()
    params = cfg.hyperparams()
    layers = cfg.layer_specs()
    ds = _load_dataset(cfg)
    if cfg.k is None:
        raise CliError("config key 'k' is required for the noise command")
    train_ds, test_ds = sample_per_class(ds, cfg.k, args.seed_value)
    model = train_dataset(train_ds, params, cfg.test_scaling, layers)
    feats = extract_test_features(model, test_ds.features)
    clean = evaluate_labels([model.classes[i] for i in classify_features(model.mean_vectors, feats)],
                            test_ds.labels, model.classes).accuracy
    trials = noise_sweep(model, feats, test_ds.labels, sigmas, cfg.trials_per_sigma, args.seed_value)
    rows = [[t.sigma, t.trial, t.seed, t.snr_db, t.accuracy] for t in trials]
    echo = _echo(args, raw) + [f"clean_accuracy: {clean!r}"]
    _atomic_write(out, _table(["sigma", "trial", "seed", "snr_db", "accuracy"], rows, echo))
    print(json.dumps({"records": len(rows), "clean_accuracy": clean, "out": out}))


def cmd_codec_encode(cfg: ExperimentConfig, args, raw: str) -> None:
    out = _need(args.out, "--out")
    src = _need(args.input, "an input file")
    if not os.path.exists(src):
        raise CliError(f"input file not found: {src}")
    with open(src, "rb") as fh:
        data = fh.read()
    p = args.p if args.p is not None else cfg.codec_p
    text = coding.encode_bytes(data, None if p is None else Fraction(str(p)))
    _atomic_write(out, text)
    print(json.dumps({"bytes": len(data), "out": out}))


def cmd_codec_decode(cfg: ExperimentConfig, args, raw: str) -> None:
    out = _need(args.out, "--out")
    src = _need(args.input, "an input file")
    if not os.path.exists(src):
        raise CliError(f"input file not found: {src}")
    with open(src, encoding="utf-8") as fh:
        data = coding.decode_bytes(fh.read())
    _atomic_write(out, data, binary=True)
    print(json.dumps({"bytes": len(data), "out": out}))


def cmd_uat(cfg: ExperimentConfig, args, raw: str) -> None:
    out = _need(args.out, "--out")
    src = _need(args.input, "a samples file")
    if not os.path.exists(src):
        raise CliError(f"samples file not found: {src}")
    eps = args.epsilon if args.epsilon is not None else cfg.uat_epsilon
    eps = _need(eps, "--epsilon (or config key 'uat_epsilon')")
    samples = load_features_csv(src, has_header=False)
    if samples.shape[1] != 1:
        raise CliError(f"samples file must have one value per line, found {samples.shape[1]} columns")
    samples = samples[:, 0]
    code = coding.uat_encode(samples, eps)
    recon = coding.uat_decode(code)
    _atomic_write(out, coding.dumps_uat(code))
    max_err = float(np.max(np.abs(recon - samples)))
    print(json.dumps({"length": code.length, "bitplanes": code.bitplane_count, "scale": code.scale,
                      "epsilon": float(eps), "max_error": max_err, "within_bound": max_err <= float(eps),
                      "out": out}))


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "noise": cmd_noise,
    "codec-encode": cmd_codec_encode,
    "codec-decode": cmd_codec_decode,
    "uat": cmd_uat,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaosnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment config (YAML/JSON)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", help="output file")
        if name in ("predict", "eval"):
            p.add_argument("--model", help="model file (overrides config key 'model')")
        if name.startswith("codec") or name == "uat":
            p.add_argument("input", help="input file")
        if name == "codec-encode":
            p.add_argument("--p", help="skew as a rational, e.g. 3/4 (default: empirical zero frequency)")
        if name == "uat":
            p.add_argument("--epsilon", type=float, help="approximation bound")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg, raw = load_config(args.config)
        else:
            cfg, raw = ExperimentConfig(), ""
        args.seed_value = args.seed if args.seed is not None else cfg.seed
        COMMANDS[args.command](cfg, args, raw)
    except (CliError, ConfigError, DatasetError, LayerConfigError, NonConvergenceError,
            docformat.DocumentError, ValueError, OSError) as exc:
        print(f"chaosnet {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
