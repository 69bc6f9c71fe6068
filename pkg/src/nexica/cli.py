"""Command-line interface; each subcommand wraps one pipeline stage."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import classify as cls
from . import pipeline as pl
from .errors import NexicaError, ParameterError
from .groundtruth import DatasetSpec, build_dataset, full_dataset, label_pairs
from .ingest import load_drive_times, load_speed_csv, load_station_meta
from .events import extract_events
from .mle import estimate
from .synth import SynthSpec, write_dataset


def _default_threads() -> int:
    env = os.environ.get("NEXICA_THREADS")
    return int(env) if env else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (NexicaError, OSError, json.JSONDecodeError) as exc:
        print(f"nexica: {args.command}: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nexica",
        description="Event-based causal discovery for road-sensor speed series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("events", help="extract slowdown leading edges from speeds")
    p.add_argument("--speeds", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--profile-out", help="also dump the median-week profiles")
    p.set_defaults(handler=cmd_events)

    p = sub.add_parser("pairs", help="correspondence counts for all pairs and lags")
    p.add_argument("--events", required=True)
    p.add_argument("--slots", type=int, required=True, help="series length in slots")
    p.add_argument("--lmax", type=int, default=8)
    p.add_argument("--tau", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_pairs)

    p = sub.add_parser("mle", help="append causal-probability estimates to counts")
    p.add_argument("--counts", required=True)
    p.add_argument("--tau", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_mle)

    p = sub.add_parser("ground-truth", help="rule-derived labels for candidate tuples")
    p.add_argument("--meta", required=True)
    p.add_argument("--drive-times", required=True)
    p.add_argument("--lmax", type=int, default=8)
    p.add_argument("--ratio", type=int, default=1)
    p.add_argument("--full", action="store_true", help="emit the full dataset instead")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_ground_truth)

    p = sub.add_parser("synth", help="generate a synthetic corpus with planted edges")
    p.add_argument("--spec", required=True, help="JSON spec file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("train", help="train a forest on labeled count features")
    _add_model_args(p)
    p.add_argument("--model-out", required=True)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", help="cross-validated ROC/AUC of the forest")
    _add_model_args(p)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--metrics-out", required=True)
    p.add_argument("--roc-out")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("ablate", help="AUC for every subset of the four counts")
    p.add_argument("--features", required=True, help="mle.csv from the mle stage")
    p.add_argument("--labels", required=True, help="dataset.csv from ground-truth")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--n-trees", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_ablate)

    p = sub.add_parser("grid-search", help="pipeline AUC over an (alpha, tau) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--alphas", required=True, help="comma-separated, e.g. 0.05,0.25")
    p.add_argument("--taus", required=True, help="comma-separated, e.g. 0,1")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_grid_search)

    p = sub.add_parser("report", help="summarize a completed run directory")
    p.add_argument("--run", required=True)
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--alpha", type=float)
    p.add_argument("--tau", type=int)
    p.add_argument("--ratio", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-trees", type=int, dest="n_trees")
    p.add_argument("--threads", type=int, dest="thread_count")
    p.set_defaults(handler=cmd_run)

    return parser


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", required=True, help="mle.csv from the mle stage")
    p.add_argument("--labels", required=True, help="dataset.csv from ground-truth")
    p.add_argument(
        "--feature-set",
        choices=["counts", "counts+pc", "pc"],
        default="counts",
    )
    p.add_argument("--n-trees", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)


def cmd_events(args) -> int:
    series = load_speed_csv(args.speeds)
    extracted = [extract_events(s, args.alpha) for s in series]
    pl.write_events_csv(args.out, extracted)
    if args.profile_out:
        pl.write_profiles_csv(args.profile_out, series)
    n = sum(s.count() for s in extracted)
    print(f"{len(extracted)} stations, {n} events -> {args.out}")
    return 0


def cmd_pairs(args) -> int:
    series = pl.read_events_csv(args.events, args.slots)
    table = pl.sweep(series, args.lmax, args.tau, args.threads)
    pl.write_counts_csv(args.out, table)
    print(f"{len(table.tuples)} tuples -> {args.out}")
    return 0


def cmd_mle(args) -> int:
    rows = pl.read_counts_csv(args.counts, tau=args.tau)
    pl.write_mle_rows(
        args.out,
        ((cause, effect, lag, counts, estimate(counts)) for cause, effect, lag, counts in rows),
    )
    print(f"{len(rows)} estimates -> {args.out}")
    return 0


def cmd_ground_truth(args) -> int:
    meta = load_station_meta(args.meta)
    matrix = load_drive_times(args.drive_times)
    spec = DatasetSpec(ratio=args.ratio, l_max=args.lmax)
    truth = label_pairs(meta, matrix, spec)
    dataset = full_dataset(truth) if args.full else build_dataset(truth, args.ratio)
    pl.write_dataset_csv(args.out, dataset)
    pos = len(dataset.positives())
    print(
        f"{len(dataset.pairs)} labeled tuples ({pos} positive) -> {args.out}; "
        f"min negative drive time {dataset.min_negative_drive_time:.1f} min"
    )
    return 0


def cmd_synth(args) -> int:
    spec = SynthSpec.from_json(args.spec)
    paths = write_dataset(spec, args.out)
    print("\n".join(f"{k}: {v}" for k, v in sorted(paths.items())))
    return 0


def _load_features(args) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    features = {}
    with open(args.features, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:7] != ["cause", "effect", "lag", "a00", "a01", "a10", "a11"]:
            raise ParameterError(f"{args.features}: unexpected feature header")
        has_pc = "p_c" in header
        pc_col = header.index("p_c") if has_pc else None
        for row in reader:
            if not row:
                continue
            key = (row[0], row[1], int(row[2]))
            counts = [float(v) for v in row[3:7]]
            pc = float(row[pc_col]) if has_pc else 0.0
            if pc != pc:  # NaN: undefined estimate carries no causal signal
                pc = 0.0
            features[key] = counts + [pc]
    pairs = pl.read_dataset_csv(args.labels)
    x = []
    y = []
    for p in pairs:
        key = (p.cause_id, p.effect_id, p.lag)
        if key not in features:
            raise ParameterError(f"labeled tuple {key} missing from {args.features}")
        x.append(features[key])
        y.append(p.label.value)
    mask = {"counts": (0, 1, 2, 3), "counts+pc": (0, 1, 2, 3, 4), "pc": (4,)}[
        args.feature_set
    ]
    return np.asarray(x), np.asarray(y), mask


def cmd_train(args) -> int:
    x, y, mask = _load_features(args)
    model = cls.train_forest(x, y, n_trees=args.n_trees, seed=args.seed, feature_mask=mask)
    with open(args.model_out, "w") as fh:
        json.dump(model.to_dict(), fh, sort_keys=True)
        fh.write("\n")
    print(f"trained {model.n_trees} trees (hash {model.model_hash()[:12]}) -> {args.model_out}")
    return 0


def cmd_evaluate(args) -> int:
    x, y, mask = _load_features(args)
    if args.feature_set == "pc":
        roc = cls.scalar_threshold_auc(x[:, 4], y)
        payload = {"feature_set": args.feature_set, "auc": roc.auc}
    else:
        roc = cls.cross_validate(
            x, y, folds=args.folds, n_trees=args.n_trees, seed=args.seed, feature_mask=mask
        )
        payload = {
            "feature_set": args.feature_set,
            "auc": roc.auc,
            "auc_std": roc.auc_std,
            "fold_aucs": roc.fold_aucs,
        }
    pl.dump_json(args.metrics_out, payload)
    if args.roc_out:
        pl.write_roc_csv(args.roc_out, roc)
    print(f"AUC {roc.auc:.4f} -> {args.metrics_out}")
    return 0


def cmd_ablate(args) -> int:
    ns = argparse.Namespace(
        features=args.features, labels=args.labels, feature_set="counts"
    )
    x, y, _ = _load_features(ns)
    rows = cls.feature_ablation(
        x[:, :4], y, folds=args.folds, n_trees=args.n_trees, seed=args.seed
    )
    with open(args.out, "w", newline="") as fh:
        fh.write("features,auc\n")
        for names, auc in rows:
            fh.write(f"{'+'.join(names)},{auc!r}\n")
    best = max(rows, key=lambda r: r[1])
    print(f"15 subsets -> {args.out}; best {'+'.join(best[0])} at {best[1]:.4f}")
    return 0


def cmd_grid_search(args) -> int:
    config = pl.RunConfig.from_file(args.config)
    alphas = [float(v) for v in args.alphas.split(",") if v]
    taus = [int(v) for v in args.taus.split(",") if v]
    rows = pl.grid_search(alphas, taus, config)
    pl.write_grid_csv(args.out, rows)
    for r in rows:
        ratio_auc = "-" if r["ratio_auc"] is None else f"{r['ratio_auc']:.4f}"
        full_auc = "-" if r["full_auc"] is None else f"{r['full_auc']:.4f}"
        print(
            f"alpha={r['alpha']:<5} tau={r['tau']:<2} ratio_auc={ratio_auc} "
            f"full_auc={full_auc} ({r['seconds']}s)"
        )
    return 0


def cmd_report(args) -> int:
    print(pl.report(args.run))
    return 0


def cmd_run(args) -> int:
    overrides = {
        k: getattr(args, k)
        for k in ("out_dir", "alpha", "tau", "ratio", "seed", "n_trees", "thread_count")
    }
    config = pl.RunConfig.from_file(args.config, **overrides)
    if "NEXICA_THREADS" in os.environ and args.thread_count is None:
        config.thread_count = int(os.environ["NEXICA_THREADS"])
    metrics = pl.run_pipeline(config)
    print(pl.report(config.out_dir))
    return 0 if metrics else 1


if __name__ == "__main__":
    sys.exit(main())
