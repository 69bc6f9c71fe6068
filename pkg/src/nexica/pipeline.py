"""End-to-end orchestration: events -> counts -> MLE -> labels -> classifier.

Every stage writes a plain CSV so any stage can be re-run from the
previous stage's output.  ``metrics.json`` contains only deterministic
content (identical config and seed give byte-identical bytes); wall
times go to ``timings.json``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classify as cls
from .correspond import CorrespondenceCounts, count_from_indices
from .errors import ConsistencyError, NexicaError, ParameterError, StageError
from .events import EventSeries, extract_events, median_week_profile
from .groundtruth import (
    DatasetSpec,
    GroundTruthDataset,
    Label,
    LabeledPair,
    build_dataset,
    full_dataset,
    label_pairs,
)
from .ingest import (
    SpeedSeries,
    filter_stations,
    load_drive_times,
    load_speed_csv,
    load_station_meta,
)
from .mle import CausalCase, CausalEstimate, estimate

log = logging.getLogger(__name__)

TOP_K_EDGES = 50


@dataclass
class RunConfig:
    """Flat, file-backed configuration for a full pipeline run.

    A config file is a flat JSON object with these exact keys; CLI flags
    override file values.  ``thread_count`` can also be overridden with
    the ``NEXICA_THREADS`` environment variable.
    """

    speeds: str = ""
    meta: str = ""
    drive_times: str = ""
    out_dir: str = ""
    truth: str | None = None
    alpha: float = 0.25
    tau: int = 0
    l_max: int = 8
    min_completeness: float = 0.9
    ratio: int = 1
    n_trees: int = 1000
    folds: int = 5
    seed: int = 0
    thread_count: int = 1
    full_dataset_cv: bool = True

    @classmethod
    def from_file(cls, path, **overrides) -> "RunConfig":
        with open(path) as fh:
            raw = json.load(fh)
        unknown = set(raw) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)

    def validated(self) -> "RunConfig":
        for key in ("speeds", "meta", "drive_times"):
            path = getattr(self, key)
            if not path or not os.path.exists(path):
                raise ParameterError(f"config.{key}: path {path!r} does not exist")
        if not self.out_dir:
            raise ParameterError("config.out_dir is required")
        if self.thread_count < 1:
            raise ParameterError("thread_count must be >= 1")
        return self


@dataclass
class SweepTable:
    """Counts and estimates for every swept (cause, effect, lag) tuple."""

    tuples: list[tuple[str, str, int]]
    counts: np.ndarray  # (n, 4) int64 columns a00, a01, a10, a11
    windows: np.ndarray
    estimates: list[CausalEstimate]
    tau: int

    def index(self) -> dict[tuple[str, str, int], int]:
        return {t: k for k, t in enumerate(self.tuples)}

    def feature_matrix(self) -> np.ndarray:
        """Columns a00, a01, a10, a11, p_c; undefined p_c maps to 0."""
        pc = np.array(
            [0.0 if math.isnan(e.p_c) else e.p_c for e in self.estimates]
        )
        return np.column_stack([self.counts.astype(np.float64), pc])

    def case_tally(self) -> dict[str, int]:
        tally = {c.value: 0 for c in CausalCase}
        for e in self.estimates:
            tally[e.case.value] += 1
        return tally


# ---------------------------------------------------------------------------
# sweep

_SWEEP_STATE: dict = {}


def _sweep_worker(i: int) -> list[tuple[int, int, int, int, int, int, int, int]]:
    idx = _SWEEP_STATE["idx"]
    m = _SWEEP_STATE["m"]
    l_max = _SWEEP_STATE["l_max"]
    tau = _SWEEP_STATE["tau"]
    rows = []
    for j in range(len(idx)):
        if j == i:
            continue
        for lag in range(1, l_max + 1):
            c = count_from_indices(idx[i], idx[j], m, lag, tau)
            rows.append((i, j, lag, c.a00, c.a01, c.a10, c.a11, c.window))
    return rows


def sweep(
    series: list[EventSeries], l_max: int, tau: int = 0, workers: int = 1
) -> SweepTable:
    """Counts plus MLE for all ordered pairs at lags 1..l_max.

    Workers fan out over cause stations; results are assembled in a fixed
    order so the output is identical however many workers run.
    """
    lengths = {len(s) for s in series}
    if len(lengths) != 1:
        raise ConsistencyError(f"event series lengths differ: {sorted(lengths)}")
    m = lengths.pop()
    idx = [s.event_indices() for s in series]
    global _SWEEP_STATE
    _SWEEP_STATE = {"idx": idx, "m": m, "l_max": l_max, "tau": tau}
    n = len(series)
    try:
        if workers > 1 and _fork_available():
            with ProcessPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(_sweep_worker, range(n), chunksize=1))
        else:
            chunks = [_sweep_worker(i) for i in range(n)]
    finally:
        _SWEEP_STATE = {}

    tuples = []
    counts = []
    windows = []
    estimates = []
    for rows in chunks:
        for i, j, lag, a00, a01, a10, a11, window in rows:
            tuples.append((series[i].station_id, series[j].station_id, lag))
            counts.append((a00, a01, a10, a11))
            windows.append(window)
            estimates.append(
                estimate(CorrespondenceCounts(a00, a01, a10, a11, lag, tau, window))
            )
    return SweepTable(
        tuples,
        np.asarray(counts, dtype=np.int64).reshape(-1, 4),
        np.asarray(windows, dtype=np.int64),
        estimates,
        tau,
    )


def _fork_available() -> bool:
    import multiprocessing

    return "fork" in multiprocessing.get_all_start_methods()


# ---------------------------------------------------------------------------
# stage artifacts

def write_events_csv(path, series: list[EventSeries]) -> None:
    """One row per detected event (sparse); pair counting needs the slot
    count separately since trailing slots may hold no events."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "slot_index", "event"])
        for s in series:
            for j in s.event_indices().tolist():
                writer.writerow([s.station_id, j, 1])


def read_events_csv(path, n_slots: int) -> list[EventSeries]:
    by_station: dict[str, list[int]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if not row:
                continue
            if int(row[2]):
                by_station.setdefault(row[0], []).append(int(row[1]))
    out = []
    for sid in sorted(by_station):
        ev = np.zeros(n_slots, dtype=bool)
        ev[np.asarray(by_station[sid], dtype=np.int64)] = True
        out.append(EventSeries(sid, ev, ev, math.nan))
    return out


def write_profiles_csv(path, series: list[SpeedSeries]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station_id", "week_slot", "median_speed"])
        for s in series:
            profile = median_week_profile(s)
            for k, v in enumerate(profile.medians.tolist()):
                writer.writerow([s.station_id, k, "" if math.isnan(v) else repr(v)])


def write_counts_csv(path, table: SweepTable) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cause", "effect", "lag", "a00", "a01", "a10", "a11"])
        for (cuz, eff, lag), row in zip(table.tuples, table.counts.tolist()):
            writer.writerow([cuz, eff, lag, *row])


def read_counts_csv(path, tau: int = 0) -> list[tuple[str, str, int, CorrespondenceCounts]]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:7] != ["cause", "effect", "lag", "a00", "a01", "a10", "a11"]:
            raise ParameterError(f"{path}: unexpected counts header")
        for row in reader:
            if not row:
                continue
            lag = int(row[2])
            a = [int(v) for v in row[3:7]]
            out.append(
                (row[0], row[1], lag, CorrespondenceCounts.from_counts(*a, lag=lag, tau=tau))
            )
    return out


def write_mle_rows(path, rows) -> None:
    """``rows`` yields (cause, effect, lag, counts, estimate) tuples."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["cause", "effect", "lag", "a00", "a01", "a10", "a11",
             "p_s", "p_c", "p_c_raw", "loglik", "case"]
        )
        for cuz, eff, lag, counts, est in rows:
            writer.writerow(
                [cuz, eff, lag, counts.a00, counts.a01, counts.a10, counts.a11,
                 repr(est.p_s), repr(est.p_c), repr(est.p_c_raw),
                 repr(est.log_likelihood), est.case.value]
            )


def write_mle_csv(path, table: SweepTable) -> None:
    def rows():
        for (cuz, eff, lag), row, est in zip(
            table.tuples, table.counts.tolist(), table.estimates
        ):
            yield cuz, eff, lag, CorrespondenceCounts(*row, lag, table.tau, sum(row)), est

    write_mle_rows(path, rows())


def write_dataset_csv(path, dataset: GroundTruthDataset) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cause", "effect", "lag", "label", "rule", "drive_time"])
        for p in dataset.pairs:
            writer.writerow(
                [p.cause_id, p.effect_id, p.lag, p.label.value, p.rule, repr(p.drive_time)]
            )


def read_dataset_csv(path) -> list[LabeledPair]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["cause", "effect", "lag", "label", "rule", "drive_time"]:
            raise ParameterError(f"{path}: unexpected dataset header")
        for row in reader:
            if not row:
                continue
            out.append(
                LabeledPair(
                    row[0], row[1], int(row[2]), Label(int(row[3])), row[4], float(row[5])
                )
            )
    return out


def write_roc_csv(path, roc: cls.RocResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "fpr", "tpr"])
        writer.writerow(["", repr(0.0), repr(0.0)])
        for t, f, r in zip(roc.thresholds.tolist(), roc.fpr[1:].tolist(), roc.tpr[1:].tolist()):
            writer.writerow([repr(t), repr(f), repr(r)])


def dump_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# feature assembly

def dataset_features(
    table: SweepTable, pairs: list[LabeledPair]
) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix (a00, a01, a10, a11, p_c) and labels for a dataset."""
    index = table.index()
    matrix = table.feature_matrix()
    rows = []
    labels = []
    for p in pairs:
        key = (p.cause_id, p.effect_id, p.lag)
        if key not in index:
            raise ConsistencyError(f"dataset tuple {key} was not swept")
        rows.append(index[key])
        labels.append(p.label.value)
    return matrix[np.asarray(rows, dtype=np.int64)], np.asarray(labels, dtype=np.int8)


COUNT_MASK = (0, 1, 2, 3)
PC_COLUMN = 4


# ---------------------------------------------------------------------------
# the run itself

def run_pipeline(config: RunConfig) -> dict:
    """Execute every stage, write artifacts, and return the metrics dict."""
    config = config.validated()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}

    def staged(name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except NexicaError as exc:
            raise StageError(name, str(exc)) from exc
        timings[name] = time.perf_counter() - t0
        return result

    speeds, meta, matrix = staged("ingest", _ingest, config)
    event_series = staged(
        "events", lambda: [extract_events(s, config.alpha) for s in speeds]
    )
    staged("events-write", write_events_csv, out / "events.csv", event_series)
    table = staged(
        "sweep", sweep, event_series, config.l_max, config.tau, config.thread_count
    )
    staged("counts-write", write_counts_csv, out / "counts.csv", table)
    staged("mle-write", write_mle_csv, out / "mle.csv", table)

    spec = DatasetSpec(ratio=config.ratio, l_max=config.l_max)
    truth = staged("ground-truth", label_pairs, meta, matrix, spec)
    ratio_set = build_dataset(truth, config.ratio)
    full_set = full_dataset(truth)
    staged("dataset-write", write_dataset_csv, out / "dataset.csv", ratio_set)
    write_dataset_csv(out / "dataset_full.csv", full_set)

    metrics = {
        "config": {
            "alpha": config.alpha, "tau": config.tau, "l_max": config.l_max,
            "min_completeness": config.min_completeness, "ratio": config.ratio,
            "n_trees": config.n_trees, "folds": config.folds, "seed": config.seed,
        },
        "n_stations": len(speeds),
        "n_slots": len(speeds[0]) if speeds else 0,
        "n_tuples": len(table.tuples),
        "mle_cases": table.case_tally(),
        "diagnostics": {"corr_a01_a10": _corr_a01_a10(table)},
        "ground_truth": {
            "positives": len(truth.positives()),
            "immediate_negatives": len(truth.negatives()),
            "pool": len(truth.pool),
            "ratio_dataset_size": len(ratio_set.pairs),
            "full_dataset_size": len(full_set.pairs),
            "min_negative_drive_time": ratio_set.min_negative_drive_time,
        },
    }

    classifier = staged("classify", _classify, config, table, ratio_set, full_set, out)
    metrics["classifier"] = classifier

    dump_json(out / "metrics.json", metrics)
    dump_json(out / "config.json", dataclasses.asdict(config))
    dump_json(out / "timings.json", {k: round(v, 6) for k, v in timings.items()})
    return metrics


def _corr_a01_a10(table: SweepTable) -> float | None:
    """Correlation of the two single-sided counts across the sweep.

    Reported as a diagnostic only: it is a property of the dataset, not
    an invariant of the method.
    """
    if len(table.tuples) < 2:
        return None
    a01 = table.counts[:, 1].astype(np.float64)
    a10 = table.counts[:, 2].astype(np.float64)
    if a01.std() == 0 or a10.std() == 0:
        return None
    return float(np.corrcoef(a01, a10)[0, 1])


def _ingest(config: RunConfig):
    series = load_speed_csv(config.speeds)
    meta = load_station_meta(config.meta)
    matrix = load_drive_times(config.drive_times)
    series, meta = filter_stations(series, meta, config.min_completeness)
    kept_series = []
    kept_ids = set()
    for s in series:
        if s.station_id not in matrix:
            log.warning("station %s missing from drive-time matrix; excluded", s.station_id)
            continue
        kept_series.append(s)
        kept_ids.add(s.station_id)
    meta = [m for m in meta if m.station_id in kept_ids]
    if not kept_series:
        raise ConsistencyError("no stations survived filtering")
    starts = {s.start_time for s in kept_series}
    lengths = {len(s) for s in kept_series}
    if len(starts) > 1 or len(lengths) > 1:
        raise ConsistencyError(
            "stations are not aligned on a common grid: "
            f"starts={sorted(t.isoformat() for t in starts)}, lengths={sorted(lengths)}"
        )
    kept_series.sort(key=lambda s: s.station_id)
    meta.sort(key=lambda m: m.station_id)
    return kept_series, meta, matrix


def _classify(config, table, ratio_set, full_set, out: Path):
    y_counts = [p.label.value for p in ratio_set.pairs]
    n_pos = sum(y_counts)
    n_neg = len(y_counts) - n_pos
    if n_pos < config.folds or n_neg < config.folds:
        return {
            "skipped_reason": (
                f"need at least {config.folds} samples per class for "
                f"{config.folds}-fold evaluation (got {n_pos} positive, {n_neg} negative)"
            )
        }

    x_ratio, y_ratio = dataset_features(table, ratio_set.pairs)
    ratio_cv = cls.cross_validate(
        x_ratio, y_ratio, folds=config.folds, n_trees=config.n_trees,
        seed=config.seed, feature_mask=COUNT_MASK,
    )
    write_roc_csv(out / "roc_ratio.csv", ratio_cv)
    scalar = cls.scalar_threshold_auc(x_ratio[:, PC_COLUMN], y_ratio)

    result = {
        "ratio_forest": {
            "auc": ratio_cv.auc,
            "auc_std": ratio_cv.auc_std,
            "fold_aucs": ratio_cv.fold_aucs,
        },
        "ratio_scalar_pc": {"auc": scalar.auc},
    }

    if config.full_dataset_cv:
        x_full, y_full = dataset_features(table, full_set.pairs)
        if int(y_full.sum()) >= config.folds and int((1 - y_full).sum()) >= config.folds:
            full_cv = cls.cross_validate(
                x_full, y_full, folds=config.folds, n_trees=config.n_trees,
                seed=config.seed, feature_mask=COUNT_MASK,
            )
            write_roc_csv(out / "roc_full.csv", full_cv)
            result["full_forest"] = {
                "auc": full_cv.auc,
                "auc_std": full_cv.auc_std,
                "fold_aucs": full_cv.fold_aucs,
            }

    model = cls.train_forest(
        x_ratio, y_ratio, n_trees=config.n_trees, seed=config.seed, feature_mask=COUNT_MASK
    )
    matrix = table.feature_matrix()
    scores = cls.predict_proba(model, matrix)
    # break score ties (forests saturate at 1.0) by estimated causal probability
    top = np.lexsort((-matrix[:, PC_COLUMN], -scores))[:TOP_K_EDGES]
    with open(out / "topk_edges.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cause", "effect", "lag", "p_forest", "p_c", "p_s"])
        for k in top.tolist():
            cuz, eff, lag = table.tuples[k]
            est = table.estimates[k]
            writer.writerow(
                [cuz, eff, lag, repr(float(scores[k])), repr(est.p_c), repr(est.p_s)]
            )
    result["model_hash"] = model.model_hash()
    return result


# ---------------------------------------------------------------------------
# grid search

def grid_search(
    alpha_values: list[float], tau_values: list[int], config: RunConfig
) -> list[dict]:
    """Re-run events -> counts -> features -> CV for every (alpha, tau).

    Ground-truth labels do not depend on alpha or tau, so they are built
    once.  Each row reports the ratio'd-set AUC ("balanced" at ratio 1),
    the full-set AUC, and the cell's wall time.
    """
    if not alpha_values or not tau_values:
        raise ParameterError("alpha and tau value lists must be nonempty")
    config = config.validated()
    speeds, meta, matrix = _ingest(config)
    spec = DatasetSpec(ratio=config.ratio, l_max=config.l_max)
    truth = label_pairs(meta, matrix, spec)
    ratio_set = build_dataset(truth, config.ratio)
    full_set = full_dataset(truth)

    rows = []
    for alpha in alpha_values:
        event_series = [extract_events(s, alpha) for s in speeds]
        for tau in tau_values:
            t0 = time.perf_counter()
            table = sweep(event_series, config.l_max, tau, config.thread_count)
            row = {"alpha": alpha, "tau": tau, "ratio_auc": None, "full_auc": None}
            x, y = dataset_features(table, ratio_set.pairs)
            if int(y.sum()) >= config.folds and int((1 - y).sum()) >= config.folds:
                row["ratio_auc"] = cls.cross_validate(
                    x, y, folds=config.folds, n_trees=config.n_trees,
                    seed=config.seed, feature_mask=COUNT_MASK,
                ).auc
            xf, yf = dataset_features(table, full_set.pairs)
            if int(yf.sum()) >= config.folds and int((1 - yf).sum()) >= config.folds:
                row["full_auc"] = cls.cross_validate(
                    xf, yf, folds=config.folds, n_trees=config.n_trees,
                    seed=config.seed, feature_mask=COUNT_MASK,
                ).auc
            row["seconds"] = round(time.perf_counter() - t0, 3)
            rows.append(row)
    return rows


def write_grid_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "tau", "ratio_auc", "full_auc", "seconds"])
        for r in rows:
            writer.writerow(
                [r["alpha"], r["tau"],
                 "" if r["ratio_auc"] is None else repr(r["ratio_auc"]),
                 "" if r["full_auc"] is None else repr(r["full_auc"]),
                 r["seconds"]]
            )


# ---------------------------------------------------------------------------
# report

def report(run_dir) -> str:
    """Human-readable summary of a completed run directory."""
    run = Path(run_dir)
    missing = [
        name for name in ("metrics.json", "config.json") if not (run / name).exists()
    ]
    if missing:
        raise ParameterError(f"incomplete run dir {run}: missing {', '.join(missing)}")
    with open(run / "metrics.json") as fh:
        metrics = json.load(fh)
    with open(run / "config.json") as fh:
        config = json.load(fh)

    lines = [f"run summary: {run}"]
    lines.append(
        f"  stations={metrics['n_stations']}  slots={metrics['n_slots']}  "
        f"tuples={metrics['n_tuples']}"
    )
    c = metrics["config"]
    lines.append(
        f"  alpha={c['alpha']}  tau={c['tau']}  l_max={c['l_max']}  "
        f"ratio=1:{c['ratio']}  trees={c['n_trees']}  folds={c['folds']}  seed={c['seed']}"
    )
    cases = metrics["mle_cases"]
    lines.append(
        "  mle cases: "
        + "  ".join(f"{k}={v}" for k, v in sorted(cases.items()))
    )
    gt = metrics["ground_truth"]
    lines.append(
        f"  ground truth: positives={gt['positives']}  "
        f"immediate_negatives={gt['immediate_negatives']}  pool={gt['pool']}"
    )
    lines.append(
        f"  ratio dataset: n={gt['ratio_dataset_size']}  "
        f"min negative drive time={gt['min_negative_drive_time']:.1f} min"
    )
    clf = metrics.get("classifier") or {}
    if "skipped_reason" in clf or not clf:
        lines.append(
            "  evaluation skipped: " + clf.get("skipped_reason", "no classifier results")
        )
    else:
        rf = clf["ratio_forest"]
        lines.append(
            f"  forest AUC (ratio set): {rf['auc']:.4f} +/- {rf['auc_std']:.4f}"
        )
        lines.append(
            f"  scalar p_c AUC (ratio set): {clf['ratio_scalar_pc']['auc']:.4f}"
        )
        if "full_forest" in clf:
            ff = clf["full_forest"]
            lines.append(
                f"  forest AUC (full set): {ff['auc']:.4f} +/- {ff['auc_std']:.4f}"
            )
        top_path = run / "topk_edges.csv"
        if top_path.exists():
            lines.append("  top edges by forest score:")
            with open(top_path, newline="") as fh:
                reader = csv.reader(fh)
                next(reader)
                for row in list(reader)[:10]:
                    lines.append(
                        f"    {row[0]} -> {row[1]} @lag {row[2]}: "
                        f"p_forest={float(row[3]):.3f}  p_c={float(row[4]):.3f}"
                    )
            truth_path = config.get("truth")
            if truth_path and os.path.exists(truth_path):
                lines.extend(_planted_comparison(truth_path, top_path, run / "mle.csv"))
    return "\n".join(lines)


def _planted_comparison(truth_path: str, top_path: Path, mle_path: Path) -> list[str]:
    planted = set()
    with open(truth_path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if row:
                planted.add((row[0], row[1], int(row[2])))
    k = max(len(planted), 1)
    ranked = []
    with open(top_path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if row:
                ranked.append((row[0], row[1], int(row[2])))
    forest_hits = sum(1 for t in ranked[:k] if t in planted)
    lines = [
        f"  planted edges recovered in top {k} by forest score: "
        f"{forest_hits} of {len(planted)}"
    ]
    if mle_path.exists():
        by_pc = []
        with open(mle_path, newline="") as fh:
            for row in csv.DictReader(fh):
                pc = float(row["p_c"])
                if pc == pc:
                    by_pc.append((pc, (row["cause"], row["effect"], int(row["lag"]))))
        by_pc.sort(key=lambda t: -t[0])
        pc_hits = sum(1 for _, t in by_pc[:k] if t in planted)
        lines.append(
            f"  planted edges recovered in top {k} by estimated p_c: "
            f"{pc_hits} of {len(planted)}"
        )
    return lines
