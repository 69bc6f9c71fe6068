import csv
import json
from datetime import datetime

import numpy as np
import pytest

from nexica.cli import main
from nexica.ingest import DriveTimeMatrix, StationMeta, SpeedSeries, write_drive_times, write_speed_csv, write_station_meta
from nexica.pipeline import RunConfig, run_pipeline
from nexica.synth import SynthSpec, write_dataset

N_SLOTS = 8 * 2016  # eight weeks keeps the median-week profile robust


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("corpus")
    spec = SynthSpec(
        n_stations=10, n_slots=N_SLOTS, p_s=0.05, seed=21,
        edges=((1, 0, 1, 0.6), (2, 0, 2, 0.7), (5, 3, 2, 0.8), (9, 8, 1, 0.5)),
    )
    paths = write_dataset(spec, tmp)
    spec_path = tmp / "spec.json"
    spec_path.write_text(json.dumps({
        "n_stations": 10, "n_slots": N_SLOTS, "p_s": 0.05, "seed": 21,
        "edges": [[1, 0, 1, 0.6], [2, 0, 2, 0.7], [5, 3, 2, 0.8], [9, 8, 1, 0.5]],
    }))
    paths["spec"] = str(spec_path)
    paths["dir"] = str(tmp)
    return paths


def make_config(corpus, out_dir, **overrides):
    cfg = {
        "speeds": corpus["speeds"], "meta": corpus["meta"],
        "drive_times": corpus["drive_times"], "out_dir": str(out_dir),
        "truth": corpus["truth"], "alpha": 0.25, "tau": 0, "l_max": 8,
        "min_completeness": 0.9, "ratio": 1, "n_trees": 30, "folds": 5,
        "seed": 3, "thread_count": 1,
    }
    cfg.update(overrides)
    return cfg


def test_synth_command_reproduces_library_output(corpus, tmp_path, capsys):
    assert main(["synth", "--spec", corpus["spec"], "--out", str(tmp_path / "again")]) == 0
    for name in ("speeds.csv", "meta.csv", "drive_times.csv", "truth.csv"):
        a = (tmp_path / "again" / name).read_bytes()
        b = open(f"{corpus['dir']}/{name}", "rb").read()
        assert a == b, name


def test_stagewise_cli_matches_pipeline(corpus, tmp_path, capsys):
    run_dir = tmp_path / "run"
    config = RunConfig(**make_config(corpus, run_dir))
    run_pipeline(config)

    events_csv = tmp_path / "events.csv"
    assert main(["events", "--speeds", corpus["speeds"], "--alpha", "0.25",
                 "--out", str(events_csv),
                 "--profile-out", str(tmp_path / "profiles.csv")]) == 0
    assert events_csv.read_bytes() == (run_dir / "events.csv").read_bytes()

    counts_csv = tmp_path / "counts.csv"
    assert main(["pairs", "--events", str(events_csv), "--slots", str(N_SLOTS),
                 "--lmax", "8", "--tau", "0", "--out", str(counts_csv)]) == 0
    assert counts_csv.read_bytes() == (run_dir / "counts.csv").read_bytes()

    mle_csv = tmp_path / "mle.csv"
    assert main(["mle", "--counts", str(counts_csv), "--out", str(mle_csv)]) == 0
    assert mle_csv.read_bytes() == (run_dir / "mle.csv").read_bytes()

    gt_csv = tmp_path / "dataset.csv"
    assert main(["ground-truth", "--meta", corpus["meta"],
                 "--drive-times", corpus["drive_times"],
                 "--lmax", "8", "--ratio", "1", "--out", str(gt_csv)]) == 0
    assert gt_csv.read_bytes() == (run_dir / "dataset.csv").read_bytes()

    with open(tmp_path / "profiles.csv") as fh:
        header = fh.readline().strip()
    assert header == "station_id,week_slot,median_speed"


def test_train_evaluate_ablate_commands(corpus, tmp_path):
    run_dir = tmp_path / "run"
    run_pipeline(RunConfig(**make_config(corpus, run_dir)))
    features = str(run_dir / "mle.csv")
    labels = str(run_dir / "dataset.csv")

    model_path = tmp_path / "model.json"
    assert main(["train", "--features", features, "--labels", labels,
                 "--n-trees", "10", "--seed", "5", "--model-out", str(model_path)]) == 0
    model = json.loads(model_path.read_text())
    assert model["n_trees"] == 10 and len(model["trees"]) == 10

    metrics_path = tmp_path / "eval.json"
    roc_path = tmp_path / "roc.csv"
    assert main(["evaluate", "--features", features, "--labels", labels,
                 "--n-trees", "10", "--seed", "5", "--folds", "5",
                 "--metrics-out", str(metrics_path), "--roc-out", str(roc_path)]) == 0
    payload = json.loads(metrics_path.read_text())
    assert 0.0 <= payload["auc"] <= 1.0
    assert len(payload["fold_aucs"]) == 5
    with open(roc_path) as fh:
        assert fh.readline().strip() == "threshold,fpr,tpr"

    assert main(["evaluate", "--features", features, "--labels", labels,
                 "--feature-set", "pc", "--metrics-out", str(tmp_path / "pc.json")]) == 0

    ablate_path = tmp_path / "ablate.csv"
    assert main(["ablate", "--features", features, "--labels", labels,
                 "--folds", "3", "--n-trees", "5", "--seed", "1",
                 "--out", str(ablate_path)]) == 0
    with open(ablate_path) as fh:
        rows = fh.read().strip().splitlines()
    assert len(rows) == 16  # header + 15 subsets


def test_run_and_report_commands(corpus, tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(make_config(corpus, tmp_path / "out")))
    assert main(["run", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    assert "forest AUC (ratio set)" in out
    assert "planted edges recovered" in out

    assert main(["report", "--run", str(tmp_path / "out")]) == 0
    assert "run summary" in capsys.readouterr().out


def test_pipeline_determinism_byte_identical(corpus, tmp_path):
    m1 = run_pipeline(RunConfig(**make_config(corpus, tmp_path / "a")))
    m2 = run_pipeline(RunConfig(**make_config(corpus, tmp_path / "b")))
    assert m1 == m2
    assert (tmp_path / "a" / "metrics.json").read_bytes() == (
        tmp_path / "b" / "metrics.json"
    ).read_bytes()


def test_parallel_sweep_matches_serial(corpus, tmp_path):
    serial = run_pipeline(RunConfig(**make_config(corpus, tmp_path / "s", thread_count=1)))
    parallel = run_pipeline(RunConfig(**make_config(corpus, tmp_path / "p", thread_count=4)))
    assert (tmp_path / "s" / "metrics.json").read_bytes() == (
        tmp_path / "p" / "metrics.json"
    ).read_bytes()
    assert (tmp_path / "s" / "counts.csv").read_bytes() == (
        tmp_path / "p" / "counts.csv"
    ).read_bytes()


def test_grid_search_single_cell_matches_run(corpus, tmp_path, capsys):
    out = tmp_path / "base"
    metrics = run_pipeline(RunConfig(**make_config(corpus, out)))
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(make_config(corpus, tmp_path / "grid_out")))
    grid_csv = tmp_path / "grid.csv"
    assert main(["grid-search", "--config", str(cfg_path), "--alphas", "0.25",
                 "--taus", "0", "--out", str(grid_csv)]) == 0
    with open(grid_csv) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert float(rows[0]["ratio_auc"]) == metrics["classifier"]["ratio_forest"]["auc"]
    assert float(rows[0]["full_auc"]) == metrics["classifier"]["full_forest"]["auc"]


def test_missing_input_exits_nonzero(tmp_path, capsys):
    rc = main(["events", "--speeds", str(tmp_path / "nope.csv"),
               "--alpha", "0.25", "--out", str(tmp_path / "x.csv")])
    assert rc == 1
    assert "nexica: events:" in capsys.readouterr().err


def test_report_incomplete_dir(tmp_path, capsys):
    rc = main(["report", "--run", str(tmp_path)])
    assert rc == 1
    err = capsys.readouterr().err
    assert "metrics.json" in err and "config.json" in err


def test_run_without_positives_skips_evaluation(tmp_path, capsys):
    # four stations, each on its own road and direction: every tuple is
    # an immediate negative and no ground-truth positives exist
    start = datetime(2024, 1, 1)
    n = 2 * 2016
    series = []
    meta = []
    roads = [("I-5", "N"), ("I-10", "E"), ("CA-1", "S"), ("US-101", "W")]
    rng = np.random.default_rng(0)
    for k, (road, d) in enumerate(roads):
        speeds = 60.0 + rng.normal(0, 1, n).clip(-5, 5)
        series.append(SpeedSeries(f"s{k}", start, speeds, np.zeros(n, dtype=bool)))
        meta.append(StationMeta(f"s{k}", road, d, 0.0, float(k), ""))
    minutes = rng.uniform(60, 200, (4, 4))
    np.fill_diagonal(minutes, 0.0)
    write_speed_csv(tmp_path / "speeds.csv", series)
    write_station_meta(tmp_path / "meta.csv", meta)
    write_drive_times(tmp_path / "drive.csv", DriveTimeMatrix([m.station_id for m in meta], minutes))

    config = RunConfig(
        speeds=str(tmp_path / "speeds.csv"), meta=str(tmp_path / "meta.csv"),
        drive_times=str(tmp_path / "drive.csv"), out_dir=str(tmp_path / "out"),
        n_trees=5, seed=0,
    )
    metrics = run_pipeline(config)
    assert metrics["ground_truth"]["positives"] == 0
    assert "skipped_reason" in metrics["classifier"]
    assert main(["report", "--run", str(tmp_path / "out")]) == 0
    assert "evaluation skipped" in capsys.readouterr().out


def test_misaligned_stations_fail_with_stage_name(tmp_path):
    start = datetime(2024, 1, 1)
    s1 = SpeedSeries("a", start, np.full(2016, 60.0), np.zeros(2016, dtype=bool))
    s2 = SpeedSeries("b", start, np.full(2020, 60.0), np.zeros(2020, dtype=bool))
    write_speed_csv(tmp_path / "speeds.csv", [s1, s2])
    write_station_meta(tmp_path / "meta.csv", [
        StationMeta("a", "I-5", "N", 0.0, 0.0, ""),
        StationMeta("b", "I-5", "N", 0.0, 0.1, ""),
    ])
    write_drive_times(tmp_path / "drive.csv", DriveTimeMatrix(
        ["a", "b"], np.array([[0.0, 5.0], [7.0, 0.0]])
    ))
    config = RunConfig(
        speeds=str(tmp_path / "speeds.csv"), meta=str(tmp_path / "meta.csv"),
        drive_times=str(tmp_path / "drive.csv"), out_dir=str(tmp_path / "out"),
    )
    from nexica.errors import StageError

    with pytest.raises(StageError, match="ingest"):
        run_pipeline(config)
