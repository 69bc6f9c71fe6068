import numpy as np
import pytest

from nexica.errors import ParameterError
from nexica.groundtruth import (
    RULE_CROSS,
    RULE_DISTANT,
    RULE_OFF_LAG,
    RULE_POSITIVE,
    DatasetSpec,
    FlowDirection,
    Label,
    LabeledPair,
    build_dataset,
    expected_lags,
    flow_direction,
    full_dataset,
    label_pairs,
)
from nexica.ingest import DriveTimeMatrix, StationMeta

SPEC = DatasetSpec()


def matrix_2(d_ab, d_ba):
    return DriveTimeMatrix(["a", "b"], np.array([[0.0, d_ab], [d_ba, 0.0]]))


def test_flow_direction_cases():
    assert flow_direction("a", "b", matrix_2(10, 12)) is FlowDirection.FLOWS_I_TO_J
    assert flow_direction("a", "b", matrix_2(12, 10)) is FlowDirection.FLOWS_J_TO_I
    assert flow_direction("a", "b", matrix_2(10, 10)) is FlowDirection.AMBIGUOUS


def test_expected_lags_ten_kilometer_example():
    # 6 minutes of free-flow drive at 100 kph is 10 km; congestion at
    # 20 kph needs 30 minutes, a lag of six, widened by one.
    assert expected_lags(6.0, SPEC) == {6, 7}


def test_expected_lags_beyond_max_is_empty():
    assert expected_lags(9.0, SPEC) == set()
    assert expected_lags(8.0, SPEC) == {8}


def test_expected_lags_adjacent_clamps_to_one():
    assert expected_lags(0.0, SPEC) == {1}
    assert expected_lags(0.2, SPEC) == {1}


def test_expected_lags_rounds_half_up():
    assert expected_lags(2.5, SPEC) == {3, 4}
    assert expected_lags(2.4, SPEC) == {2, 3}


def test_expected_lags_negative_drive_time():
    with pytest.raises(ParameterError):
        expected_lags(-1.0, SPEC)


def test_dataset_spec_validation():
    with pytest.raises(ParameterError):
        DatasetSpec(ratio=0)
    with pytest.raises(ParameterError):
        DatasetSpec(l_max=0)
    with pytest.raises(ParameterError):
        DatasetSpec(propagation_speed_kph=0)


def test_labeled_pair_validation():
    with pytest.raises(ParameterError):
        LabeledPair("a", "a", 1, Label.POSITIVE, RULE_POSITIVE, 1.0)
    with pytest.raises(ParameterError):
        LabeledPair("a", "b", 0, Label.NEGATIVE, RULE_OFF_LAG, 1.0)


def _line_meta_and_matrix():
    """Three stations on one road; traffic flows a -> b -> c, one
    free-flow minute apart, return drives longer."""
    meta = [
        StationMeta("a", "I-5", "N", 0.0, 0.0, ""),
        StationMeta("b", "I-5", "N", 0.0, 0.01, ""),
        StationMeta("c", "I-5", "N", 0.0, 0.02, ""),
    ]
    minutes = np.array(
        [
            [0.0, 1.0, 2.0],
            [1.5, 0.0, 1.0],
            [3.0, 1.5, 0.0],
        ]
    )
    return meta, DriveTimeMatrix(["a", "b", "c"], minutes)


def test_label_pairs_on_a_single_road():
    meta, matrix = _line_meta_and_matrix()
    truth = label_pairs(meta, matrix, SPEC)
    assert len(truth.labeled) + len(truth.pool) == 3 * 2 * SPEC.l_max

    by_tuple = {(p.cause_id, p.effect_id, p.lag): p for p in truth.labeled}
    # b is downstream of a: cause b, effect a, expected lags from D[a][b]=1.0
    assert by_tuple[("b", "a", 1)].label is Label.POSITIVE
    assert by_tuple[("b", "a", 2)].label is Label.POSITIVE
    assert by_tuple[("b", "a", 3)].label is Label.NEGATIVE
    assert by_tuple[("b", "a", 3)].rule == RULE_OFF_LAG
    # c is two stations downstream of a: D[a][c]=2.0 so lags {2,3}
    assert by_tuple[("c", "a", 2)].label is Label.POSITIVE
    assert by_tuple[("c", "a", 1)].label is Label.NEGATIVE
    # upstream direction never qualifies: (a, b, *) sits in the pool
    pool_tuples = {(c, e, lag) for c, e, lag, _ in truth.pool}
    assert ("a", "b", 1) in pool_tuples
    assert ("a", "c", 1) in pool_tuples


def test_cross_road_and_direction_negative_at_every_lag():
    meta = [
        StationMeta("a", "I-5", "N", 0.0, 0.0, ""),
        StationMeta("b", "I-105", "E", 0.0, 0.01, ""),
    ]
    matrix = matrix_2(120.0, 130.0)
    truth = label_pairs(meta, matrix, SPEC)
    assert len(truth.labeled) == 2 * SPEC.l_max
    assert all(p.label is Label.NEGATIVE and p.rule == RULE_CROSS for p in truth.labeled)
    assert truth.pool == []


def test_rubbernecking_and_same_direction_cross_road_stay_unlabeled():
    meta = [
        StationMeta("a", "I-5", "N", 0.0, 0.0, ""),
        StationMeta("b", "I-5", "S", 0.0, 0.01, ""),   # same road, other direction
        StationMeta("c", "I-105", "N", 0.0, 0.02, ""),  # other road, same direction
    ]
    minutes = np.array([[0.0, 5.0, 6.0], [7.0, 0.0, 8.0], [9.0, 10.0, 0.0]])
    truth = label_pairs(meta, DriveTimeMatrix(["a", "b", "c"], minutes), SPEC)
    labeled_pairs = {(p.cause_id, p.effect_id) for p in truth.labeled}
    assert ("a", "b") not in labeled_pairs  # rubbernecking: pool only
    assert ("a", "c") not in labeled_pairs  # same direction, different road: pool
    pool_pairs = {(c, e) for c, e, _, _ in truth.pool}
    assert {("a", "b"), ("b", "a"), ("a", "c"), ("c", "a")} <= pool_pairs


def test_ambiguous_flow_excluded_from_positives():
    meta = [
        StationMeta("a", "I-5", "N", 0.0, 0.0, ""),
        StationMeta("b", "I-5", "N", 0.0, 0.01, ""),
    ]
    truth = label_pairs(meta, matrix_2(2.0, 2.0), SPEC)
    assert truth.labeled == []
    assert len(truth.pool) == 2 * SPEC.l_max


def test_candidate_count_formula():
    rng = np.random.default_rng(2)
    for n, l_max in ((3, 2), (5, 8), (8, 4)):
        meta = [
            StationMeta(
                f"s{k}",
                rng.choice(["I-5", "I-105"]),
                rng.choice(["N", "S", "E", "W"]),
                0.0, float(k), "",
            )
            for k in range(n)
        ]
        minutes = rng.uniform(1, 200, (n, n))
        np.fill_diagonal(minutes, 0.0)
        truth = label_pairs(meta, DriveTimeMatrix([m.station_id for m in meta], minutes),
                            DatasetSpec(l_max=l_max))
        assert len(truth.labeled) + len(truth.pool) == n * (n - 1) * l_max


def test_positives_respect_every_rule():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = 6
        meta = [
            StationMeta(
                f"s{k}",
                str(rng.choice(["I-5", "I-105"])),
                str(rng.choice(["N", "S"])),
                0.0, float(k), "",
            )
            for k in range(n)
        ]
        minutes = rng.uniform(0.5, 30, (n, n))
        np.fill_diagonal(minutes, 0.0)
        matrix = DriveTimeMatrix([m.station_id for m in meta], minutes)
        truth = label_pairs(meta, matrix, SPEC)
        by_id = {m.station_id: m for m in meta}
        seen = set()
        for p in truth.labeled:
            key = (p.cause_id, p.effect_id, p.lag)
            assert key not in seen  # never both positive and negative
            seen.add(key)
            if p.label is Label.POSITIVE:
                cause, effect = by_id[p.cause_id], by_id[p.effect_id]
                assert cause.road == effect.road
                assert cause.direction == effect.direction
                assert p.lag >= 1
                assert flow_direction(p.effect_id, p.cause_id, matrix) is FlowDirection.FLOWS_I_TO_J
                assert p.lag in expected_lags(matrix.get(p.effect_id, p.cause_id), SPEC)


def _toy_truth(n_pos=3, pool=10):
    labeled = [
        LabeledPair(f"p{k}", "x", 1, Label.POSITIVE, RULE_POSITIVE, 1.0)
        for k in range(n_pos)
    ]
    pool_rows = [
        (f"n{k}", "x", 1, float(100 - k)) for k in range(pool)
    ]
    from nexica.groundtruth import GroundTruth

    return GroundTruth(labeled, pool_rows)


def test_build_dataset_counts_and_prefix():
    truth = _toy_truth(n_pos=3, pool=10)
    ds = build_dataset(truth, ratio=2)
    assert len(ds.positives()) == 3
    negatives = ds.negatives()
    assert len(negatives) == 6
    assert [n.cause_id for n in negatives] == [f"n{k}" for k in range(6)]
    assert ds.min_negative_drive_time == 95.0
    assert all(n.rule == RULE_DISTANT for n in negatives)

    ds1 = build_dataset(truth, ratio=1)
    assert {(n.cause_id, n.lag) for n in ds1.negatives()} <= {
        (n.cause_id, n.lag) for n in negatives
    }


def test_build_dataset_pool_exhausted_takes_all():
    truth = _toy_truth(n_pos=5, pool=4)
    ds = build_dataset(truth, ratio=2)
    assert len(ds.negatives()) == 4


def test_full_dataset_includes_everything():
    truth = _toy_truth(n_pos=3, pool=10)
    truth.labeled.append(LabeledPair("z", "x", 2, Label.NEGATIVE, RULE_CROSS, 200.0))
    ds = full_dataset(truth)
    assert len(ds.pairs) == 3 + 1 + 10
    assert len(ds.negatives()) == 11
    assert ds.min_negative_drive_time == 91.0
