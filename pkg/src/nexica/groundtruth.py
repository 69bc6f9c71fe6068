"""Rule-derived ground-truth labels for candidate (cause, effect, lag) tuples.

Positives are chosen conservatively: both stations on the same road and
direction, the cause downstream of the effect (congestion propagates
upstream, against travel), and the lag inside the window implied by the
free-flow drive time between them and the congestion propagation speed.
Pairs differing in both road and direction are immediate negatives at
every lag, as are qualifying pairs at lags outside their expected window.
Everything else lands in an unlabeled pool, sorted by descending drive
time; ratio'd datasets draw their negatives from the far end of that
pool, where a causal connection is least plausible.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .errors import ParameterError
from .ingest import SLOT_MINUTES, DriveTimeMatrix, StationMeta

log = logging.getLogger(__name__)

RULE_POSITIVE = "upstream-propagation"
RULE_CROSS = "cross-road-direction"
RULE_OFF_LAG = "off-expected-lag"
RULE_DISTANT = "distant-pool"
RULE_RESIDUAL = "residual-pool"


class FlowDirection(enum.Enum):
    FLOWS_I_TO_J = "i_to_j"
    FLOWS_J_TO_I = "j_to_i"
    AMBIGUOUS = "ambiguous"


class Label(enum.Enum):
    POSITIVE = 1
    NEGATIVE = 0


@dataclass(frozen=True)
class LabeledPair:
    """One labeled candidate tuple with the rule that produced the label."""

    cause_id: str
    effect_id: str
    lag: int
    label: Label
    rule: str
    drive_time: float

    def __post_init__(self):
        if self.cause_id == self.effect_id:
            raise ParameterError("cause and effect must differ")
        if self.lag < 1:
            raise ParameterError("zero or negative lag is non-causal by definition")


@dataclass(frozen=True)
class DatasetSpec:
    """Parameters of the labeling rules and dataset assembly.

    ``free_flow_speed_kph`` converts the drive-time matrix back to a
    distance, from which the propagation time at ``propagation_speed_kph``
    (roughly how fast congestion backs up along a highway) gives the
    expected lag window ``{base, .., base + soft_threshold}``.
    """

    ratio: int = 1
    l_max: int = 8
    propagation_speed_kph: float = 20.0
    free_flow_speed_kph: float = 100.0
    soft_threshold: int = 1

    def __post_init__(self):
        if self.ratio < 1:
            raise ParameterError("ratio must be >= 1")
        if self.l_max < 1:
            raise ParameterError("l_max must be >= 1")
        if self.propagation_speed_kph <= 0 or self.free_flow_speed_kph <= 0:
            raise ParameterError("speeds must be positive")
        if self.soft_threshold < 0:
            raise ParameterError("soft_threshold must be >= 0")


@dataclass
class GroundTruth:
    """Output of the labeling pass over all candidate tuples."""

    labeled: list[LabeledPair]
    pool: list[tuple[str, str, int, float]]  # (cause, effect, lag, drive_time)

    def positives(self) -> list[LabeledPair]:
        return [p for p in self.labeled if p.label is Label.POSITIVE]

    def negatives(self) -> list[LabeledPair]:
        return [p for p in self.labeled if p.label is Label.NEGATIVE]


@dataclass
class GroundTruthDataset:
    """A training/evaluation dataset assembled from labels and pool."""

    pairs: list[LabeledPair]
    min_negative_drive_time: float

    def positives(self) -> list[LabeledPair]:
        return [p for p in self.pairs if p.label is Label.POSITIVE]

    def negatives(self) -> list[LabeledPair]:
        return [p for p in self.pairs if p.label is Label.NEGATIVE]


def flow_direction(i: str, j: str, matrix: DriveTimeMatrix) -> FlowDirection:
    """Which way traffic naturally flows between two stations.

    The shorter drive identifies the with-traffic direction; equal drive
    times leave the orientation ambiguous and the pair is excluded from
    positive labeling.
    """
    if i == j:
        raise ParameterError("flow direction needs two distinct stations")
    d_ij = matrix.get(i, j)
    d_ji = matrix.get(j, i)
    if d_ij < d_ji:
        return FlowDirection.FLOWS_I_TO_J
    if d_ij > d_ji:
        return FlowDirection.FLOWS_J_TO_I
    return FlowDirection.AMBIGUOUS


def expected_lags(drive_time_effect_to_cause: float, spec: DatasetSpec) -> set[int]:
    """Lag window implied by the drive time from affected to causal station.

    The drive time converts to a distance at free-flow speed; congestion
    covers that distance upstream at the propagation speed.  The resulting
    slot count, rounded half-up, plus the soft threshold gives the window,
    clamped to [1, l_max].  Zero lag is non-causal, so a base of zero
    shifts to {1}; a base beyond l_max means the pair is too far apart.
    """
    if drive_time_effect_to_cause < 0:
        raise ParameterError("drive time must be >= 0")
    distance_km = drive_time_effect_to_cause * spec.free_flow_speed_kph / 60.0
    propagation_minutes = distance_km / spec.propagation_speed_kph * 60.0
    base = int(propagation_minutes / SLOT_MINUTES + 0.5)
    return {
        lag
        for lag in range(base, base + spec.soft_threshold + 1)
        if 1 <= lag <= spec.l_max
    }


def label_pairs(
    meta: list[StationMeta], matrix: DriveTimeMatrix, spec: DatasetSpec
) -> GroundTruth:
    """Label every (cause, effect, lag) tuple over the given stations.

    Tuples neither clearly positive nor clearly negative go to the pool,
    sorted by descending drive time (ties broken by tuple id so output
    order is stable).  Same-road same-direction pairs whose expected lag
    window is empty (too far apart at l_max) also go to the pool rather
    than being asserted negative.
    """
    usable = []
    for m in meta:
        if m.station_id not in matrix:
            log.warning("station %s missing from drive-time matrix; excluded", m.station_id)
            continue
        usable.append(m)

    labeled: list[LabeledPair] = []
    pool: list[tuple[str, str, int, float]] = []
    for cause in usable:
        for effect in usable:
            if cause.station_id == effect.station_id:
                continue
            d_ce = matrix.get(cause.station_id, effect.station_id)
            cross_road = cause.road != effect.road
            cross_direction = cause.direction != effect.direction
            if cross_road and cross_direction:
                for lag in range(1, spec.l_max + 1):
                    labeled.append(
                        LabeledPair(
                            cause.station_id, effect.station_id, lag,
                            Label.NEGATIVE, RULE_CROSS, d_ce,
                        )
                    )
                continue
            qualifies = (
                not cross_road
                and not cross_direction
                and flow_direction(effect.station_id, cause.station_id, matrix)
                is FlowDirection.FLOWS_I_TO_J
            )
            if qualifies:
                window = expected_lags(matrix.get(effect.station_id, cause.station_id), spec)
                if window:
                    for lag in range(1, spec.l_max + 1):
                        if lag in window:
                            labeled.append(
                                LabeledPair(
                                    cause.station_id, effect.station_id, lag,
                                    Label.POSITIVE, RULE_POSITIVE, d_ce,
                                )
                            )
                        else:
                            labeled.append(
                                LabeledPair(
                                    cause.station_id, effect.station_id, lag,
                                    Label.NEGATIVE, RULE_OFF_LAG, d_ce,
                                )
                            )
                    continue
            for lag in range(1, spec.l_max + 1):
                pool.append((cause.station_id, effect.station_id, lag, d_ce))

    pool.sort(key=lambda t: (-t[3], t[0], t[1], t[2]))
    return GroundTruth(labeled, pool)


def build_dataset(truth: GroundTruth, ratio: int) -> GroundTruthDataset:
    """All positives plus the ``ratio`` x |positives| farthest pool tuples.

    Negatives are the drive-time-descending prefix of the pool, so raising
    the ratio only ever appends nearer (riskier) negatives.
    """
    if ratio < 1:
        raise ParameterError("ratio must be >= 1")
    positives = truth.positives()
    want = ratio * len(positives)
    if want > len(truth.pool):
        log.warning(
            "pool has %d tuples, %d requested; taking all", len(truth.pool), want
        )
        want = len(truth.pool)
    negatives = [
        LabeledPair(c, e, lag, Label.NEGATIVE, RULE_DISTANT, dt)
        for c, e, lag, dt in truth.pool[:want]
    ]
    min_dt = min((n.drive_time for n in negatives), default=float("nan"))
    return GroundTruthDataset(positives + negatives, min_dt)


def full_dataset(truth: GroundTruth) -> GroundTruthDataset:
    """Every candidate tuple, with the whole pool treated as negative."""
    residual = [
        LabeledPair(c, e, lag, Label.NEGATIVE, RULE_RESIDUAL, dt)
        for c, e, lag, dt in truth.pool
    ]
    pairs = truth.labeled + residual
    min_dt = min(
        (p.drive_time for p in pairs if p.label is Label.NEGATIVE),
        default=float("nan"),
    )
    return GroundTruthDataset(pairs, min_dt)
