"""Estimating the causal probability between two event streams.

Generates cause/effect pairs from the two-parameter model (spontaneous
rate p_s, causal trigger probability p_c at a fixed lag), counts the
four slot correspondences, and recovers both parameters with the
closed-form constrained MLE.  Also shows what the estimator reports when
the evidence is anti-correlated or absent.
"""

import numpy as np

from nexica import (
    CorrespondenceCounts,
    count_correspondences,
    estimate,
    generate_event_pair,
)

n_slots = 52_416  # six months of five-minute slots
lag = 3

print(f"{'true p_c':>9} {'est p_s':>9} {'est p_c':>9} {'case':>13}   counts (a00,a01,a10,a11)")
for true_pc in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
    cause, effect = generate_event_pair(0.05, true_pc, lag, n_slots, seed=11)
    counts = count_correspondences(cause, effect, lag)
    est = estimate(counts)
    print(f"{true_pc:>9.2f} {est.p_s:>9.4f} {est.p_c:>9.4f} {est.case.value:>13}   {counts.as_tuple()}")

print("\nwrong lag: the same pc=0.6 pair counted at lag 5 instead of 3")
cause, effect = generate_event_pair(0.05, 0.6, lag, n_slots, seed=11)
est = estimate(count_correspondences(cause, effect, 5))
print(f"  est p_c at lag 5: {est.p_c:.4f} (correspondence vanishes off-lag)")

print("\nhand-built tables:")
for label, table in [
    ("anti-correlated", (5000, 100, 900, 10)),
    ("no cause events", (6000, 300, 0, 0)),
    ("every slot an event", (0, 0, 0, 600)),
]:
    est = estimate(CorrespondenceCounts.from_counts(*table))
    print(f"  {label:<22} -> p_c={est.p_c!r:>6}  case={est.case.value}")
print("\nanti-correlated evidence clamps to the p_c=0 edge; tables with no")
print("cause events (or nothing but events) carry no causal information.")
