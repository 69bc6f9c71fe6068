"""Detecting traffic slowdown events in a speed time series.

Builds six weeks of five-minute speeds for one station with a strong
weekly rhythm, injects a handful of unexpected slowdowns, and walks
through the extraction: median-week profile -> relative-error threshold
-> leading edges.
"""

import numpy as np
from datetime import datetime, timedelta

from nexica import SpeedSeries, extract_events, median_week_profile
from nexica.events import WEEK_SLOTS, week_slot_index

rng = np.random.default_rng(0)
start = datetime(2024, 1, 1)  # a Monday
weeks = 6
n = weeks * WEEK_SLOTS

# Weekly rhythm: fast at night, rush-hour dips on weekdays, plus noise.
slot_of_day = (np.arange(n) % 288) * 5 / 60.0  # hour of day
weekday = (np.arange(n) // 288) % 7
base = 68.0 - 18.0 * np.exp(-((slot_of_day - 8.0) ** 2) / 2.0)  # morning rush
base -= 14.0 * np.exp(-((slot_of_day - 17.5) ** 2) / 3.0)       # evening rush
base[weekday >= 5] = 66.0                                        # weekends flow
speeds = base + rng.normal(0, 1.5, n)

# Inject incidents: sharp multi-slot slowdowns at arbitrary times.
incidents = [(3000, 6), (9000, 4), (9800, 10), (16000, 5)]
for at, length in incidents:
    speeds[at : at + length] *= 0.45

series = SpeedSeries("demo-station", start, speeds.clip(0), np.zeros(n, dtype=bool))

profile = median_week_profile(series)
monday_8am = profile.medians[week_slot_index(datetime(2024, 1, 1, 8, 0))]
sunday_3am = profile.medians[week_slot_index(datetime(2024, 1, 7, 3, 0))]
print(f"median-week profile: Monday 08:00 -> {monday_8am:.1f} mph, "
      f"Sunday 03:00 -> {sunday_3am:.1f} mph")

for alpha in (0.15, 0.25, 0.4):
    events = extract_events(series, alpha)
    print(f"alpha={alpha:<4}: {int(events.slowdown_mask.sum()):>4} slowdown slots, "
          f"{events.count():>3} leading-edge events")

events = extract_events(series, 0.25)
print("\nevents found at alpha=0.25 (slot, timestamp):")
for j in events.event_indices().tolist():
    print(f"  slot {j:>5}  {start + timedelta(minutes=5 * j)}")
print("\ninjected incident starts:", [at for at, _ in incidents])
print("note: each injected run yields exactly one event, at its first slot;")
print("rush-hour dips are part of the weekly norm and never fire.")
