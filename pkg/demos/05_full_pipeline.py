"""The full pipeline on a generated corpus, plus a small grid search.

Writes a synthetic corpus to disk in the same CSV formats real data
uses, runs every stage (ingest -> events -> counts -> MLE -> ground
truth -> classifier), prints the run report, and finishes with a 2x2
(alpha, tau) grid search.  Rerunning is byte-identical for a fixed seed.
"""

import tempfile
from pathlib import Path

from nexica import RunConfig, SynthSpec, grid_search, report, run_pipeline
from nexica.pipeline import write_grid_csv
from nexica.synth import write_dataset

workdir = Path(tempfile.mkdtemp(prefix="nexica-demo-"))
spec = SynthSpec(
    n_stations=10, n_slots=6 * 2016, p_s=0.05, seed=21,
    edges=((1, 0, 1, 0.6), (3, 1, 2, 0.7), (6, 4, 2, 0.8), (9, 8, 1, 0.5)),
)
paths = write_dataset(spec, workdir / "corpus")
print(f"wrote synthetic corpus under {workdir / 'corpus'}")

config = RunConfig(
    speeds=paths["speeds"], meta=paths["meta"], drive_times=paths["drive_times"],
    truth=paths["truth"], out_dir=str(workdir / "run"),
    alpha=0.25, tau=0, l_max=8, ratio=1, n_trees=60, folds=5, seed=4,
)
run_pipeline(config)
print()
print(report(config.out_dir))

print("\ngrid search over (alpha, tau):")
rows = grid_search([0.15, 0.25], [0, 1], config)
write_grid_csv(workdir / "grid.csv", rows)
print(f"{'alpha':>6} {'tau':>4} {'ratio AUC':>10} {'full AUC':>9} {'seconds':>8}")
for r in rows:
    print(f"{r['alpha']:>6} {r['tau']:>4} {r['ratio_auc']:>10.4f} {r['full_auc']:>9.4f} {r['seconds']:>8}")
print("\nnote: rendered synthetic dips sit at twice the generating alpha below")
print("baseline, so every smaller threshold detects the same events and the")
print("alpha axis is flat here; on real speeds it controls event sensitivity.")
print(f"\nartifacts: {config.out_dir} and {workdir / 'grid.csv'}")
