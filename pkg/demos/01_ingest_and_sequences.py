"""
From snapshot files to hour sequences
=====================================

Load the bundled fixture, keep the surveillance aircraft, and turn each
aircraft-hour into one 204-value training vector.
"""

from pathlib import Path

import numpy as np

from adsb_features.ingest import FilterConfig, build_tracks, load_snapshots, passes_filter, read_whitelist
from adsb_features.preprocess import build_sequences, fit_scaler, apply_scaler, stack

FIXTURE = Path(__file__).resolve().parents[1] / "data" / "fixture"

# one JSON file per snapshot; a corrupt record becomes a warning, not a crash
paths = sorted((FIXTURE / "snapshots").glob("*.json"))
events, warnings = load_snapshots(paths, threads=2)
print(len(paths), "snapshots,", len(events), "events,", len(warnings), "warning(s)")
print(warnings[0])

# whitelist OR the "interesting" flag, US registrations only
filt = FilterConfig(read_whitelist(FIXTURE / "whitelist.txt"), require_interesting=True)
kept = [e for e in events if passes_filter(e, filt)]
tracks = build_tracks(kept)
for t in tracks:
    print(t.reg, len(t.events), "events")

# 12 five-minute buckets per hour, one uniformly drawn event per bucket
seqs = build_sequences(tracks, rng_seed=42, min_present=6)
print(len(seqs), "usable hour sequences")
first = seqs[0]
print(first.reg, first.values.shape, "buckets present:", first.samples_present)

# z-score, then squash into [0, 1] using the training extremes
scaler = fit_scaler(seqs)
x, m = stack([apply_scaler(q, scaler) for q in seqs])
print("scaled range", x[m].min(), x[m].max())
print("padded positions are zero:", np.all(x[~m] == 0))
