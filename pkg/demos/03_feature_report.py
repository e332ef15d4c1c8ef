"""
Which features carry the structure?
===================================

Only Lat, Long, Spd and Trak share latent factors in this data set; every
other feature is independent noise. Both probes should find the four.
"""

from adsb_features.autoencoder import TrainConfig, train
from adsb_features.extraction import (build_report, score_by_ablation, score_by_weight_norm,
                                      select_features)
from adsb_features.preprocess import apply_scaler, fit_scaler, split_dataset, stack
from adsb_features.synthetic import structured_sequences

seqs = structured_sequences(600, seed=0)
tr, va = split_dataset(seqs, 0.8, seed=0)
scaler = fit_scaler(tr)            # fitted on training data only
xt, mt = stack([apply_scaler(q, scaler) for q in tr])
xv, mv = stack([apply_scaler(q, scaler) for q in va])
params, _ = train(xt, mt, xv, mv, TrainConfig(learning_rate=2.0, epochs=300, seed=0))

wn = score_by_weight_norm(params)
ab = score_by_ablation(params, (xv, mv), scaler)
print("weight norm top 6:", select_features(wn, 6))
print("ablation top 6:   ", select_features(ab, 6))
print("largest-gap k:    ", select_features(wn, "auto"))

# against the ten features picked for real surveillance flights
report = build_report([wn, ab], k=10)
print("selected:", report.selected)
print("overlap with reference:", report.overlap_with_reference, "of 10")
