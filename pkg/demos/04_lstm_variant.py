"""
The sequence autoencoder
========================

Same data, read as 12 steps of 17 features. Empty buckets are skipped by
the encoder instead of being fed as zeros.
"""

import numpy as np

from adsb_features.autoencoder import TrainConfig, encode, forward_lstm, train
from adsb_features.extraction import score_by_ablation, select_features
from adsb_features.preprocess import apply_scaler, fit_scaler, stack
from adsb_features.synthetic import structured_sequences

seqs = structured_sequences(200, seed=1)
scaler = fit_scaler(seqs)
x, m = stack([apply_scaler(q, scaler) for q in seqs])

# knock out the last four buckets of the first example
m[0, 8 * 17:] = False
x[0, 8 * 17:] = 0.0

cfg = TrainConfig(variant="lstm", learning_rate=2.0, epochs=20, batch_size=16, seed=3,
                  hidden_dim=17)
params, hist = train(x, m, config=cfg)
print("train mse by epoch:", np.round(hist.train_mse[::5], 5))

print("code width", encode(x[0], params, m[0]).shape)
steps = x[0].reshape(12, 17)
recon = forward_lstm(steps, m[0].reshape(12, 17)[:, 0], params)
print("reconstruction", recon.shape)

# the LSTM has no per-input weight rows, so only the ablation probe applies
print("ablation top 4:", select_features(score_by_ablation(params, (x, m), scaler), 4))
