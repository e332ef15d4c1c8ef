"""
Training the dense autoencoder
==============================

A 204 -> 17 -> 204 network on data that lives near a 5-dimensional plane.
"""

import numpy as np

from adsb_features.autoencoder import TrainConfig, encode, reconstruct, train
from adsb_features.preprocess import split_dataset, stack
from adsb_features.synthetic import subspace_sequences

seqs = subspace_sequences(200, dim=5, noise=0.01, seed=0)
tr, va = split_dataset(seqs, 0.8, seed=0)
xt, mt = stack(tr)
xv, mv = stack(va)

# the small learning rate barely moves the loss in 200 epochs ...
slow = TrainConfig(learning_rate=1e-3, epochs=200, batch_size=32, seed=42)
_, hist = train(xt, mt, xv, mv, slow)
print("lr 1e-3: epoch 1 %.5f  epoch 200 %.5f" % (hist.train_mse[0], hist.train_mse[-1]))

# ... a large one, with the mean-reduced loss, is what actually trains it
fast = TrainConfig(learning_rate=2.0, epochs=200, batch_size=32, seed=42)
params, hist = train(xt, mt, xv, mv, fast)
print("lr 2.0:  epoch 1 %.5f  epoch 200 %.5f" % (hist.train_mse[0], hist.train_mse[-1]))
print("validation", hist.val_mse[-1])

code = encode(xv[0], params)
print("code", code.shape, "active units:", int(np.sum(code > 0)))
recon = reconstruct(xv[:1], mv[:1], params)
print("max abs error on one example: %.3f" % np.abs(recon - xv[:1]).max())

print(hist.to_csv().splitlines()[:3])
