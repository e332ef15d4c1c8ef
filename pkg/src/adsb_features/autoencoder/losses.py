"""Masked reconstruction loss."""

from __future__ import annotations

import numpy as np


def loss_mse(recon, target, mask=None, mask_loss: bool = True) -> float:
    """Mean squared error of one example.

    With ``mask_loss`` only mask-true positions count (0.0 if there are
    none); otherwise every position counts, padded zeros included.
    """
    recon = np.asarray(recon, dtype=float).reshape(-1)
    target = np.asarray(target, dtype=float).reshape(-1)
    if recon.shape != target.shape:
        raise ValueError(f"shape mismatch: {recon.shape} vs {target.shape}")
    sq = (recon - target) ** 2
    if not mask_loss or mask is None:
        return float(sq.mean())
    mask = np.asarray(mask, dtype=bool).reshape(-1)
    n = mask.sum()
    return float(sq[mask].sum() / n) if n else 0.0


def loss_weights(mask: np.ndarray, mask_loss: bool = True) -> np.ndarray:
    """Per-position weights ``w`` such that batch loss = sum(w * sq_err).

    The batch loss is the mean over examples of :func:`loss_mse`, so each
    example's weights sum to ``1 / batch`` (or to zero if it has no real
    positions under ``mask_loss``). ``mask`` has shape (batch, ...).
    """
    mask = np.asarray(mask, dtype=bool)
    batch = mask.shape[0]
    flat = mask.reshape(batch, -1)
    if mask_loss:
        counts = flat.sum(axis=1, keepdims=True)
        w = np.divide(flat, counts, out=np.zeros(flat.shape), where=counts > 0)
    else:
        w = np.full(flat.shape, 1.0 / flat.shape[1])
    return (w / batch).reshape(mask.shape)
