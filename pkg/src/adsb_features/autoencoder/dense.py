"""Fixed-length 204 -> 17 -> 204 autoencoder: ReLU code, sigmoid output."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import N_FEATURES
from ..preprocess import SEQ_LEN
from .losses import loss_weights

CODE_DIM = N_FEATURES  # 17


def sigmoid(a):
    # Split by sign to avoid overflow in exp.
    out = np.empty_like(a, dtype=float)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


def glorot(rng, fan_out, fan_in):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


@dataclass(frozen=True, eq=False)
class DenseParams:
    w_enc: np.ndarray  # (17, 204)
    b_enc: np.ndarray  # (17,)
    w_dec: np.ndarray  # (204, 17)
    b_dec: np.ndarray  # (204,)

    variant = "dense"
    names = ("w_enc", "b_enc", "w_dec", "b_dec")

    @property
    def input_dim(self) -> int:
        return self.w_enc.shape[1]

    @property
    def code_dim(self) -> int:
        return self.w_enc.shape[0]

    def arrays(self) -> dict[str, np.ndarray]:
        return {n: getattr(self, n) for n in self.names}

    def expected_shapes(self) -> dict[str, tuple[int, ...]]:
        h, d = self.code_dim, self.input_dim
        return {"w_enc": (h, d), "b_enc": (h,), "w_dec": (d, h), "b_dec": (d,)}


def init_dense(seed: int, input_dim: int = SEQ_LEN, code_dim: int = CODE_DIM) -> DenseParams:
    rng = np.random.default_rng(seed)
    return DenseParams(
        w_enc=glorot(rng, code_dim, input_dim),
        b_enc=np.zeros(code_dim),
        w_dec=glorot(rng, input_dim, code_dim),
        b_dec=np.zeros(input_dim),
    )


def forward_dense(x, p: DenseParams) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(code, recon)`` for one example (204,) or a batch (B, 204)."""
    x = np.asarray(x, dtype=float)
    code = np.maximum(x @ p.w_enc.T + p.b_enc, 0.0)
    recon = sigmoid(code @ p.w_dec.T + p.b_dec)
    return code, recon


def dense_loss_and_grad(x, mask, p: DenseParams, mask_loss: bool = True
                        ) -> tuple[float, DenseParams]:
    """Batch loss (mean per-example MSE) and its gradient w.r.t. ``p``.

    The target is the input itself. ReLU's derivative at exactly 0 is 0.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    mask = np.atleast_2d(mask)
    pre = x @ p.w_enc.T + p.b_enc
    code = np.maximum(pre, 0.0)
    recon = sigmoid(code @ p.w_dec.T + p.b_dec)
    w = loss_weights(mask, mask_loss)
    err = recon - x
    loss = float((w * err * err).sum())

    d_out = 2.0 * w * err * recon * (1.0 - recon)
    g_w_dec = d_out.T @ code
    g_b_dec = d_out.sum(axis=0)
    d_code = (d_out @ p.w_dec) * (pre > 0)
    g_w_enc = d_code.T @ x
    g_b_enc = d_code.sum(axis=0)
    return loss, DenseParams(g_w_enc, g_b_enc, g_w_dec, g_b_dec)
