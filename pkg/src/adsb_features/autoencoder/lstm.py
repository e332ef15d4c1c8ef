"""Single-layer LSTM sequence autoencoder with hand-written BPTT.

Cell (gate order i, f, g, o)::

    a = W · [x_t ; h_{t-1}] + b
    i, f, o = sigmoid(a_i), sigmoid(a_f), sigmoid(a_o);  g = tanh(a_g)
    c_t = f * c_{t-1} + i * g
    h_t = o * tanh(c_t)

The encoder starts from zero state and leaves it untouched on masked
steps. Its final hidden state is the code. The decoder starts from
``h = code, c = 0`` with a zero input, and at each later step it is fed
its own previous output ``y_t = sigmoid(P · h_t + q)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import N_FEATURES
from .dense import glorot, sigmoid
from .losses import loss_weights

N_GATES = 4
FORGET = 1


@dataclass(frozen=True, eq=False)
class LstmParams:
    enc_w: np.ndarray  # (4, H, F + H)
    enc_b: np.ndarray  # (4, H)
    dec_w: np.ndarray  # (4, H, F + H)
    dec_b: np.ndarray  # (4, H)
    out_w: np.ndarray  # (F, H)
    out_b: np.ndarray  # (F,)

    variant = "lstm"
    names = ("enc_w", "enc_b", "dec_w", "dec_b", "out_w", "out_b")

    @property
    def hidden_dim(self) -> int:
        return self.enc_b.shape[1]

    @property
    def n_features(self) -> int:
        return self.out_w.shape[0]

    @property
    def code_dim(self) -> int:
        return self.hidden_dim

    def arrays(self) -> dict[str, np.ndarray]:
        return {n: getattr(self, n) for n in self.names}

    def expected_shapes(self) -> dict[str, tuple[int, ...]]:
        h, f = self.hidden_dim, self.n_features
        cell = (N_GATES, h, f + h)
        return {"enc_w": cell, "enc_b": (N_GATES, h), "dec_w": cell, "dec_b": (N_GATES, h),
                "out_w": (f, h), "out_b": (f,)}


def init_lstm(seed: int, hidden_dim: int = N_FEATURES, n_features: int = N_FEATURES
              ) -> LstmParams:
    if hidden_dim < 1:
        raise ValueError("hidden_dim must be >= 1")
    rng = np.random.default_rng(seed)

    def cell():
        w = np.stack([glorot(rng, hidden_dim, n_features + hidden_dim) for _ in range(N_GATES)])
        b = np.zeros((N_GATES, hidden_dim))
        b[FORGET] = 1.0
        return w, b

    enc_w, enc_b = cell()
    dec_w, dec_b = cell()
    return LstmParams(enc_w, enc_b, dec_w, dec_b,
                      out_w=glorot(rng, n_features, hidden_dim), out_b=np.zeros(n_features))


def _cell_forward(w, b, x, h, c):
    xh = np.concatenate([x, h], axis=1)
    a = np.einsum("bk,ghk->gbh", xh, w) + b[:, None, :]
    i, f, o = sigmoid(a[0]), sigmoid(a[1]), sigmoid(a[3])
    g = np.tanh(a[2])
    c_new = f * c + i * g
    tc = np.tanh(c_new)
    return o * tc, c_new, (xh, i, f, g, o, c, tc)


def _cell_backward(w, cache, dh, dc, gw, gb):
    """Accumulate into ``gw``/``gb``; return (dx, dh_prev, dc_prev)."""
    xh, i, f, g, o, c_prev, tc = cache
    do = dh * tc
    dct = dc + dh * o * (1.0 - tc * tc)
    da = np.stack([dct * g * i * (1.0 - i),
                   dct * c_prev * f * (1.0 - f),
                   dct * i * (1.0 - g * g),
                   do * o * (1.0 - o)])
    gw += np.einsum("gbh,bk->ghk", da, xh)
    gb += da.sum(axis=1)
    dxh = np.einsum("gbh,ghk->bk", da, w)
    n_in = xh.shape[1] - dh.shape[1]
    return dxh[:, :n_in], dxh[:, n_in:], dct * f


def _as_batch(seq, mask):
    seq = np.asarray(seq, dtype=float)
    single = seq.ndim == 2
    if single:
        seq = seq[None]
    if mask is None:
        mask = np.ones(seq.shape[:2], dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim == 1:
        mask = mask[None]
    return seq, mask, single


def _encode(seq, mask, p: LstmParams, caches=None):
    batch = seq.shape[0]
    h = np.zeros((batch, p.hidden_dim))
    c = np.zeros((batch, p.hidden_dim))
    for t in range(seq.shape[1]):
        h_new, c_new, cache = _cell_forward(p.enc_w, p.enc_b, seq[:, t], h, c)
        m = mask[:, t, None]
        h = np.where(m, h_new, h)
        c = np.where(m, c_new, c)
        if caches is not None:
            caches.append(cache)
    return h


def _decode(code, steps, p: LstmParams, caches=None):
    batch = code.shape[0]
    h, c = code, np.zeros_like(code)
    y = np.zeros((batch, p.n_features))
    hs, ys = [], []
    for _ in range(steps):
        h, c, cache = _cell_forward(p.dec_w, p.dec_b, y, h, c)
        y = sigmoid(h @ p.out_w.T + p.out_b)
        hs.append(h)
        ys.append(y)
        if caches is not None:
            caches.append(cache)
    return np.stack(ys, axis=1), hs


def encode_lstm(seq, mask, p: LstmParams) -> np.ndarray:
    seq, mask, single = _as_batch(seq, mask)
    code = _encode(seq, mask, p)
    return code[0] if single else code


def forward_lstm(seq, mask, p: LstmParams) -> np.ndarray:
    """Reconstruct a (T, F) sequence, or a (B, T, F) batch.

    ``mask`` has one flag per step; masked steps are skipped by the encoder.
    """
    seq, mask, single = _as_batch(seq, mask)
    recon, _ = _decode(_encode(seq, mask, p), seq.shape[1], p)
    return recon[0] if single else recon


def lstm_loss_and_grad(seq, mask, p: LstmParams, mask_loss: bool = True
                       ) -> tuple[float, LstmParams]:
    """Batch loss (mean per-example MSE) and its exact gradient."""
    seq, mask, _ = _as_batch(seq, mask)
    steps = seq.shape[1]
    enc_caches, dec_caches = [], []
    code = _encode(seq, mask, p, enc_caches)
    recon, hs = _decode(code, steps, p, dec_caches)

    w = loss_weights(np.broadcast_to(mask[:, :, None], seq.shape), mask_loss)
    err = recon - seq
    loss = float((w * err * err).sum())

    g = {n: np.zeros_like(a) for n, a in p.arrays().items()}
    dh = np.zeros_like(code)
    dc = np.zeros_like(code)
    dy_in = np.zeros((seq.shape[0], p.n_features))
    for t in reversed(range(steps)):
        y = recon[:, t]
        da = (2.0 * w[:, t] * err[:, t] + dy_in) * y * (1.0 - y)
        g["out_w"] += da.T @ hs[t]
        g["out_b"] += da.sum(axis=0)
        dh = dh + da @ p.out_w
        dy_in, dh, dc = _cell_backward(p.dec_w, dec_caches[t], dh, dc, g["dec_w"], g["dec_b"])
    # dh now holds dL/dcode; the decoder's initial cell state is a constant.
    dc = np.zeros_like(code)
    for t in reversed(range(steps)):
        m = mask[:, t, None]
        _, dh_cell, dc_cell = _cell_backward(p.enc_w, enc_caches[t], dh * m, dc * m,
                                             g["enc_w"], g["enc_b"])
        dh = np.where(m, dh_cell, dh)
        dc = np.where(m, dc_cell, dc)
    return loss, LstmParams(**g)
