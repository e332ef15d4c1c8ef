"""Variant-independent training loop, gradients and code extraction.

Both variants consume flat (N, 204) value/mask arrays. The LSTM variant
views each row as 12 steps of 17 features.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..core import N_FEATURES
from ..errors import EmptyDataset
from .losses import loss_weights
from .dense import DenseParams, dense_loss_and_grad, forward_dense, init_dense
from .lstm import LstmParams, encode_lstm, forward_lstm, init_lstm, lstm_loss_and_grad

logger = logging.getLogger(__name__)

Params = Union[DenseParams, LstmParams]
VARIANTS = ("dense", "lstm")


@dataclass(frozen=True)
class TrainConfig:
    variant: str = "dense"
    learning_rate: float = 1e-3
    epochs: int = 200
    batch_size: int = 32
    seed: int = 42
    mask_loss: bool = True
    hidden_dim: int = N_FEATURES

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.epochs < 1 or self.batch_size < 1 or self.hidden_dim < 1:
            raise ValueError("epochs, batch_size and hidden_dim must be >= 1")


@dataclass
class TrainHistory:
    train_mse: list[float] = field(default_factory=list)
    val_mse: list[float] = field(default_factory=list)

    def to_csv(self) -> str:
        rows = ["epoch,train_mse,val_mse"]
        for k, (tr, va) in enumerate(zip(self.train_mse, self.val_mse), start=1):
            rows.append(f"{k},{tr!r},{va!r}")
        return "\n".join(rows) + "\n"


def init_params(variant: str, seed: int, hidden_dim: int = N_FEATURES) -> Params:
    if variant == "dense":
        return init_dense(seed)
    if variant == "lstm":
        return init_lstm(seed, hidden_dim)
    raise ValueError(f"unknown variant {variant!r}")


def _steps(values, mask):
    """(N, 204) flat arrays -> (N, 12, 17) steps and a (N, 12) step mask."""
    values = np.atleast_2d(values)
    mask = np.atleast_2d(mask)
    n = values.shape[0]
    return (values.reshape(n, -1, N_FEATURES),
            mask.reshape(n, -1, N_FEATURES).any(axis=2))


def backward(values, mask, params: Params, mask_loss: bool = True) -> tuple[float, Params]:
    """Loss and exact gradient for a batch of flat sequences."""
    if isinstance(params, DenseParams):
        return dense_loss_and_grad(values, mask, params, mask_loss)
    seq, step_mask = _steps(values, mask)
    return lstm_loss_and_grad(seq, step_mask, params, mask_loss)


def reconstruct(values, mask, params: Params) -> np.ndarray:
    """Reconstructions with the same flat shape as ``values``."""
    values = np.asarray(values, dtype=float)
    if isinstance(params, DenseParams):
        return forward_dense(values, params)[1]
    seq, step_mask = _steps(values, mask)
    return forward_lstm(seq, step_mask, params).reshape(values.shape)


def encode(values, params: Params, mask=None) -> np.ndarray:
    """Code-layer activations: 17 for dense, ``hidden_dim`` for LSTM."""
    values = np.asarray(values, dtype=float)
    if isinstance(params, DenseParams):
        return forward_dense(values, params)[0]
    if mask is None:
        mask = np.ones(values.shape, dtype=bool)
    seq, step_mask = _steps(values, mask)
    code = encode_lstm(seq, step_mask, params)
    return code[0] if values.ndim == 1 else code


def dataset_loss(values, mask, params: Params, mask_loss: bool = True,
                 chunk: int = 512) -> float:
    """Mean per-example loss over a whole set, evaluated in fixed chunks."""
    n = values.shape[0]
    if n == 0:
        return float("nan")
    total = 0.0
    for s in range(0, n, chunk):
        v, m = values[s:s + chunk], mask[s:s + chunk]
        w = loss_weights(m, mask_loss)
        total += float((w * (reconstruct(v, m, params) - v) ** 2).sum()) * v.shape[0]
    return total / n


def sgd_step(params: Params, grads: Params, lr: float) -> Params:
    cls = type(params)
    return cls(**{n: a - lr * grads.arrays()[n] for n, a in params.arrays().items()})


def train(train_values, train_mask, val_values=None, val_mask=None,
          config: TrainConfig = TrainConfig(), init: Params | None = None
          ) -> tuple[Params, TrainHistory]:
    """Plain minibatch gradient descent on the masked reconstruction loss.

    Examples are reshuffled every epoch from a generator seeded by
    ``config.seed``; the same seed also initializes the weights (unless
    ``init`` is given). After each epoch the loss over the full training and
    validation sets is recorded (NaN when no validation set is given).

    Raises:
        EmptyDataset: the training set is empty.
    """
    train_values = np.asarray(train_values, dtype=float)
    train_mask = np.asarray(train_mask, dtype=bool)
    n = train_values.shape[0]
    if n == 0:
        raise EmptyDataset("training set is empty")
    params = init if init is not None else init_params(config.variant, config.seed,
                                                       config.hidden_dim)
    # Shuffle stream is distinct from the weight-init stream.
    rng = np.random.default_rng([config.seed, 1])

    history = TrainHistory()
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for s in range(0, n, config.batch_size):
            idx = order[s:s + config.batch_size]
            _, grads = backward(train_values[idx], train_mask[idx], params, config.mask_loss)
            params = sgd_step(params, grads, config.learning_rate)
        history.train_mse.append(dataset_loss(train_values, train_mask, params,
                                              config.mask_loss))
        if val_values is not None and len(val_values):
            history.val_mse.append(dataset_loss(np.asarray(val_values, dtype=float),
                                                np.asarray(val_mask, dtype=bool), params,
                                                config.mask_loss))
        else:
            history.val_mse.append(float("nan"))
        logger.debug("epoch %d train %.6g val %.6g", epoch + 1, history.train_mse[-1],
                     history.val_mse[-1])
    return params, history
