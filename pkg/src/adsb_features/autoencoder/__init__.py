"""Dense and LSTM autoencoders trained with plain minibatch gradient descent."""

from .dense import CODE_DIM, DenseParams, forward_dense, init_dense
from .losses import loss_mse
from .lstm import LstmParams, encode_lstm, forward_lstm, init_lstm
from .params_io import load_params, save_params
from .training import (TrainConfig, TrainHistory, backward, dataset_loss, encode,
                       init_params, reconstruct, train)

__all__ = [
    "CODE_DIM", "DenseParams", "LstmParams", "TrainConfig", "TrainHistory",
    "backward", "dataset_loss", "encode", "encode_lstm", "forward_dense", "forward_lstm",
    "init_dense", "init_lstm", "init_params", "load_params", "loss_mse", "reconstruct",
    "save_params", "train",
]
