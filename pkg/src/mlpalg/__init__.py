"""MLP algebra: build classifiers for complex sets by combining nets trained on simple ones."""

from .algebra import (
    DEFAULT_LAMBDA,
    PreconditionError,
    align_depths,
    complement,
    component,
    conjunction,
    difference,
    i_product,
    identical_extension,
    multi_i_product,
    multi_o_product,
    multi_sum,
    o_product,
    set_difference,
    sum_net,
)
from .core import RELU, SIGMOID, Activation, DimensionError, Mlp, MlpError, forward, forward_batch, layer_space, validate
from .train import TrainConfig, accuracy_argmax, accuracy_scalar, fine_tune, init_mlp, train_sgd

__version__ = "0.1.0"
