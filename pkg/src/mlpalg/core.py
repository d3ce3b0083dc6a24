"""Multilayer perceptrons with per-map activation tags.

A network maps R^{n_1} to R^{n_L} through L-1 connecting maps

    a_{i+1} = act_i(W_i a_i - theta_i)

Thresholds are *subtracted*, never added.  Layer indices in the public API are
1-based, so ``layer_space(net, 1)`` is the input dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Sequence, Union

import numpy as np
from scipy.special import expit

__all__ = [
    "Activation",
    "SIGMOID",
    "RELU",
    "Mlp",
    "MlpError",
    "DimensionError",
    "sigmoid",
    "relu",
    "validate",
    "check",
    "forward",
    "forward_batch",
    "layer_space",
    "unit_tags",
]


class MlpError(ValueError):
    """Base class for invalid-network and precondition failures."""


class DimensionError(MlpError):
    """Raised when an input or operand has the wrong shape."""


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    RELU = "relu"


SIGMOID = Activation.SIGMOID
RELU = Activation.RELU

# A connecting map carries one tag, or one tag per output unit when blocks of
# differently activated networks have been placed side by side.
MapActivation = Union[Activation, tuple[Activation, ...]]

_SATURATION = 500.0


def sigmoid(z):
    """Logistic function, saturated to exactly 0 / 1 beyond |z| > 500."""
    z = np.asarray(z, dtype=float)
    out = expit(z)
    if z.size and np.max(np.abs(z)) > _SATURATION:
        out = np.where(z < -_SATURATION, 0.0, np.where(z > _SATURATION, 1.0, out))
    return out


def relu(z):
    return np.maximum(np.asarray(z, dtype=float), 0.0)


def _as_activation(tag) -> MapActivation:
    if isinstance(tag, Activation):
        return tag
    if isinstance(tag, str):
        return Activation(tag.lower())
    tags = tuple(_as_activation(t) for t in tag)
    if tags and all(t is tags[0] for t in tags):
        return tags[0]
    return tags


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Mlp:
    """An immutable layered network.

    ``weights[i]`` has shape ``(layer_dims[i+1], layer_dims[i])`` and
    ``thresholds[i]`` has length ``layer_dims[i+1]``.  ``metadata`` holds
    provenance only and never affects evaluation.

    Construction does not validate; use :func:`validate` to diagnose and
    :func:`check` to raise.
    """

    layer_dims: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    thresholds: tuple[np.ndarray, ...]
    activations: tuple[MapActivation, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "layer_dims", tuple(int(d) for d in self.layer_dims))
        object.__setattr__(self, "weights", tuple(_frozen(w) for w in self.weights))
        object.__setattr__(self, "thresholds", tuple(_frozen(t) for t in self.thresholds))
        object.__setattr__(
            self, "activations", tuple(_as_activation(a) for a in self.activations)
        )
        object.__setattr__(self, "metadata", dict(self.metadata))

    @classmethod
    def from_params(
        cls,
        weights: Sequence,
        thresholds: Sequence,
        activations: Sequence | None = None,
        metadata: Mapping[str, Any] | None = None,
    ) -> "Mlp":
        """Build a net whose layer dims are read off the weight shapes."""
        weights = [np.atleast_2d(np.asarray(w, dtype=float)) for w in weights]
        if not weights:
            raise MlpError("a network needs at least one connecting map")
        dims = [weights[0].shape[1]] + [w.shape[0] for w in weights]
        if activations is None:
            activations = [SIGMOID] * len(weights)
        return cls(dims, weights, thresholds, activations, metadata or {})

    @property
    def depth(self) -> int:
        """Number of layers L (input and output included)."""
        return len(self.layer_dims)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    @property
    def n_params(self) -> int:
        return sum(w.size + t.size for w, t in zip(self.weights, self.thresholds))

    def replace(self, **changes) -> "Mlp":
        kw = dict(
            layer_dims=self.layer_dims,
            weights=self.weights,
            thresholds=self.thresholds,
            activations=self.activations,
            metadata=self.metadata,
        )
        kw.update(changes)
        return Mlp(**kw)

    def same_params(self, other: "Mlp") -> bool:
        """Bit-level equality of structure, parameters and activation tags."""
        if self.layer_dims != other.layer_dims or self.activations != other.activations:
            return False
        pairs = zip(self.weights + self.thresholds, other.weights + other.thresholds)
        return all(
            a.shape == b.shape and np.array_equal(a.view(np.uint64), b.view(np.uint64))
            for a, b in pairs
        )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return forward_batch(self, x) if x.ndim == 2 else forward(self, x)


def unit_tags(net: Mlp, i: int) -> tuple[Activation, ...]:
    """Per-unit activation tags of connecting map ``i`` (0-based)."""
    act = net.activations[i]
    if isinstance(act, Activation):
        return (act,) * net.layer_dims[i + 1]
    return act


def validate(net: Mlp) -> list[str]:
    """Return a list of invariant violations; an empty list means valid."""
    problems = []
    dims = net.layer_dims
    n_maps = len(dims) - 1
    if len(dims) < 2:
        problems.append(f"need at least 2 layers, got {len(dims)}")
    if any(d < 1 for d in dims):
        problems.append(f"layer dims must be positive, got {dims}")
    for name, seq in (
        ("weights", net.weights),
        ("thresholds", net.thresholds),
        ("activations", net.activations),
    ):
        if len(seq) != n_maps:
            problems.append(f"expected {n_maps} {name}, got {len(seq)}")
    for i, w in enumerate(net.weights[:n_maps]):
        expected = (dims[i + 1], dims[i])
        if w.shape != expected:
            problems.append(
                f"layer {i + 1}: weights expected {expected[0]}x{expected[1]}, "
                f"got {'x'.join(map(str, w.shape))}"
            )
        elif not np.all(np.isfinite(w)):
            problems.append(f"layer {i + 1}: non-finite entry in weights")
    for i, t in enumerate(net.thresholds[:n_maps]):
        if t.shape != (dims[i + 1],):
            problems.append(
                f"layer {i + 1}: thresholds expected length {dims[i + 1]}, got shape {t.shape}"
            )
        elif not np.all(np.isfinite(t)):
            problems.append(f"layer {i + 1}: non-finite entry in thresholds")
    for i, a in enumerate(net.activations[:n_maps]):
        if not isinstance(a, Activation) and len(a) != dims[i + 1]:
            problems.append(
                f"layer {i + 1}: {len(a)} per-unit activations for {dims[i + 1]} units"
            )
    return problems


def check(net: Mlp) -> Mlp:
    problems = validate(net)
    if problems:
        raise MlpError("invalid network: " + "; ".join(problems))
    return net


def _activate(z: np.ndarray, act: MapActivation) -> np.ndarray:
    if act is SIGMOID:
        return sigmoid(z)
    if act is RELU:
        return relu(z)
    mask = np.array([t is RELU for t in act])
    return np.where(mask, relu(z), sigmoid(z))


def forward_batch(net: Mlp, X) -> np.ndarray:
    """Evaluate ``net`` on every row of ``X`` (shape ``m x n_1``)."""
    check(net)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise DimensionError(
            f"data has shape {X.shape}, network expects {net.input_dim} columns"
        )
    a = X
    for w, t, act in zip(net.weights, net.thresholds, net.activations):
        a = _activate(a @ w.T - t, act)
    return a


def forward(net: Mlp, x) -> np.ndarray:
    """Evaluate ``net`` at a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != net.input_dim:
        raise DimensionError(
            f"input has shape {x.shape}, network expects length {net.input_dim}"
        )
    return forward_batch(net, x[None, :])[0]


def layer_space(net: Mlp, k: int) -> int:
    """Dimension of the k-th layer (1-based)."""
    if not 1 <= k <= net.depth:
        raise IndexError(f"layer index {k} outside 1..{net.depth}")
    return net.layer_dims[k - 1]
