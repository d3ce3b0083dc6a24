"""Mini-batch SGD for characteristic networks, and accuracy under both decision rules."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy.special import xlogy

from .core import RELU, DimensionError, Mlp, MlpError, check, relu, sigmoid, unit_tags
from .data import LabeledDataset

__all__ = [
    "Loss",
    "TrainConfig",
    "EvalReport",
    "DivergenceError",
    "init_mlp",
    "loss_and_gradients",
    "train_sgd",
    "fine_tune",
    "accuracy_scalar",
    "accuracy_argmax",
    "evaluate",
]


class DivergenceError(ArithmeticError):
    def __init__(self, epoch: int, message: str = ""):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}: non-finite loss")


class Loss(str, Enum):
    BCE = "bce"
    MSE = "mse"


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 2000
    batch_size: int = 32
    loss: Loss = Loss.BCE
    init_scale: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "loss", Loss(str(getattr(self.loss, "value", self.loss)).lower()))
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if not self.init_scale > 0:
            raise ValueError("init_scale must be positive")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["loss"] = self.loss.value
        return d


@dataclass
class EvalReport:
    correct: int
    total: int
    per_class_correct: list[int] = field(default_factory=list)
    per_class_total: list[int] = field(default_factory=list)
    loss_history: list[tuple[int, float]] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def rows(self) -> list[tuple[str, str]]:
        rows = [
            ("correct", str(self.correct)),
            ("total", str(self.total)),
            ("accuracy", repr(self.accuracy)),
        ]
        for i, (c, t) in enumerate(zip(self.per_class_correct, self.per_class_total)):
            rows.append((f"class{i}_correct", str(c)))
            rows.append((f"class{i}_total", str(t)))
        if self.loss_history:
            rows.append(("final_loss", repr(self.loss_history[-1][1])))
        return rows

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["metric", "value"])
            w.writerows(self.rows())

    def write_loss_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "loss"])
            w.writerows((e, repr(l)) for e, l in self.loss_history)


def init_mlp(layer_dims, seed: int = 0, init_scale: float = 0.5) -> Mlp:
    """All-sigmoid net with parameters uniform in ``[-init_scale, init_scale]``."""
    dims = [int(d) for d in layer_dims]
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise MlpError(f"invalid layer dims {layer_dims}")
    rng = np.random.default_rng(seed)
    weights, thresholds = [], []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.uniform(-init_scale, init_scale, size=(n_out, n_in)))
        thresholds.append(rng.uniform(-init_scale, init_scale, size=n_out))
    meta = {"provenance": {"op": "init", "dims": dims, "seed": seed}}
    return Mlp(dims, weights, thresholds, ["sigmoid"] * (len(dims) - 1), meta)


_SIG, _RELU, _MIXED = 0, 1, 2


class _Params:
    """Mutable working copy of a net's parameters plus per-map activation kinds."""

    def __init__(self, net: Mlp):
        self.W = [w.copy() for w in net.weights]
        self.T = [t.copy() for t in net.thresholds]
        self.masks = [np.array([t is RELU for t in unit_tags(net, i)]) for i in range(len(self.W))]
        self.kinds = [
            _RELU if m.all() else _SIG if not m.any() else _MIXED for m in self.masks
        ]
        self.sig_out = self.kinds[-1] == _SIG

    def freeze(self, net: Mlp, meta) -> Mlp:
        return net.replace(weights=self.W, thresholds=self.T, metadata=meta)


def _forward(p: _Params, X):
    acts, zs = [X], []
    a = X
    for W, T, kind, mask in zip(p.W, p.T, p.kinds, p.masks):
        z = a @ W.T - T
        if kind == _SIG:
            a = sigmoid(z)
        elif kind == _RELU:
            a = relu(z)
        else:
            a = np.where(mask, relu(z), sigmoid(z))
        zs.append(z)
        acts.append(a)
    return zs, acts


def _act_grad(p: _Params, i, z, a):
    # sigmoid' = a(1-a); relu' = 1 for z > 0 and 0 otherwise (0 at the kink)
    kind = p.kinds[i]
    if kind == _SIG:
        return a * (1.0 - a)
    if kind == _RELU:
        return (z > 0).astype(float)
    return np.where(p.masks[i], (z > 0).astype(float), a * (1.0 - a))


def _loss_grad(p: _Params, X, Y, loss: Loss):
    zs, acts = _forward(p, X)
    out = acts[-1]
    m = X.shape[0]
    if loss is Loss.BCE:
        value = -np.sum(xlogy(Y, out) + xlogy(1.0 - Y, 1.0 - out)) / m
        if p.sig_out:
            delta = (out - Y) / m
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                dout = (out - Y) / (out * (1.0 - out)) / m
            delta = dout * _act_grad(p, -1, zs[-1], out)
    else:
        diff = out - Y
        value = 0.5 * np.sum(diff * diff) / m
        delta = diff / m * _act_grad(p, -1, zs[-1], out)
    gW, gT = [None] * len(p.W), [None] * len(p.W)
    for i in range(len(p.W) - 1, -1, -1):
        gW[i] = delta.T @ acts[i]
        gT[i] = -delta.sum(axis=0)
        if i:
            delta = (delta @ p.W[i]) * _act_grad(p, i - 1, zs[i - 1], acts[i])
    return value, gW, gT


def loss_and_gradients(net: Mlp, data: LabeledDataset, loss=Loss.BCE):
    """Mean loss over ``data`` and its gradients w.r.t. weights and thresholds.

    BCE is ``-mean(y log a + (1-y) log(1-a))`` summed over output units; MSE is
    ``0.5 * mean(sum((a-y)^2))``.
    """
    check(net)
    _check_widths(net, data)
    return _loss_grad(_Params(net), data.data, data.labels, Loss(getattr(loss, "value", loss)))


def _check_widths(net: Mlp, data: LabeledDataset) -> None:
    if net.input_dim != data.dim:
        raise DimensionError(f"net input dim {net.input_dim} != data dim {data.dim}")
    if net.output_dim != data.n_labels:
        raise DimensionError(
            f"net output dim {net.output_dim} != label width {data.n_labels}"
        )


def train_sgd(net: Mlp, data: LabeledDataset, cfg: TrainConfig = TrainConfig()):
    """Mini-batch SGD with backpropagation; returns ``(trained_net, report)``.

    Each epoch visits a seeded permutation of the rows.  The recorded loss is the
    mean of the batch losses.  A non-finite loss raises :class:`DivergenceError`.
    """
    check(net)
    _check_widths(net, data)
    p = _Params(net)
    rng = np.random.default_rng(cfg.seed)
    X, Y = data.data, data.labels
    m, lr, bs = len(data), cfg.learning_rate, cfg.batch_size
    history = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(m)
        total, n_batches = 0.0, 0
        for start in range(0, m, bs):
            idx = order[start : start + bs]
            with np.errstate(over="ignore", invalid="ignore"):
                value, gW, gT = _loss_grad(p, X[idx], Y[idx], cfg.loss)
            if not np.isfinite(value):
                raise DivergenceError(epoch)
            for i in range(len(p.W)):
                p.W[i] -= lr * gW[i]
                p.T[i] -= lr * gT[i]
            total += value
            n_batches += 1
        history.append((epoch, total / max(n_batches, 1)))
    if cfg.epochs == 0:
        trained = net
    else:
        prov = {"op": "trained", "dims": list(net.layer_dims), "config": cfg.as_dict()}
        origin = net.metadata.get("provenance", {"op": "net"})
        if origin["op"] not in ("init", "net"):
            prov["operands"] = [dict(origin)]  # fine-tuned composite
        if not all(np.isfinite(w).all() for w in p.W + p.T):
            raise DivergenceError(cfg.epochs, "training produced non-finite parameters")
        trained = p.freeze(net, {"provenance": prov})
    report = evaluate(trained, data)
    report.loss_history = history
    return trained, report


def fine_tune(net: Mlp, data: LabeledDataset, cfg: TrainConfig | None = None):
    """A short :func:`train_sgd` run (200 epochs by default) on a composed net."""
    if cfg is None:
        cfg = TrainConfig(epochs=200)
    return train_sgd(net, data, cfg)


def _predictions(outputs: np.ndarray, scalar: bool) -> np.ndarray:
    if scalar:
        return (outputs[:, 0] >= 0.5).astype(int)
    return np.argmax(outputs, axis=1)  # first maximum wins ties


def _report(pred, truth, n_classes) -> EvalReport:
    hit = pred == truth
    pc = [int(np.sum(hit & (truth == c))) for c in range(n_classes)]
    pt = [int(np.sum(truth == c)) for c in range(n_classes)]
    return EvalReport(int(hit.sum()), int(len(truth)), pc, pt)


def accuracy_scalar(net: Mlp, data: LabeledDataset) -> EvalReport:
    """Positive iff output >= 0.5."""
    if net.output_dim != 1 or not data.is_scalar:
        raise DimensionError("scalar rule needs a scalar-output net and scalar labels")
    return report_from_outputs(net(data.data), data)


def accuracy_argmax(net: Mlp, data: LabeledDataset) -> EvalReport:
    """Predicted class is the first index of the maximum output."""
    if net.output_dim < 2 or net.output_dim != data.n_labels:
        raise DimensionError(
            f"argmax rule needs output width {net.output_dim} == label width "
            f"{data.n_labels} >= 2"
        )
    return report_from_outputs(net(data.data), data)


def report_from_outputs(outputs, data: LabeledDataset) -> EvalReport:
    """Score precomputed outputs: 0.5 rule for one column, argmax otherwise."""
    outputs = np.asarray(outputs, dtype=float).reshape(len(data), -1)
    if outputs.shape[1] != data.n_labels:
        raise DimensionError(f"{outputs.shape[1]} outputs vs {data.n_labels} labels")
    scalar = data.is_scalar
    return _report(_predictions(outputs, scalar), data.classes(), 2 if scalar else data.n_labels)


def evaluate(net: Mlp, data: LabeledDataset) -> EvalReport:
    if data.is_scalar:
        return accuracy_scalar(net, data)
    return accuracy_argmax(net, data)
