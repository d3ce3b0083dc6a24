"""End-to-end pipelines: building classifiers for composite shapes from simple parts.

Each pipeline derives every random stream from a single master seed, so reruns
with the same arguments reproduce every network and number exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import algebra, netfile
from .core import Mlp
from .data import (
    DEFAULT_EPS,
    Annulus,
    Ball,
    LabeledDataset,
    Product,
    Shape,
    Union,
    make_characteristic_dataset,
    make_multilabel_dataset,
    product_dataset,
    sample_positive,
)
from .train import EvalReport, TrainConfig, accuracy_argmax, accuracy_scalar, init_mlp, train_sgd

__all__ = [
    "seeds",
    "product_characteristic_dataset",
    "characteristic_net",
    "ClauseResult",
    "verify_theorem1",
    "TorusResult",
    "run_torus",
    "MultilabelResult",
    "run_multilabel",
]


def seeds(master: int, n: int) -> list[int]:
    """``n`` independent integer seeds derived from ``master``."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(master).spawn(n)]


def default_dims(dim: int) -> list[int]:
    """The ``n x (n+1) x 1`` architecture that suffices for a ball in R^n."""
    return [dim, dim + 1, 1]


def characteristic_net(
    data: LabeledDataset, dims=None, cfg: TrainConfig = TrainConfig()
) -> tuple[Mlp, EvalReport]:
    """Train a scalar net on ``data`` from a seeded random initialisation."""
    dims = list(dims) if dims is not None else default_dims(data.dim)
    net = init_mlp(dims, cfg.seed, cfg.init_scale)
    return train_sgd(net, data, cfg)


def product_characteristic_dataset(a: Shape, b: Shape, eps, n, seed) -> LabeledDataset:
    """``n`` rows from the product of two fresh characteristic datasets of ``a`` and ``b``."""
    s1, s2, s3 = seeds(seed, 3)
    da = make_characteristic_dataset(a, eps, n // 2, n - n // 2, s1)
    db = make_characteristic_dataset(b, eps, n // 2, n - n // 2, s2)
    return product_dataset(da, db, max_pairs=n, seed=s3)


@dataclass(frozen=True)
class ClauseResult:
    clause: int
    name: str
    composed: float  # accuracy of the net built with the algebra
    direct: float  # accuracy of a net trained directly on the composite set

    @property
    def gap(self) -> float:
        return abs(self.composed - self.direct)


def verify_theorem1(
    shape_a: Shape,
    shape_b: Shape,
    eps: float = DEFAULT_EPS,
    cfg: TrainConfig = TrainConfig(),
    lam: float = algebra.DEFAULT_LAMBDA,
    n_train: int = 1000,
    n_eval: int = 2000,
    seed: int = 0,
) -> list[ClauseResult]:
    """Compare composed and directly trained characteristic nets, clause by clause.

    1. ``complement(N_A)`` against a net trained on the flipped labels of A.
    2. ``sum(N_A, N_B)`` against a net trained on A u B (same space required).
    3. ``i_product(N_A, N_B)`` against a net trained on A x B.

    Directly trained nets use the composed net's layer dims.  The product set
    lives in a higher-dimensional space, so its direct net sees four times the
    rows for a quarter of the epochs (the same number of SGD updates).
    Accuracies are measured on freshly sampled evaluation sets of ``n_eval``
    points.
    """
    s = seeds(seed, 12)
    half = n_train // 2

    def fit(data, dims, k, epochs=cfg.epochs):
        return characteristic_net(data, dims, _with_seed(cfg, s[k], epochs))[0]

    train_a = make_characteristic_dataset(shape_a, eps, half, n_train - half, s[0])
    train_b = make_characteristic_dataset(shape_b, eps, half, n_train - half, s[1])
    net_a = fit(train_a, None, 2)
    net_b = fit(train_b, None, 3)
    results = []

    comp = algebra.complement(net_a)
    direct_c = fit(train_a.flipped(), comp.layer_dims, 4)
    eval_c = make_characteristic_dataset(
        shape_a, eps, n_eval // 2, n_eval - n_eval // 2, s[5]
    ).flipped()
    results.append(
        ClauseResult(
            1,
            "complement",
            accuracy_scalar(comp, eval_c).accuracy,
            accuracy_scalar(direct_c, eval_c).accuracy,
        )
    )

    if shape_a.dim == shape_b.dim:
        union = Union((shape_a, shape_b))
        summed = algebra.sum_net(net_a, net_b, lam)
        train_u = make_characteristic_dataset(union, eps, half, n_train - half, s[6])
        direct_u = fit(train_u, summed.layer_dims, 7)
        eval_u = make_characteristic_dataset(union, eps, n_eval // 2, n_eval - n_eval // 2, s[8])
        results.append(
            ClauseResult(
                2,
                "sum",
                accuracy_scalar(summed, eval_u).accuracy,
                accuracy_scalar(direct_u, eval_u).accuracy,
            )
        )

    prod = algebra.i_product(net_a, net_b, lam)
    train_p = product_characteristic_dataset(shape_a, shape_b, eps, 4 * n_train, s[9])
    direct_p = fit(train_p, prod.layer_dims, 10, max(cfg.epochs // 4, 1))
    eval_p = product_characteristic_dataset(shape_a, shape_b, eps, n_eval, s[11])
    results.append(
        ClauseResult(
            3,
            "i_product",
            accuracy_scalar(prod, eval_p).accuracy,
            accuracy_scalar(direct_p, eval_p).accuracy,
        )
    )
    return results


def _with_seed(cfg: TrainConfig, seed: int, epochs: int | None = None) -> TrainConfig:
    d = cfg.as_dict()
    d["seed"] = seed
    if epochs is not None:
        d["epochs"] = epochs
    return TrainConfig(**d)


@dataclass
class TorusResult:
    accuracy: dict[str, float]
    probe_positive: dict[str, float]  # fraction of inner-disk probes classified positive
    n_eval: int
    n_probe: int
    nets: dict[str, Mlp] = field(default_factory=dict)

    def table(self) -> str:
        lines = [f"{'variant':<16}{'torus acc':>12}{'probe pos':>12}"]
        for k in self.accuracy:
            lines.append(f"{k:<16}{self.accuracy[k]:>12.4f}{self.probe_positive[k]:>12.4f}")
        return "\n".join(lines)


def run_torus(
    R: float = 1.0,
    r: float = 0.5,
    eps: float = 0.05,
    lam: float = algebra.DEFAULT_LAMBDA,
    seed: int = 0,
    cfg: TrainConfig = TrainConfig(),
    n_train: int = 1000,
    n_eval: int = 4000,
    n_probe: int = 500,
    out_dir=None,
) -> TorusResult:
    """Characteristic net of the torus S^1 x S^1 in R^4 from two trained disks.

    The annulus is built twice, with ``set_difference`` (big AND NOT small)
    and with ``difference`` (big OR NOT small); each is squared with
    ``i_product``.  The probe set holds points whose two planar projections
    both lie inside the small disk: off the torus, yet fired on by the OR
    variant.
    """
    if not 0 < r < R:
        raise ValueError(f"need 0 < r < R, got r={r}, R={R}")
    s = seeds(seed, 6)
    half = n_train // 2
    origin = np.zeros(2)
    big, small = Ball(origin, R), Ball(origin, r)
    data_big = make_characteristic_dataset(big, eps, half, n_train - half, s[0])
    data_small = make_characteristic_dataset(small, eps, half, n_train - half, s[1])
    net_big, _ = characteristic_net(data_big, cfg=_with_seed(cfg, s[2]))
    net_small, _ = characteristic_net(data_small, cfg=_with_seed(cfg, s[3]))
    net_big, net_small = algebra.align_depths(net_big, net_small)

    annulus = Annulus(origin, r, R)
    eval_set = product_characteristic_dataset(annulus, annulus, eps, n_eval, s[4])
    probe_shape = Ball(origin, r - eps) if r > eps else small
    probe = sample_positive(Product(probe_shape, probe_shape), n_probe, s[5])

    nets = {"disk_R": net_big, "disk_r": net_small}
    accuracy, probe_pos = {}, {}
    for variant, build in (
        ("set_difference", algebra.set_difference),
        ("difference", algebra.difference),
    ):
        ring = build(net_big, net_small, lam)
        torus = algebra.i_product(ring, ring, lam)
        nets[f"annulus_{variant}"] = ring
        nets[f"torus_{variant}"] = torus
        accuracy[variant] = accuracy_scalar(torus, eval_set).accuracy
        probe_pos[variant] = float(np.mean(torus(probe)[:, 0] >= 0.5)) if n_probe else 0.0

    result = TorusResult(accuracy, probe_pos, len(eval_set), n_probe, nets)
    if out_dir is not None:
        _write_torus(result, Path(out_dir))
    return result


def _write_torus(result: TorusResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, net in result.nets.items():
        netfile.save(net, out / f"{name}.net")
    with open(out / "accuracy.csv", "w") as fh:
        fh.write("variant,accuracy,probe_positive_fraction,n_eval,n_probe\n")
        for k in result.accuracy:
            fh.write(
                f"{k},{result.accuracy[k]!r},{result.probe_positive[k]!r},"
                f"{result.n_eval},{result.n_probe}\n"
            )


@dataclass
class MultilabelResult:
    argmax_accuracy: float
    component_accuracy: list[float]
    report: EvalReport
    nets: list[Mlp]
    combined: Mlp


def run_multilabel(
    shapes: Sequence[Shape],
    eps: float = DEFAULT_EPS,
    seed: int = 0,
    cfg: TrainConfig = TrainConfig(),
    n_train: int = 1000,
    n_eval: int = 500,
    dims=None,
    out_dir=None,
) -> MultilabelResult:
    """One characteristic net per label, joined by ``multi_o_product`` and read by argmax.

    Also extracts each label back out with ``component`` and scores it on a fresh
    characteristic dataset of its shape.
    """
    shapes = list(shapes)
    k = len(shapes)
    if k < 2:
        raise ValueError("need at least two shapes")
    s = seeds(seed, 3 * k + 1)
    half = n_train // 2
    nets = []
    for i, shape in enumerate(shapes):
        data = make_characteristic_dataset(shape, eps, half, n_train - half, s[i])
        nets.append(characteristic_net(data, dims, _with_seed(cfg, s[k + i]))[0])
    # o-products need equal depths
    depth = max(n.depth for n in nets)
    for i, n in enumerate(nets):
        while n.depth < depth:
            n = algebra.identical_extension(n)
        nets[i] = n
    combined = algebra.multi_o_product(nets)
    test = make_multilabel_dataset(shapes, n_eval, s[-1])
    report = accuracy_argmax(combined, test)
    comp_acc = []
    for i, shape in enumerate(shapes):
        ev = make_characteristic_dataset(shape, eps, n_eval, n_eval, s[2 * k + i])
        comp_acc.append(accuracy_scalar(algebra.component(combined, i + 1), ev).accuracy)
    result = MultilabelResult(report.accuracy, comp_acc, report, nets, combined)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, n in enumerate(nets):
            netfile.save(n, out / f"label{i + 1}.net")
        netfile.save(combined, out / "combined.net")
        report.write_csv(out / "report.csv")
        with open(out / "components.csv", "w") as fh:
            fh.write("label,accuracy\n")
            for i, a in enumerate(comp_acc):
                fh.write(f"{i + 1},{a!r}\n")
    return result
