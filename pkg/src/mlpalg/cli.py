"""Command-line interface: ``mlpalg train | compose | eval | inspect | demo-torus | demo-multilabel``.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import algebra, netfile
from .core import Activation, MlpError
from .data import (
    DEFAULT_EPS,
    SamplingError,
    load_csv,
    make_characteristic_dataset,
    make_multilabel_dataset,
    parse_shape,
    save_csv,
)
from .experiments import run_multilabel, run_torus
from .train import DivergenceError, TrainConfig, accuracy_argmax, accuracy_scalar, init_mlp, train_sgd

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3

SHAPE_HELP = """\
shape grammar:
  ball:C:R            open ball, center C (comma-separated), radius R
  annulus:C:r:R       open annulus r < |x - C| < R
  box:LO:HI           open box
  prod(S,S)           Cartesian product (coordinates of the first shape first)
  union(S,S,...)      union of shapes in the same space
examples: ball:0,0:1   annulus:0,0:0.5:1   prod(ball:0,0:1,ball:0,0:1)
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _default_seed() -> int:
    raw = os.environ.get("MLPALG_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"MLPALG_SEED must be an integer, got {raw!r}") from None


def _dims(text: str) -> list[int]:
    try:
        dims = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --dims {text!r}") from None
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"--dims needs at least two positive sizes, got {text!r}")
    return dims


def _shape(text: str):
    try:
        return parse_shape(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_train_flags(p, epochs=2000):
    p.add_argument("--epochs", type=int, default=epochs)
    p.add_argument("--lr", type=float, default=0.5, help="learning rate")
    p.add_argument("--batch", type=int, default=32, help="mini-batch size")
    p.add_argument("--loss", choices=["bce", "mse"], default="bce")
    p.add_argument("--seed", type=int, default=None, help="master seed (default $MLPALG_SEED or 0)")


def _config(args, seed) -> TrainConfig:
    try:
        return TrainConfig(args.lr, args.epochs, args.batch, args.loss, seed=seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mlpalg",
        description="Build, compose and evaluate multilayer perceptrons.",
        epilog=SHAPE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a characteristic net of a shape", epilog=SHAPE_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--shape", type=_shape, required=True)
    p.add_argument("--dims", type=_dims, required=True, help="layer sizes, e.g. 2,3,1")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--n-pos", type=int, default=500)
    p.add_argument("--n-neg", type=int, default=500)
    p.add_argument("--out", type=Path, required=True, help="network file to write")
    p.add_argument("--data-out", type=Path, help="also write the training set as CSV")
    _add_train_flags(p)

    p = sub.add_parser("compose", help="combine network files")
    p.add_argument("op", choices=sorted(_OPS))
    p.add_argument("operands", nargs="+", type=Path)
    p.add_argument("--lambda", dest="lam", type=float, default=algebra.DEFAULT_LAMBDA)
    p.add_argument("--index", type=int, help="1-based output index for 'component'")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("eval", help="accuracy of a net on a dataset", epilog=SHAPE_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("net", type=Path)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", type=Path, help="dataset CSV")
    src.add_argument("--shape", type=_shape, action="append",
                     help="sample a fresh dataset; repeat once per class for --rule argmax")
    p.add_argument("--rule", choices=["scalar", "argmax"], default="scalar")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--n", type=int, default=1000, help="points per class when sampling")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, help="report CSV")

    p = sub.add_parser("inspect", help="describe a network file")
    p.add_argument("net", type=Path)

    p = sub.add_parser("demo-torus", help="torus net from two trained disks")
    p.add_argument("--R", type=float, default=1.0, help="outer radius")
    p.add_argument("--r", type=float, default=0.5, help="inner radius")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--lambda", dest="lam", type=float, default=algebra.DEFAULT_LAMBDA)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    _add_train_flags(p)

    p = sub.add_parser("demo-multilabel", help="multi-label net from per-shape nets",
                       epilog=SHAPE_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--shape", type=_shape, action="append", required=True,
                   help="one shape per label (repeat)")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    _add_train_flags(p)
    return parser


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.stem + suffix)


def cmd_train(args) -> int:
    seed = _default_seed() if args.seed is None else args.seed
    cfg = _config(args, seed)
    if args.dims[0] != args.shape.dim:
        raise MlpError(f"--dims input size {args.dims[0]} but shape lives in R^{args.shape.dim}")
    if args.dims[-1] != 1:
        raise MlpError(f"--dims output size {args.dims[-1]} but characteristic labels are scalar")
    data = make_characteristic_dataset(args.shape, args.eps, args.n_pos, args.n_neg, seed)
    net, report = train_sgd(init_mlp(args.dims, seed, cfg.init_scale), data, cfg)
    meta = dict(net.metadata)
    meta["provenance"] = dict(meta["provenance"], shape=repr(args.shape), eps=args.eps)
    net = net.replace(metadata=meta)
    netfile.save(net, args.out)
    report.write_csv(_sibling(args.out, ".report.csv"))
    report.write_loss_csv(_sibling(args.out, ".loss.csv"))
    if args.data_out:
        save_csv(data, args.data_out)
    print(f"trained {','.join(map(str, net.layer_dims))} on {args.shape!r}")
    print(f"accuracy: {report.accuracy:.4f} ({report.correct}/{report.total})")
    return EXIT_OK


def _need_two(op):
    def f(nets, args):
        if len(nets) != 2:
            raise UsageError(f"{op} takes exactly two operands")
        return getattr(algebra, op)(*nets, args.lam)

    return f


def _need_one(fn):
    def f(nets, args):
        if len(nets) != 1:
            raise UsageError("this operation takes exactly one operand")
        return fn(nets[0], args)

    return f


def _component(net, args):
    if args.index is None:
        raise UsageError("component needs --index")
    return algebra.component(net, args.index)


def _align(nets, args):
    if len(nets) != 2:
        raise UsageError("align takes exactly two operands")
    return algebra.align_depths(*nets)


def _o_product(nets, args):
    if len(nets) != 2:
        raise UsageError("o-product takes exactly two operands")
    return algebra.o_product(*nets)


_OPS = {
    "complement": _need_one(lambda n, a: algebra.complement(n)),
    "sum": _need_two("sum_net"),
    "multi-sum": lambda nets, a: algebra.multi_sum(nets, a.lam),
    "difference": _need_two("difference"),
    "set-difference": _need_two("set_difference"),
    "conjunction": _need_two("conjunction"),
    "i-product": _need_two("i_product"),
    "multi-i-product": lambda nets, a: algebra.multi_i_product(nets, a.lam),
    "component": _need_one(_component),
    "o-product": _o_product,
    "multi-o-product": lambda nets, a: algebra.multi_o_product(nets),
    "extend": _need_one(lambda n, a: algebra.identical_extension(n)),
    "align": _align,
}


def cmd_compose(args) -> int:
    nets = [netfile.load(p) for p in args.operands]
    result = _OPS[args.op](nets, args)
    if isinstance(result, tuple):
        # align: write <out stem>.1<suffix> and <out stem>.2<suffix>
        for i, net in enumerate(result, 1):
            path = args.out.with_name(f"{args.out.stem}.{i}{args.out.suffix}")
            netfile.save(net, path)
            print(f"{path}: {','.join(map(str, net.layer_dims))}")
        return EXIT_OK
    meta = dict(result.metadata)
    meta["provenance"] = dict(meta["provenance"], files=[str(p) for p in args.operands])
    result = result.replace(metadata=meta)
    netfile.save(result, args.out)
    print(f"{args.op}: {','.join(map(str, result.layer_dims))} -> {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    net = netfile.load(args.net)
    seed = _default_seed() if args.seed is None else args.seed
    if args.data is not None:
        data = load_csv(args.data)
    elif args.rule == "argmax":
        data = make_multilabel_dataset(args.shape, args.n, seed)
    else:
        if len(args.shape) != 1:
            raise UsageError("scalar rule takes a single --shape")
        data = make_characteristic_dataset(args.shape[0], args.eps, args.n, args.n, seed)
    if args.rule == "scalar":
        report = accuracy_scalar(net, data)
    else:
        report = accuracy_argmax(net, data)
    if args.out:
        report.write_csv(args.out)
    print(f"accuracy: {report.accuracy:.4f} ({report.correct}/{report.total})")
    return EXIT_OK


def describe(net) -> str:
    lines = [
        f"layers: {','.join(map(str, net.layer_dims))}",
        "activations: "
        + ", ".join(
            a.value if isinstance(a, Activation) else "mixed(" + ",".join(t.value for t in a) + ")"
            for a in net.activations
        ),
        "parameters: "
        + ", ".join(f"{w.size}+{t.size}" for w, t in zip(net.weights, net.thresholds))
        + f" (total {net.n_params})",
        f"provenance: {algebra.provenance_tree(net)}",
    ]
    prov = net.metadata.get("provenance", {})
    if "lambda" in prov:
        lines.append(f"lambda: {prov['lambda']:g}")
    return "\n".join(lines)


def cmd_inspect(args) -> int:
    print(describe(netfile.load(args.net)))
    return EXIT_OK


def cmd_demo_torus(args) -> int:
    if not 0 < args.r < args.R:
        raise UsageError(f"need 0 < r < R, got r={args.r}, R={args.R}")
    seed = _default_seed() if args.seed is None else args.seed
    cfg = _config(args, seed)
    result = run_torus(args.R, args.r, args.eps, args.lam, seed, cfg, out_dir=args.out)
    print(result.table())
    print(f"evaluated on {result.n_eval} points, {result.n_probe} inner-disk probes; files in {args.out}")
    return EXIT_OK


def cmd_demo_multilabel(args) -> int:
    if len(args.shape) < 2:
        raise UsageError("demo-multilabel needs at least two --shape arguments")
    seed = _default_seed() if args.seed is None else args.seed
    cfg = _config(args, seed)
    result = run_multilabel(args.shape, args.eps, seed, cfg, out_dir=args.out)
    print(f"argmax accuracy: {result.argmax_accuracy:.4f}")
    for i, a in enumerate(result.component_accuracy, 1):
        print(f"component {i} accuracy: {a:.4f}")
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "compose": cmd_compose,
    "eval": cmd_eval,
    "inspect": cmd_inspect,
    "demo-torus": cmd_demo_torus,
    "demo-multilabel": cmd_demo_multilabel,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SamplingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (MlpError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
