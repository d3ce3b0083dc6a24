"""Weight-level constructions that combine, complement and split networks.

Every operation is a pure function returning a new :class:`~mlpalg.core.Mlp`;
operands are never modified.  The combining operations append one layer whose
single unit computes ``sigmoid(lam * sum(outputs) - c * lam)``:

=================  =================  ======================
operation          inputs             offset ``c``
=================  =================  ======================
sum / multi_sum    shared             0.5  (soft OR)
conjunction        shared             1.5  (soft AND)
i_product          concatenated       1.5
multi_i_product    concatenated       m - 0.5
=================  =================  ======================

``difference`` is ``sum(n1, complement(n2))``, i.e. ``n1 OR NOT n2``.  This is
*not* set difference: points outside both operands fire.  Use
``set_difference`` (``n1 AND NOT n2``) to carve one region out of another.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .core import RELU, SIGMOID, Activation, DimensionError, Mlp, MlpError, check, unit_tags

DEFAULT_LAMBDA = 20.0

__all__ = [
    "DEFAULT_LAMBDA",
    "PreconditionError",
    "ComposeReport",
    "compose_report",
    "provenance_tree",
    "complement",
    "sum_net",
    "multi_sum",
    "difference",
    "conjunction",
    "set_difference",
    "i_product",
    "multi_i_product",
    "component",
    "o_product",
    "multi_o_product",
    "identical_extension",
    "align_depths",
]


class PreconditionError(MlpError):
    """An operand does not satisfy an operation's preconditions."""


@dataclass(frozen=True)
class ComposeReport:
    operation: str
    operand_dims: tuple[tuple[int, ...], ...]
    result_dims: tuple[int, ...]
    lam: float | None = None


def _prov(net: Mlp) -> dict:
    return dict(net.metadata.get("provenance", {"op": "net", "dims": list(net.layer_dims)}))


def _tag(result: Mlp, op: str, operands: Sequence[Mlp], lam=None, **extra) -> Mlp:
    prov = {"op": op, "dims": list(result.layer_dims)}
    if lam is not None:
        prov["lambda"] = float(lam)
    prov.update(extra)
    prov["operands"] = [_prov(n) for n in operands]
    return result.replace(metadata={"provenance": prov})


def compose_report(net: Mlp) -> ComposeReport:
    prov = _prov(net)
    return ComposeReport(
        operation=prov["op"],
        operand_dims=tuple(tuple(p["dims"]) for p in prov.get("operands", [])),
        result_dims=net.layer_dims,
        lam=prov.get("lambda"),
    )


def provenance_tree(net: Mlp) -> str:
    """One-line rendering such as ``i_product(set_difference(trained, trained), ...)``."""

    def render(p):
        ops = p.get("operands")
        name = p["op"]
        if "index" in p:
            name += f"[{p['index']}]"
        if not ops:
            return name
        return f"{name}({', '.join(render(o) for o in ops)})"

    return render(_prov(net))


def _lam(lam) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise PreconditionError(f"sharpness lambda must be positive, got {lam}")
    return lam


def _scalar_operands(nets: Sequence[Mlp], op: str, shared_input: bool) -> None:
    if not nets:
        raise PreconditionError(f"{op} needs at least one operand")
    for n in nets:
        check(n)
    depths = {n.depth for n in nets}
    if len(depths) > 1:
        raise PreconditionError(
            f"{op}: operand depths differ {sorted(depths)}; use align_depths first"
        )
    for n in nets:
        if n.output_dim != 1:
            raise PreconditionError(f"{op}: operands must have scalar output, got {n.output_dim}")
    if shared_input and len({n.input_dim for n in nets}) > 1:
        raise DimensionError(
            f"{op}: input dimensions differ {[n.input_dim for n in nets]}"
        )


def _map_activation(nets: Sequence[Mlp], i: int):
    acts = [n.activations[i] for n in nets]
    if all(a is acts[0] for a in acts) and isinstance(acts[0], Activation):
        return acts[0]
    return tuple(t for n in nets for t in unit_tags(n, i))


def _parallel(nets: Sequence[Mlp], shared_input: bool):
    """Place operands side by side.  Returns dims, weights, thresholds, activations."""
    L = nets[0].depth
    first = nets[0].input_dim if shared_input else sum(n.input_dim for n in nets)
    dims = [first] + [sum(n.layer_dims[k] for n in nets) for k in range(1, L)]
    weights, thresholds, acts = [], [], []
    for i in range(L - 1):
        blocks = [n.weights[i] for n in nets]
        if i == 0 and shared_input:
            weights.append(np.vstack(blocks))
        else:
            weights.append(block_diag(*blocks))
        thresholds.append(np.concatenate([n.thresholds[i] for n in nets]))
        acts.append(_map_activation(nets, i))
    return dims, weights, thresholds, acts


def _combine(nets, lam, offset, shared_input) -> Mlp:
    dims, weights, thresholds, acts = _parallel(nets, shared_input)
    m = len(nets)
    weights.append(np.full((1, m), lam))
    thresholds.append(np.array([offset * lam]))
    acts.append(SIGMOID)
    return Mlp(dims + [1], weights, thresholds, acts)


def complement(net: Mlp) -> Mlp:
    """Net computing ``1 - net(x)``: negate the final weights and thresholds."""
    check(net)
    if net.depth < 3:
        raise PreconditionError(f"complement needs at least 3 layers, got {net.depth}")
    if set(unit_tags(net, net.depth - 2)) != {SIGMOID}:
        raise PreconditionError("complement needs a sigmoid output map")
    weights = net.weights[:-1] + (-net.weights[-1],)
    thresholds = net.thresholds[:-1] + (-net.thresholds[-1],)
    result = net.replace(weights=weights, thresholds=thresholds)
    prov = _prov(net)
    if prov["op"] == "complement" and "inner" in prov:
        return result.replace(metadata={"provenance": prov["inner"]})
    return _tag(result, "complement", [net], inner=prov)


def sum_net(n1: Mlp, n2: Mlp, lam: float = DEFAULT_LAMBDA) -> Mlp:
    """Soft OR of two scalar nets over a shared input."""
    return _tag(_build_multi_sum([n1, n2], lam, "sum"), "sum", [n1, n2], lam)


def _build_multi_sum(nets, lam, op):
    lam = _lam(lam)
    _scalar_operands(nets, op, shared_input=True)
    return _combine(nets, lam, 0.5, shared_input=True)


def multi_sum(nets: Sequence[Mlp], lam: float = DEFAULT_LAMBDA) -> Mlp:
    """Soft OR of ``m`` scalar nets: ``sigmoid(lam * sum_i n_i(x) - 0.5 lam)``."""
    nets = list(nets)
    return _tag(_build_multi_sum(nets, lam, "multi_sum"), "multi_sum", nets, lam)


def difference(n1: Mlp, n2: Mlp, lam: float = DEFAULT_LAMBDA) -> Mlp:
    """``n1 + complement(n2)``, which is ``n1 OR NOT n2``."""
    result = _build_multi_sum([n1, complement(n2)], lam, "difference")
    return _tag(result, "difference", [n1, n2], lam)


def conjunction(n1: Mlp, n2: Mlp, lam: float = DEFAULT_LAMBDA) -> Mlp:
    """Soft AND of two scalar nets over a shared input."""
    lam = _lam(lam)
    _scalar_operands([n1, n2], "conjunction", shared_input=True)
    return _tag(_combine([n1, n2], lam, 1.5, True), "conjunction", [n1, n2], lam)


def set_difference(n1: Mlp, n2: Mlp, lam: float = DEFAULT_LAMBDA) -> Mlp:
    """``n1 AND NOT n2``: fires where ``n1`` fires and ``n2`` does not."""
    lam = _lam(lam)
    nc = complement(n2)
    _scalar_operands([n1, nc], "set_difference", shared_input=True)
    return _tag(_combine([n1, nc], lam, 1.5, True), "set_difference", [n1, n2], lam)


def i_product(n1: Mlp, n2: Mlp, lam: float = DEFAULT_LAMBDA) -> Mlp:
    """Soft AND over the Cartesian product: input is ``x1`` followed by ``x2``."""
    lam = _lam(lam)
    _scalar_operands([n1, n2], "i_product", shared_input=False)
    return _tag(_combine([n1, n2], lam, 1.5, False), "i_product", [n1, n2], lam)


def multi_i_product(
    nets: Sequence[Mlp], lam: float = DEFAULT_LAMBDA, offset: float | None = None
) -> Mlp:
    """m-way soft AND over concatenated inputs.

    The output threshold is ``(m - 0.5) * lam`` unless ``offset`` overrides the
    multiplier.  ``offset=1.5`` reproduces a binary threshold that, for m > 2,
    fires as soon as any two operands fire.
    """
    nets = list(nets)
    lam = _lam(lam)
    _scalar_operands(nets, "multi_i_product", shared_input=False)
    c = len(nets) - 0.5 if offset is None else float(offset)
    return _tag(_combine(nets, lam, c, False), "multi_i_product", nets, lam)


def component(net: Mlp, index: int) -> Mlp:
    """Scalar net computing coordinate ``index`` (1-based) of ``net``'s output."""
    check(net)
    if not 1 <= index <= net.output_dim:
        raise PreconditionError(f"component index {index} outside 1..{net.output_dim}")
    row = index - 1
    acts = net.activations[:-1] + (unit_tags(net, net.depth - 2)[row],)
    result = Mlp(
        net.layer_dims[:-1] + (1,),
        net.weights[:-1] + (net.weights[-1][row : row + 1],),
        net.thresholds[:-1] + (net.thresholds[-1][row : row + 1],),
        acts,
    )
    return _tag(result, "component", [net], index=index)


def _o_product(nets, op):
    if len(nets) < 2:
        raise PreconditionError(f"{op} needs at least two operands")
    _scalar_operands(nets, op, shared_input=True)
    dims, weights, thresholds, acts = _parallel(nets, shared_input=True)
    return _tag(Mlp(dims, weights, thresholds, acts), op, nets)


def o_product(n1: Mlp, n2: Mlp) -> Mlp:
    """Two-output net ``x -> (n1(x), n2(x))`` with no extra layer."""
    return _o_product([n1, n2], "o_product")


def multi_o_product(nets: Sequence[Mlp]) -> Mlp:
    """m-output net ``x -> (n_1(x), ..., n_m(x))``; pair with argmax for labels."""
    return _o_product(list(nets), "multi_o_product")


def identical_extension(net: Mlp) -> Mlp:
    """Append an identity-weight ReLU layer; outputs are unchanged.

    Exact because every output map (sigmoid or ReLU) produces nonnegative values.
    """
    check(net)
    n = net.output_dim
    result = Mlp(
        net.layer_dims + (n,),
        net.weights + (np.eye(n),),
        net.thresholds + (np.zeros(n),),
        net.activations + (RELU,),
    )
    return _tag(result, "extend", [net])


def align_depths(n1: Mlp, n2: Mlp) -> tuple[Mlp, Mlp]:
    """Extend the shallower operand until both have the same number of layers."""
    check(n1)
    check(n2)
    while n1.depth < n2.depth:
        n1 = identical_extension(n1)
    while n2.depth < n1.depth:
        n2 = identical_extension(n2)
    return n1, n2
