"""Geometric shapes and labeled datasets sampled from them.

Shapes are open regions with an exact membership test and an exact distance
function.  Positives are drawn uniformly from a shape; negatives uniformly from
a bounding window minus the shape's eps-neighbourhood, so a band of width eps
around every shape is never sampled.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_EPS = 0.1
DEFAULT_MARGIN = 1.0
MAX_PAIRS = 10**6
_MIN_ACCEPTANCE = 1e-4

__all__ = [
    "Shape",
    "Ball",
    "Annulus",
    "Box",
    "Product",
    "Union",
    "LabeledDataset",
    "SamplingError",
    "membership",
    "sample_positive",
    "sample_negative",
    "make_characteristic_dataset",
    "make_multilabel_dataset",
    "product_dataset",
    "parse_shape",
    "save_csv",
    "load_csv",
]


class SamplingError(RuntimeError):
    """Rejection sampling accepts too few candidates to be practical."""


class Shape:
    dim: int

    def contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def distance(self, points) -> np.ndarray:
        """Euclidean distance to the (closure of the) shape; 0 inside."""
        raise NotImplementedError

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def _rows(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        if p.ndim == 1:
            p = p[None, :]
        if p.shape[-1] != self.dim:
            raise ValueError(f"points have dimension {p.shape[-1]}, shape has {self.dim}")
        return p


@dataclass(frozen=True, eq=False)
class Ball(Shape):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).ravel())
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def dim(self):
        return self.center.size

    def contains(self, points):
        return np.linalg.norm(self._rows(points) - self.center, axis=1) < self.radius

    def distance(self, points):
        r = np.linalg.norm(self._rows(points) - self.center, axis=1)
        return np.maximum(r - self.radius, 0.0)

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    def __repr__(self):
        return f"ball:{_fmt(self.center)}:{self.radius:g}"


@dataclass(frozen=True, eq=False)
class Annulus(Shape):
    center: np.ndarray
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).ravel())
        if not 0 < self.r_inner < self.r_outer:
            raise ValueError(f"need 0 < r_inner < r_outer, got {self.r_inner}, {self.r_outer}")

    @property
    def dim(self):
        return self.center.size

    def contains(self, points):
        r = np.linalg.norm(self._rows(points) - self.center, axis=1)
        return (r > self.r_inner) & (r < self.r_outer)

    def distance(self, points):
        r = np.linalg.norm(self._rows(points) - self.center, axis=1)
        return np.maximum.reduce([self.r_inner - r, r - self.r_outer, np.zeros_like(r)])

    def bounds(self):
        return self.center - self.r_outer, self.center + self.r_outer

    def __repr__(self):
        return f"annulus:{_fmt(self.center)}:{self.r_inner:g}:{self.r_outer:g}"


@dataclass(frozen=True, eq=False)
class Box(Shape):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).ravel()
        hi = np.asarray(self.hi, dtype=float).ravel()
        if lo.shape != hi.shape or not np.all(lo < hi):
            raise ValueError("box needs lo < hi in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.size

    def contains(self, points):
        p = self._rows(points)
        return np.all((p > self.lo) & (p < self.hi), axis=1)

    def distance(self, points):
        p = self._rows(points)
        excess = np.maximum(np.maximum(self.lo - p, p - self.hi), 0.0)
        return np.linalg.norm(excess, axis=1)

    def bounds(self):
        return self.lo.copy(), self.hi.copy()

    def __repr__(self):
        return f"box:{_fmt(self.lo)}:{_fmt(self.hi)}"


@dataclass(frozen=True, eq=False)
class Product(Shape):
    """Cartesian product; coordinates of ``left`` come first.

    Distance is the max of the factor distances (a sup-metric), so a point is
    eps-far from the product iff it is eps-far in at least one factor.
    """

    left: Shape
    right: Shape

    @property
    def dim(self):
        return self.left.dim + self.right.dim

    def _split(self, points):
        p = self._rows(points)
        return p[:, : self.left.dim], p[:, self.left.dim :]

    def contains(self, points):
        a, b = self._split(points)
        return self.left.contains(a) & self.right.contains(b)

    def distance(self, points):
        a, b = self._split(points)
        return np.maximum(self.left.distance(a), self.right.distance(b))

    def bounds(self):
        (l1, h1), (l2, h2) = self.left.bounds(), self.right.bounds()
        return np.concatenate([l1, l2]), np.concatenate([h1, h2])

    def __repr__(self):
        return f"prod({self.left!r},{self.right!r})"


@dataclass(frozen=True, eq=False)
class Union(Shape):
    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts or len({p.dim for p in parts}) != 1:
            raise ValueError("union needs one or more shapes of equal dimension")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim

    def contains(self, points):
        return np.any([s.contains(points) for s in self.parts], axis=0)

    def distance(self, points):
        return np.min([s.distance(points) for s in self.parts], axis=0)

    def bounds(self):
        lows, highs = zip(*(s.bounds() for s in self.parts))
        return np.min(lows, axis=0), np.max(highs, axis=0)

    def __repr__(self):
        return "union(" + ",".join(repr(p) for p in self.parts) + ")"


def _fmt(v):
    return ",".join(f"{x:g}" for x in v)


def membership(shape: Shape, p) -> bool:
    p = np.asarray(p, dtype=float)
    if p.shape != (shape.dim,):
        raise ValueError(f"point has shape {p.shape}, shape lives in R^{shape.dim}")
    return bool(shape.contains(p)[0])


def _rejection(accept, lo, hi, count, rng) -> np.ndarray:
    dim = lo.size
    if count == 0:
        return np.empty((0, dim))
    chunks, have, drawn = [], 0, 0
    batch = max(1024, 2 * count)
    while have < count:
        cand = rng.uniform(lo, hi, size=(batch, dim))
        ok = cand[accept(cand)]
        drawn += batch
        chunks.append(ok)
        have += len(ok)
        if have / drawn < _MIN_ACCEPTANCE:
            raise SamplingError(
                f"acceptance rate {have / drawn:.2e} below {_MIN_ACCEPTANCE:g}"
            )
    return np.concatenate(chunks)[:count]


def sample_positive(shape: Shape, count: int, seed: int = 0) -> np.ndarray:
    """``count`` points uniform over ``shape`` by rejection from its bounding box."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    lo, hi = shape.bounds()
    return _rejection(shape.contains, lo, hi, count, rng)


def sample_negative(
    shape: Shape,
    eps: float = DEFAULT_EPS,
    bbox_margin: float = DEFAULT_MARGIN,
    count: int = 0,
    seed: int = 0,
) -> np.ndarray:
    """Points uniform over the inflated bounding box at distance > eps from ``shape``."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if not bbox_margin > eps:
        raise ValueError(f"bbox_margin ({bbox_margin}) must exceed eps ({eps})")
    rng = np.random.default_rng(seed)
    lo, hi = shape.bounds()
    return _rejection(
        lambda p: shape.distance(p) > eps, lo - bbox_margin, hi + bbox_margin, count, rng
    )


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Data matrix (m x n) with labels (m x 1 in {0, 1}, or m x k one-hot)."""

    data: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        data = np.atleast_2d(np.asarray(self.data, dtype=float))
        labels = np.asarray(self.labels, dtype=float)
        if labels.ndim == 1:
            labels = labels[:, None]
        if data.shape[0] != labels.shape[0]:
            raise ValueError(f"{data.shape[0]} data rows but {labels.shape[0]} label rows")
        if labels.shape[1] == 1:
            if not np.all((labels == 0) | (labels == 1)):
                raise ValueError("scalar labels must be 0 or 1")
        elif labels.size and not (
            np.all((labels == 0) | (labels == 1)) and np.all(labels.sum(axis=1) == 1)
        ):
            raise ValueError("multi-label rows must be one-hot")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]

    @property
    def is_scalar(self) -> bool:
        return self.n_labels == 1

    def classes(self) -> np.ndarray:
        """0-based class index per row (argmax of one-hot, or the 0/1 label)."""
        if self.is_scalar:
            return self.labels[:, 0].astype(int)
        return np.argmax(self.labels, axis=1)

    def flipped(self) -> "LabeledDataset":
        if not self.is_scalar:
            raise ValueError("only scalar labels can be flipped")
        return LabeledDataset(self.data, 1.0 - self.labels)

    def subset(self, idx) -> "LabeledDataset":
        return LabeledDataset(self.data[idx], self.labels[idx])


def make_characteristic_dataset(
    shape: Shape,
    eps: float = DEFAULT_EPS,
    n_pos: int = 500,
    n_neg: int = 500,
    seed: int = 0,
    bbox_margin: float = DEFAULT_MARGIN,
) -> LabeledDataset:
    """Positives in ``shape`` labeled 1, eps-far negatives labeled 0, shuffled."""
    if n_pos < 1 or n_neg < 1:
        raise ValueError("need at least one positive and one negative")
    ss = np.random.SeedSequence(seed)
    s_pos, s_neg, s_mix = (int(s.generate_state(1)[0]) for s in ss.spawn(3))
    pos = sample_positive(shape, n_pos, s_pos)
    neg = sample_negative(shape, eps, bbox_margin, n_neg, s_neg)
    data = np.vstack([pos, neg])
    labels = np.concatenate([np.ones(n_pos), np.zeros(n_neg)])
    order = np.random.default_rng(s_mix).permutation(len(data))
    return LabeledDataset(data[order], labels[order])


def make_multilabel_dataset(
    shapes: Sequence[Shape], n_per_class: int = 500, seed: int = 0
) -> LabeledDataset:
    """One-hot dataset with ``n_per_class`` points drawn from each shape."""
    k = len(shapes)
    seeds = np.random.SeedSequence(seed).spawn(k + 1)
    blocks, labels = [], []
    for i, (shape, s) in enumerate(zip(shapes, seeds)):
        blocks.append(sample_positive(shape, n_per_class, int(s.generate_state(1)[0])))
        onehot = np.zeros((n_per_class, k))
        onehot[:, i] = 1.0
        labels.append(onehot)
    data, labels = np.vstack(blocks), np.vstack(labels)
    order = np.random.default_rng(seeds[-1]).permutation(len(data))
    return LabeledDataset(data[order], labels[order])


def product_dataset(
    d1: LabeledDataset, d2: LabeledDataset, max_pairs: int = MAX_PAIRS, seed: int = 0
) -> LabeledDataset:
    """Rows ``x1 ++ x2`` labeled ``label1 AND label2``.

    All pairs, in row-major order, when there are at most ``max_pairs`` of them;
    otherwise ``max_pairs`` distinct pairs chosen by ``seed``.
    """
    if not (d1.is_scalar and d2.is_scalar):
        raise ValueError("product_dataset needs scalar-labeled operands")
    n1, n2 = len(d1), len(d2)
    total = n1 * n2
    if total <= max_pairs:
        flat = np.arange(total)
    else:
        flat = np.random.default_rng(seed).choice(total, size=max_pairs, replace=False)
    i, j = np.divmod(flat, n2)
    data = np.hstack([d1.data[i], d2.data[j]])
    labels = d1.labels[i, 0] * d2.labels[j, 0]
    return LabeledDataset(data, labels)


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_shape(text: str) -> Shape:
    """Parse the compact shape grammar.

    ``ball:C:R``, ``annulus:C:r:R``, ``box:LO:HI``, ``prod(S,S)``, ``union(S,S,...)``
    where ``C``, ``LO``, ``HI`` are comma-separated coordinates, e.g.
    ``prod(annulus:0,0:0.5:1,annulus:0,0:0.5:1)``.
    """
    text = text.strip()
    shape, rest = _parse(text, 0)
    if rest != len(text):
        raise ValueError(f"trailing characters in shape spec: {text[rest:]!r}")
    return shape


def _split_args(text, pos):
    # returns list of argument substrings inside balanced parentheses and end index
    assert text[pos] == "("
    depth, start, args = 0, pos + 1, []
    for k in range(pos, len(text)):
        c = text[k]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth == 0:
                args.append(text[start:k])
                return args, k + 1
        elif c == "," and depth == 1:
            # a comma separates shapes only where a new shape keyword follows
            if re.match(r"\s*(ball|annulus|box|prod|union)\b", text[k + 1 :]):
                args.append(text[start:k])
                start = k + 1
    raise ValueError(f"unbalanced parentheses in shape spec: {text!r}")


def _vec(s):
    try:
        return np.array([float(v) for v in s.split(",")])
    except ValueError:
        raise ValueError(f"bad coordinate list {s!r}") from None


def _parse(text, pos):
    m = re.match(r"\s*(ball|annulus|box|prod|union)", text[pos:])
    if not m:
        raise ValueError(f"unknown shape spec {text[pos:]!r}")
    kind = m.group(1)
    pos += m.end()
    if kind in ("prod", "union"):
        if pos >= len(text) or text[pos] != "(":
            raise ValueError(f"{kind} needs parenthesised arguments")
        args, end = _split_args(text, pos)
        parts = [parse_shape(a) for a in args]
        if kind == "prod":
            if len(parts) != 2:
                raise ValueError("prod takes exactly two shapes")
            return Product(*parts), end
        return Union(tuple(parts)), end
    if text[pos : pos + 1] != ":":
        raise ValueError(f"{kind} needs ':'-separated fields")
    fields = text[pos + 1 :].strip().split(":")
    try:
        if kind == "ball" and len(fields) == 2:
            return Ball(_vec(fields[0]), float(fields[1])), len(text)
        if kind == "annulus" and len(fields) == 3:
            return Annulus(_vec(fields[0]), float(fields[1]), float(fields[2])), len(text)
        if kind == "box" and len(fields) == 2:
            return Box(_vec(fields[0]), _vec(fields[1])), len(text)
    except ValueError as exc:
        raise ValueError(f"bad {kind} spec: {exc}") from None
    raise ValueError(f"wrong number of fields for {kind}: {text[pos + 1:]!r}")


def save_csv(ds: LabeledDataset, path) -> None:
    """Header ``x1..xn,label[1..k]``; floats written with 17 significant digits."""
    n, k = ds.dim, ds.n_labels
    header = [f"x{i + 1}" for i in range(n)]
    header += ["label"] if k == 1 else [f"label{j + 1}" for j in range(k)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row, lab in zip(ds.data, ds.labels):
            w.writerow([format(v, ".17g") for v in row] + [str(int(v)) for v in lab])


def load_csv(path) -> LabeledDataset:
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty dataset file")
    header = rows[0]
    n = sum(1 for h in header if re.fullmatch(r"x\d+", h))
    k = len(header) - n
    if n == 0 or k == 0:
        raise ValueError(f"{path}: header must be x1..xn followed by label columns")
    body = np.array([[float(v) for v in r] for r in rows[1:]]).reshape(-1, n + k)
    return LabeledDataset(body[:, :n], body[:, n:])
