"""Network file format: JSON text with an explicit ``format_version``.

Floats are written with Python's shortest round-trip repr, so parsing a
rendered network restores every parameter bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import Activation, Mlp, MlpError, check

FORMAT_VERSION = 1

__all__ = ["FORMAT_VERSION", "NetworkFileError", "render", "parse", "save", "load"]


class NetworkFileError(MlpError):
    pass


def _act(a):
    return a.value if isinstance(a, Activation) else [t.value for t in a]


def render(net: Mlp) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "layer_dims": list(net.layer_dims),
        "activations": [_act(a) for a in net.activations],
        "weights": [w.tolist() for w in net.weights],
        "thresholds": [t.tolist() for t in net.thresholds],
        "metadata": net.metadata,
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def parse(text: str) -> Mlp:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFileError(f"not a network file: {exc}") from None
    if not isinstance(doc, dict):
        raise NetworkFileError("not a network file: top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise NetworkFileError(f"unsupported format_version {version!r}")
    try:
        net = Mlp(
            doc["layer_dims"],
            doc["weights"],
            doc["thresholds"],
            doc["activations"],
            doc.get("metadata", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise NetworkFileError(f"malformed network file: {exc!r}") from None
    try:
        return check(net)
    except MlpError as exc:
        raise NetworkFileError(str(exc)) from None


def save(net: Mlp, path) -> None:
    Path(path).write_text(render(net))


def load(path) -> Mlp:
    return parse(Path(path).read_text())
