import numpy as np
import pytest

from mlpalg.core import RELU, SIGMOID, Mlp


def random_net(rng, dims, scale=2.0, acts=None):
    """Net with N(0, scale) parameters; ``acts`` defaults to all sigmoid."""
    weights = [rng.normal(0, scale, (b, a)) for a, b in zip(dims[:-1], dims[1:])]
    thresholds = [rng.normal(0, scale, b) for b in dims[1:]]
    if acts is None:
        acts = [SIGMOID] * (len(dims) - 1)
    return Mlp(dims, weights, thresholds, acts)


def random_dims(rng, depth=None, n_in=None, n_out=1, max_width=6):
    depth = depth or int(rng.integers(3, 6))
    n_in = n_in or int(rng.integers(1, 5))
    hidden = [int(rng.integers(1, max_width + 1)) for _ in range(depth - 2)]
    return [n_in] + hidden + [n_out]


def saturated_net(n_in, value, depth=3):
    """Scalar net whose output is sigmoid(+/-30) everywhere (inputs ignored)."""
    dims = [n_in] + [2] * (depth - 2) + [1]
    weights = [np.zeros((b, a)) for a, b in zip(dims[:-1], dims[1:])]
    thresholds = [np.zeros(b) for b in dims[1:]]
    thresholds[-1] = np.array([-30.0 if value else 30.0])
    return Mlp(dims, weights, thresholds, [SIGMOID] * (depth - 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_net():
    # dims (2,3,1), fixed parameters
    return Mlp(
        [2, 3, 1],
        [[[1.0, -2.0], [0.5, 0.25], [-1.0, 3.0]], [[2.0, -1.0, 0.5]]],
        [[0.1, -0.2, 0.3], [0.4]],
        [SIGMOID, SIGMOID],
    )


__all__ = ["random_net", "random_dims", "saturated_net", "RELU", "SIGMOID"]


def const_net(n_in, p, depth=3):
    """Scalar net with constant output ``p`` (zero weights, logit threshold)."""
    dims = [n_in] + [2] * (depth - 2) + [1]
    weights = [np.zeros((b, a)) for a, b in zip(dims[:-1], dims[1:])]
    thresholds = [np.zeros(b) for b in dims[1:]]
    thresholds[-1] = np.array([-np.log(p / (1 - p))])
    return Mlp(dims, weights, thresholds, [SIGMOID] * (depth - 1))


def box_net(center, half=0.5, sharp=40.0):
    """Hand-built (2,4,1) net firing inside the square |x - c|_inf < half."""
    cx, cy = center
    w1 = sharp * np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    t1 = sharp * np.array([cx - half, -cx - half, cy - half, -cy - half])
    return Mlp([2, 4, 1], [w1, sharp * np.ones((1, 4))], [t1, [3.5 * sharp]], [SIGMOID] * 2)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
