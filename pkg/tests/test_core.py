import math
import threading

import numpy as np
import pytest

from mlpalg.core import (
    RELU,
    SIGMOID,
    DimensionError,
    Mlp,
    MlpError,
    check,
    forward,
    forward_batch,
    layer_space,
    sigmoid,
    validate,
)

from conftest import random_dims, random_net


def test_validate_ok(small_net):
    assert validate(small_net) == []


def test_validate_wrong_weight_shape(small_net):
    bad = small_net.replace(weights=(small_net.weights[0], np.ones((1, 2))))
    problems = validate(bad)
    assert len(problems) == 1
    assert "layer 2" in problems[0] and "expected 1x3" in problems[0]


def test_validate_nan(small_net):
    w = np.array(small_net.weights[0])
    w[0, 0] = np.nan
    problems = validate(small_net.replace(weights=(w, small_net.weights[1])))
    assert any("non-finite" in p for p in problems)
    with pytest.raises(MlpError):
        check(small_net.replace(weights=(w, small_net.weights[1])))


def test_validate_counts():
    net = Mlp([2, 3, 1], [np.zeros((3, 2))], [np.zeros(3), np.zeros(1)], [SIGMOID, SIGMOID])
    assert any("expected 2 weights" in p for p in validate(net))


def test_forward_identity_sigmoid():
    net = Mlp([1, 1], [[[1.0]]], [[0.0]], [SIGMOID])
    assert forward(net, [0.0]) == pytest.approx([0.5], abs=0)


def test_forward_relu():
    net = Mlp([1, 1], [[[1.0]]], [[0.0]], [RELU])
    assert forward(net, [-3.0])[0] == 0.0


def test_forward_two_layers():
    net = Mlp([2, 2, 1], [np.ones((2, 2)), np.ones((1, 2))], [np.zeros(2), np.zeros(1)], [SIGMOID] * 2)
    expected = 1 / (1 + math.exp(-1.0))  # sigma(2 * sigma(0)) = sigma(1)
    assert forward(net, [0.0, 0.0])[0] == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.73106, abs=1e-5)


def test_thresholds_are_subtracted():
    net = Mlp([1, 1], [[[0.0]]], [[2.0]], [RELU])
    assert forward(net, [5.0])[0] == 0.0
    net = Mlp([1, 1], [[[0.0]]], [[-2.0]], [RELU])
    assert forward(net, [5.0])[0] == 2.0


def test_forward_dimension_mismatch(small_net):
    with pytest.raises(DimensionError):
        forward(small_net, [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        forward_batch(small_net, np.zeros((4, 3)))


def test_forward_batch_empty(small_net):
    assert forward_batch(small_net, np.zeros((0, 2))).shape == (0, 1)


def test_forward_batch_single_row(small_net):
    x = np.array([[0.3, -0.7]])
    assert np.array_equal(forward_batch(small_net, x)[0], forward(small_net, x[0]))


def test_batch_matches_pointwise(rng):
    for _ in range(5):
        dims = random_dims(rng, n_out=int(rng.integers(1, 4)))
        acts = [(SIGMOID, RELU)[rng.integers(2)] for _ in dims[1:]]
        net = random_net(rng, dims, acts=acts)
        X = rng.normal(0, 3, (1000, dims[0]))
        batch = forward_batch(net, X)
        pointwise = np.array([forward(net, x) for x in X])
        assert np.max(np.abs(batch - pointwise)) <= 1e-12


def test_forward_deterministic(rng):
    net = random_net(rng, [3, 5, 2])
    X = rng.normal(size=(50, 3))
    a, b = forward_batch(net, X), forward_batch(net, X)
    assert a.tobytes() == b.tobytes()


def test_concurrent_evaluation_matches(rng):
    net = random_net(rng, [3, 8, 4, 1])
    X = rng.normal(size=(2000, 3))
    expected = forward_batch(net, X)
    results = [None] * 4

    def work(i):
        results[i] = forward_batch(net, X)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r.tobytes() == expected.tobytes() for r in results)


def test_sigmoid_hidden_layers_in_open_interval(rng):
    net = random_net(rng, [2, 4, 4, 1], scale=1.0)
    X = rng.normal(size=(500, 2))
    a = X
    for w, t in zip(net.weights, net.thresholds):
        a = sigmoid(a @ w.T - t)
        assert np.all((a > 0) & (a < 1))


def test_sigmoid_symmetry():
    z = np.linspace(-30, 30, 10**4)
    assert np.max(np.abs(sigmoid(-z) - (1 - sigmoid(z)))) <= 1e-15


def test_sigmoid_saturation():
    out = sigmoid(np.array([-1e4, -501.0, 501.0, 1e4]))
    assert out.tolist() == [0.0, 0.0, 1.0, 1.0]
    with np.errstate(all="raise"):
        sigmoid(np.array([-1e6, 1e6]))


def test_layer_space():
    net = Mlp([2, 3, 1], [np.zeros((3, 2)), np.zeros((1, 3))], [np.zeros(3), np.zeros(1)], [SIGMOID] * 2)
    assert layer_space(net, 1) == 2
    assert layer_space(net, 3) == 1
    with pytest.raises(IndexError):
        layer_space(net, 4)
    with pytest.raises(IndexError):
        layer_space(net, 0)


def test_parameters_are_read_only(small_net):
    with pytest.raises(ValueError):
        small_net.weights[0][0, 0] = 5.0


def test_mixed_activation_per_unit():
    net = Mlp([1, 2], [[[1.0], [1.0]]], [[0.0, 0.0]], [(RELU, SIGMOID)])
    out = forward(net, [-2.0])
    assert out[0] == 0.0
    assert out[1] == pytest.approx(1 / (1 + math.exp(2.0)), abs=1e-16)


def test_from_params_infers_dims():
    net = Mlp.from_params([np.ones((4, 2)), np.ones((1, 4))], [np.zeros(4), np.zeros(1)])
    assert net.layer_dims == (2, 4, 1)
    assert validate(net) == []
