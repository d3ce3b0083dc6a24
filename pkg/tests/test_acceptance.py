"""Release acceptance checks; each prints one PASS/FAIL line (also shown in the terminal summary)."""

import itertools
import time

import numpy as np
import pytest

from mlpalg import algebra as A
from mlpalg import netfile
from mlpalg.cli import main
from mlpalg.core import RELU, SIGMOID, Mlp, forward_batch, sigmoid
from mlpalg.data import Ball, LabeledDataset
from mlpalg.experiments import run_torus, verify_theorem1
from mlpalg.train import accuracy_argmax, accuracy_scalar, init_mlp, loss_and_gradients

from conftest import ACCEPTANCE, const_net, random_dims, random_net

LAM = 20.0


def record(n, title, ok, detail):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    print(line)
    ACCEPTANCE.append(line)
    assert ok, line


def out(net, X):
    return forward_batch(net, X)[:, 0]


def maxdev(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# 1 ---------------------------------------------------------------------------


def test_exact_identities():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst, n_nets = 0.0, 0
    for _ in range(500):
        dims = random_dims(rng)
        a = random_net(rng, dims)
        b = random_net(rng, dims[:1] + random_dims(rng, len(dims))[1:])
        n_nets += 2
        X = rng.normal(0, 2, (20, dims[0]))
        ya, yb = out(a, X), out(b, X)
        checks = [
            (out(A.complement(a), X), 1 - ya),
            (forward_batch(A.o_product(a, b), X), np.column_stack([ya, yb])),
            (out(A.component(A.o_product(a, b), 2), X), yb),
            (out(A.identical_extension(a), X), ya),
            (out(A.sum_net(a, b, LAM), X), sigmoid(LAM * (ya + yb) - 0.5 * LAM)),
            (out(A.conjunction(a, b, LAM), X), sigmoid(LAM * (ya + yb) - 1.5 * LAM)),
            (out(A.difference(a, b, LAM), X), sigmoid(LAM * (ya + 1 - yb) - 0.5 * LAM)),
            (out(A.set_difference(a, b, LAM), X), sigmoid(LAM * (ya + 1 - yb) - 1.5 * LAM)),
        ]
        c = random_net(rng, dims[:1] + random_dims(rng, len(dims))[1:])
        yc = out(c, X)
        checks.append(
            (out(A.multi_sum([a, b, c], LAM), X), sigmoid(LAM * (ya + yb + yc) - 0.5 * LAM))
        )
        n1 = a.input_dim
        Xp = rng.normal(0, 2, (20, n1 + b.input_dim))
        pa, pb = out(a, Xp[:, :n1]), out(b, Xp[:, n1:])
        checks.append((out(A.i_product(a, b, LAM), Xp), sigmoid(LAM * (pa + pb) - 1.5 * LAM)))
        for got, want in checks:
            worst = max(worst, maxdev(got, want))
    elapsed = time.perf_counter() - t0
    record(
        1,
        "exact identities",
        n_nets >= 1000 and worst <= 1e-12 and elapsed < 10,
        f"{n_nets} nets, max deviation {worst:.1e}, {elapsed:.1f} s",
    )


# 2 ---------------------------------------------------------------------------


def _soft(bit, rng, n_in):
    # operand output within 0.01 of the bit, including the 0.01 worst case
    p = rng.choice([0.01, rng.uniform(0.0, 0.01), 1e-6])
    return const_net(n_in, 1 - p if bit else p)


def test_soft_logic_truth_tables():
    rng = np.random.default_rng(7)
    failures = []
    n_patterns = 0

    def decide(net, n_in):
        return out(net, np.zeros((1, n_in)))[0] >= 0.5

    for m in (1, 2, 3, 4):
        for bits in itertools.product([0, 1], repeat=m):
            for _ in range(3):
                nets = [_soft(b, rng, 2) for b in bits]
                n_patterns += 1
                if decide(A.multi_sum(nets, LAM), 2) != any(bits):
                    failures.append(("multi_sum", bits))
                if m >= 2 and decide(A.multi_i_product(nets, LAM), 2 * m) != all(bits):
                    failures.append(("multi_i_product", bits))
                if m == 2:
                    a, b = nets
                    for name, got, want in (
                        ("sum", decide(A.sum_net(a, b, LAM), 2), any(bits)),
                        ("conjunction", decide(A.conjunction(a, b, LAM), 2), all(bits)),
                        ("set_difference", decide(A.set_difference(a, b, LAM), 2), bits[0] and not bits[1]),
                        ("i_product", decide(A.i_product(a, b, LAM), 4), all(bits)),
                    ):
                        if got != want:
                            failures.append((name, bits))
    # the literal 1.5 lambda offset fires on (1,1,0) at m=3
    literal = A.multi_i_product([const_net(2, p) for p in (0.99, 0.99, 0.01)], LAM, offset=1.5)
    literal_fails = decide(literal, 6)
    record(
        2,
        "soft-logic truth tables",
        not failures and literal_fails,
        f"{n_patterns} operand draws, {len(failures)} mismatches, "
        f"literal 1.5*lambda variant fires on (1,1,0): {literal_fails}",
    )


# 3 ---------------------------------------------------------------------------


def _reference_loss(net, X, Y):
    o = forward_batch(net, X)
    return -np.mean(np.sum(Y * np.log(o) + (1 - Y) * np.log(1 - o), axis=1))


def _fd(net, X, Y, h=1e-5):
    params = [np.array(p) for p in net.weights + net.thresholds]
    n = len(net.weights)
    grads = []
    for k, p in enumerate(params):
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            vals = []
            for sgn in (1, -1):
                q = [x.copy() for x in params]
                q[k][idx] += sgn * h
                vals.append(_reference_loss(net.replace(weights=q[:n], thresholds=q[n:]), X, Y))
            g[idx] = (vals[0] - vals[1]) / (2 * h)
        grads.append(g)
    return grads


def test_gradient_check():
    rng = np.random.default_rng(11)
    net = random_net(rng, [4, 5, 3, 1], scale=1.0, acts=[RELU, (SIGMOID, RELU, SIGMOID), SIGMOID])
    worst = 0.0
    for _ in range(100):
        x = rng.normal(size=(1, 4))
        y = rng.integers(0, 2, size=(1, 1))
        _, gW, gT = loss_and_gradients(net, LabeledDataset(x, y))
        a = np.concatenate([g.ravel() for g in gW + gT])
        b = np.concatenate([g.ravel() for g in _fd(net, x, y)])
        worst = max(worst, np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-300))
    record(3, "gradient check", worst <= 1e-6, f"(4,5,3,1) mixed activations, 100 points, max rel err {worst:.1e}")


# 4 ---------------------------------------------------------------------------


def test_characteristic_disk(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("MLPALG_SEED", raising=False)
    t0 = time.perf_counter()
    code = main(["train", "--shape", "ball:0,0:1", "--dims", "2,3,1", "--out", str(tmp_path / "d.net")])
    elapsed = time.perf_counter() - t0
    text = capsys.readouterr().out
    acc = float(text.split("accuracy:")[1].split()[0]) if code == 0 else 0.0
    record(4, "characteristic disk net", code == 0 and acc >= 0.97 and elapsed < 30,
           f"training accuracy {acc:.4f}, {elapsed:.1f} s")


# 5 ---------------------------------------------------------------------------


@pytest.mark.slow
def test_composed_matches_direct():
    t0 = time.perf_counter()
    results = verify_theorem1(Ball([-1.6, 0.0], 1.0), Ball([1.6, 0.0], 1.0), eps=0.1, seed=0)
    elapsed = time.perf_counter() - t0
    ok = len(results) == 3 and all(r.composed >= 0.95 and r.gap <= 0.03 for r in results)
    detail = ", ".join(f"{r.name} {r.composed:.4f} vs {r.direct:.4f}" for r in results)
    record(5, "composition matches direct training", ok and elapsed < 120, f"{detail}, {elapsed:.1f} s")


# 6 ---------------------------------------------------------------------------


@pytest.mark.slow
def test_torus():
    t0 = time.perf_counter()
    res = run_torus(seed=0)
    elapsed = time.perf_counter() - t0
    acc, probe = res.accuracy, res.probe_positive
    ok = (
        res.n_eval == 4000
        and acc["set_difference"] >= 0.90
        and probe["difference"] == 1.0
        and probe["set_difference"] == 0.0
        and elapsed < 300
    )
    record(
        6,
        "torus",
        ok,
        f"set_difference {acc['set_difference']:.4f}, literal {acc['difference']:.4f}; "
        f"probes positive {probe['set_difference']:.2f} vs {probe['difference']:.2f}, {elapsed:.1f} s",
    )


# 7 ---------------------------------------------------------------------------


def _identity(k):
    # outputs equal inputs for inputs in [0, 1]
    return Mlp([k, k], [np.eye(k)], [np.zeros(k)], [RELU])


def _count_scalar(outputs, labels):
    n = 0
    for o, y in zip(outputs, labels):
        n += int((1 if o[0] >= 0.5 else 0) == y[0])
    return n


def _count_argmax(outputs, labels):
    n = 0
    for o, y in zip(outputs, labels):
        best = 0
        for j in range(1, len(o)):
            if o[j] > o[best]:
                best = j
        n += int(y[best] == 1)
    return n


def test_oracle_equivalence():
    rng = np.random.default_rng(99)
    cases = mismatches = 0
    while cases < 10_000:
        k = int(rng.integers(1, 6))
        m = int(rng.integers(1, 40))
        # coarse grids produce exact 0.5 values and ties
        grid = rng.choice([4, 8, 1000])
        outputs = rng.integers(0, grid + 1, size=(m, k)) / grid
        if k == 1:
            labels = rng.integers(0, 2, size=(m, 1))
            got = accuracy_scalar(_identity(1), LabeledDataset(outputs, labels)).correct
            want = _count_scalar(outputs.tolist(), labels.tolist())
        else:
            labels = np.eye(k, dtype=int)[rng.integers(0, k, size=m)]
            got = accuracy_argmax(_identity(k), LabeledDataset(outputs, labels)).correct
            want = _count_argmax(outputs.tolist(), labels.tolist())
        mismatches += int(got != want)
        cases += m
    record(7, "accuracy oracle equivalence", mismatches == 0, f"{cases} cases, {mismatches} mismatched batches")


# 8 ---------------------------------------------------------------------------


def test_round_trip():
    rng = np.random.default_rng(5)
    nets = []
    for i in range(50):
        nets.append(random_net(rng, random_dims(rng, n_out=int(rng.integers(1, 4)))))
    for i in range(50):
        dims = random_dims(rng)
        a = random_net(rng, dims)
        b = random_net(rng, [dims[0], 3, 1], acts=[RELU, SIGMOID])
        ops = [
            lambda: A.complement(a),
            lambda: A.sum_net(*A.align_depths(a, b), lam=float(rng.uniform(1, 50))),
            lambda: A.set_difference(*A.align_depths(b, a)),  # complement needs the sigmoid-final a
            lambda: A.i_product(A.complement(a), A.complement(a)),
            lambda: A.multi_o_product(list(A.align_depths(a, b))),
            lambda: A.identical_extension(b),
        ]
        nets.append(ops[i % len(ops)]())
    bad = 0
    for net in nets:
        text = netfile.render(net)
        back = netfile.parse(text)
        bad += int(not back.same_params(net) or back.metadata != net.metadata or netfile.render(back) != text)
    record(8, "network file round trip", bad == 0 and len(nets) == 100, f"{len(nets)} nets, {bad} differ")


# 9 ---------------------------------------------------------------------------


def _snapshot(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.slow
def test_demo_determinism(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MLPALG_SEED", "3")
    demos = {
        "train": lambda d: ["train", "--shape", "annulus:0,0:0.5:1", "--dims", "2,4,1",
                            "--epochs", "300", "--out", str(d / "a.net"), "--data-out", str(d / "a.csv")],
        "torus": lambda d: ["demo-torus", "--epochs", "300", "--out", str(d)],
        "multilabel": lambda d: ["demo-multilabel", "--shape", "ball:-2.5,0:1", "--shape", "ball:0,0:1",
                                 "--shape", "ball:2.5,0:1", "--epochs", "300", "--out", str(d)],
    }
    differing = []
    for name, argv in demos.items():
        runs = []
        for r in (1, 2):
            d = tmp_path / f"{name}{r}"
            d.mkdir()
            assert main(argv(d)) == 0
            runs.append((_snapshot(d), capsys.readouterr().out.replace(str(d), "<dir>")))
        if runs[0] != runs[1] or not runs[0][0]:
            differing.append(name)
    record(9, "demo determinism", not differing,
           f"{len(demos)} demos rerun with master seed 3, differing: {differing or 'none'}")
