"""Building a small network by hand and evaluating it."""

# %%
import numpy as np

from mlpalg import Mlp, forward, forward_batch, layer_space, validate

# Thresholds are subtracted: each map computes act(W a - theta).
net = Mlp(
    layer_dims=[2, 3, 1],
    weights=[[[1.0, -2.0], [0.5, 0.25], [-1.0, 3.0]], [[2.0, -1.0, 0.5]]],
    thresholds=[[0.1, -0.2, 0.3], [0.4]],
    activations=["sigmoid", "sigmoid"],
)
print("dims:", net.layer_dims, "params:", net.n_params)
print("layer 2 has", layer_space(net, 2), "units")

# %%
# One point, then a batch.
print("N(0, 0) =", forward(net, [0.0, 0.0]))
X = np.random.default_rng(0).normal(size=(5, 2))
print(forward_batch(net, X).ravel())

# %%
# Construction never validates; validate() lists what is wrong.
broken = net.replace(weights=[np.ones((3, 2)), np.ones((1, 2))])
for problem in validate(broken):
    print("problem:", problem)
