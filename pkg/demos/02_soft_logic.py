"""Combining nets as soft logic gates."""

# %%
import itertools

import numpy as np

from mlpalg import Mlp, conjunction, multi_i_product, multi_sum, set_difference, sum_net


def constant(p, n_in=2):
    # a (n_in, 2, 1) net whose output is p everywhere
    return Mlp(
        [n_in, 2, 1],
        [np.zeros((2, n_in)), np.zeros((1, 2))],
        [np.zeros(2), [-np.log(p / (1 - p))]],
        ["sigmoid", "sigmoid"],
    )


on, off = constant(0.99), constant(0.01)
x = np.zeros(2)

# %%
# Two operands, lambda = 20.
print("a b | OR    AND   AND-NOT")
for a, b in itertools.product([0, 1], repeat=2):
    na, nb = (on if a else off), (on if b else off)
    row = [op(na, nb)(x)[0] for op in (sum_net, conjunction, set_difference)]
    print(a, b, "|", " ".join(f"{v:.3f}" for v in row))

# %%
# Three operands: OR across all, AND across product spaces.
x3 = np.zeros(6)
for bits in itertools.product([0, 1], repeat=3):
    nets = [on if b else off for b in bits]
    print(bits, f"OR {multi_sum(nets)(x)[0]:.3f}", f"AND {multi_i_product(nets)(x3)[0]:.3f}")

# %%
# With the combining threshold left at 1.5*lambda, two true inputs out of three are enough.
print("offset 1.5:", multi_i_product([on, on, off], offset=1.5)(x3)[0])
