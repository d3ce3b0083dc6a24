"""Training a characteristic net for the unit disk."""

# %%
import numpy as np

from mlpalg import TrainConfig, init_mlp, train_sgd
from mlpalg.data import Ball, make_characteristic_dataset

disk = Ball([0.0, 0.0], 1.0)
data = make_characteristic_dataset(disk, eps=0.1, n_pos=500, n_neg=500, seed=0)
print(len(data), "points,", int(data.labels.sum()), "inside")

# %%
cfg = TrainConfig(seed=0)
net, report = train_sgd(init_mlp([2, 3, 1], cfg.seed), data, cfg)
print(f"training accuracy {report.accuracy:.4f}")
for epoch, loss in report.loss_history[:: len(report.loss_history) // 5]:
    print(f"  epoch {epoch:5d} loss {loss:.4f}")

# %%
# Coarse picture of the learned set.
xs = np.linspace(-1.5, 1.5, 31)
grid = np.array([[x, y] for y in xs[::-1] for x in xs])
inside = (net(grid)[:, 0] >= 0.5).reshape(31, 31)
print("\n".join("".join("#" if v else "." for v in row) for row in inside))
