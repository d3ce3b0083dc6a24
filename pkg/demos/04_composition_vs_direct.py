"""Composed nets against nets trained directly on the composite set.

Two disjoint disks in the plane.  Each row compares a net built with the
algebra from two trained disk nets to a net of the same shape trained from
scratch on the complement, union or product set.  Takes about half a minute.
"""

# %%
from mlpalg.data import Ball
from mlpalg.experiments import verify_theorem1

left, right = Ball([-1.6, 0.0], 1.0), Ball([1.6, 0.0], 1.0)
results = verify_theorem1(left, right, eps=0.1, seed=0)

# %%
print(f"{'operation':<12}{'composed':>10}{'direct':>10}{'gap':>8}")
for r in results:
    print(f"{r.name:<12}{r.composed:>10.4f}{r.direct:>10.4f}{r.gap:>8.4f}")
