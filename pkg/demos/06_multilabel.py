"""Three disk classifiers stacked into one argmax classifier."""

# %%
from mlpalg.algebra import provenance_tree
from mlpalg.data import Ball
from mlpalg.experiments import run_multilabel

shapes = [Ball([-2.5, 0.0], 1.0), Ball([0.0, 0.0], 1.0), Ball([2.5, 0.0], 1.0)]
result = run_multilabel(shapes, seed=0)

# %%
print("combined dims:", result.combined.layer_dims)
print(provenance_tree(result.combined))
print(f"argmax accuracy {result.argmax_accuracy:.4f}")
for i, acc in enumerate(result.component_accuracy, 1):
    print(f"component {i}: {acc:.4f}")
