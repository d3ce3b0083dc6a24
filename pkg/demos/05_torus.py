"""A classifier for the torus in R^4 from two trained disk nets.

annulus = big disk AND NOT small disk, torus = annulus x annulus.  Building the
annulus with OR NOT instead fires on everything inside the small disk, which the
probe column makes visible.
"""

# %%
from mlpalg.experiments import run_torus

result = run_torus(R=1.0, r=0.5, eps=0.05, seed=0, out_dir="torus_out")
print(result.table())

# %%
net = result.nets["torus_set_difference"]
print("torus net dims:", net.layer_dims)
print("files written to torus_out/")
