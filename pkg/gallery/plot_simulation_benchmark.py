"""
Benchmark on the three-group simulation
=======================================

The second simulation setup places three groups in 75 informative
coordinates and appends ``r`` noise coordinates. Each method is tuned on a
parameter grid for every data set and the best Gamma is kept. This is a
small version of the full experiment, which the ``guidedproj benchmark``
command runs at larger scale.
"""

# %%
from guidedproj.benchmark import run_experiment

result = run_experiment(
    setup=2,
    r_values=[0, 100],
    replicates=2,
    seed=42,
    methods=("raw", "gp", "pca"),
    indices=("gamma",),
    n_per_group=30,
    q_range=(5, 15),
)

# %%
# Mean and standard error of the best Gamma per method:
for row in result.summary():
    print(f"r={row['r']:4d} {row['method']:>4}: {row['mean']:.3f} +- {row['se']:.3f}")

# %%
# Every value is stored together with the parameters that produced it:
for row in result.rows[:6]:
    print(row["r"], row["replicate"], row["method"], round(row["value"], 3), row["params"])
