"""
Cluster validity indices under added noise
==========================================

Gamma, Silhouette, C-index and the best Ward F-measure quantify how well a
representation separates known groups. Appending pure noise coordinates to
well separated data should make all of them worse.
"""

# %%
import numpy as np

from guidedproj import c_index, gamma_index, silhouette_index
from guidedproj.validity import best_f_measure

rng = np.random.default_rng(1)
base = np.vstack([rng.normal(size=(40, 5)), rng.normal(size=(40, 5)) + 2.5])
labels = np.repeat([0, 1], 40)

# %%
# Sweep the number of noise coordinates. C-index is the only index where
# smaller is better.
print(f"{'noise':>6} {'gamma':>7} {'silh':>7} {'c_index':>8} {'F':>6} {'k':>3}")
for extra in (0, 10, 50, 200):
    X = np.hstack([base, rng.normal(size=(80, extra))])
    f, k = best_f_measure(X, labels)
    print(f"{extra:6d} {gamma_index(X, labels):7.3f} {silhouette_index(X, labels):7.3f} "
          f"{c_index(X, labels):8.3f} {f:6.3f} {k:3d}")
