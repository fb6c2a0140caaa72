"""Top-k patch selection on a synthetic poster.

Without a model-predicted density map, the heuristic map marks flat image
areas as good places for layout elements. Pooling it onto the 14x14 grid and
keeping the k best cells gives the patch set the mixer works with.

    python3 demos/02_scan.py
"""

import numpy as np

from scanprint import heuristic_density, pool_patch_scores, select_topk
from scanprint.synthetic import random_poster

rng = np.random.default_rng(0)
image = random_poster(rng)
density = heuristic_density(image)
scores = pool_patch_scores(density, p=14)

for k in (96, 48, 24):
    patch_set = select_topk(scores, k)
    print(f"k={k}: {patch_set.k} cells, lowest kept score {scores[patch_set.to_mask()].min():.3f}")

patch_set = select_topk(scores, 48)
print("\nselected cells for k=48 (#) over the 14x14 grid:")
for row in patch_set.to_mask():
    print("  " + "".join("#" if c else "." for c in row))
