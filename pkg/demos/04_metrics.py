"""Layout metrics on hand-made layouts and on augmented samples.

Two constructed layouts show the metric extremes: one has a text exactly on
an underlay with shared edges, the other two overlapping texts. Then the same
report is computed for a synthetic dataset written to a temporary folder,
through the command line.

    python3 demos/04_metrics.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from scanprint import Canvas, Layout, evaluate_layout
from scanprint.cli import main
from scanprint.synthetic import make_dataset

canvas = Canvas()
clean = Layout([2, 1, 0], [(20, 20, 200, 80), (20, 20, 200, 80), (20, 150, 60, 190)])
messy = Layout([1, 1], [(30, 30, 130, 90), (80, 60, 180, 120)])

saliency = np.zeros((224, 224))
saliency[100:200, 100:200] = 1.0
for name, layout in (("clean", clean), ("messy", messy)):
    r = evaluate_layout(layout, canvas, saliency=saliency)
    print(f"{name}: " + "  ".join(f"{k}={v:.4f}" for k, v in r.values().items() if k != "rea"))

with tempfile.TemporaryDirectory() as tmp:
    manifest = make_dataset(tmp, 12, seed=4, with_saliency=True)
    main(["eval", str(manifest), "-o", str(Path(tmp) / "report")])
    summary = json.loads((Path(tmp) / "report" / "summary.json").read_text())
    print("synthetic dataset, layouts with underlays:", summary["n_und_l"], "of", summary["n_samples"])
