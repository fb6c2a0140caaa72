import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scanprint.geometry import Canvas
from scanprint.layout import Layout
from scanprint.metrics import (
    MetricReport, aggregate, compute_ali, compute_content, compute_ove, compute_rea,
    compute_underlay, coverage_mask, dumps_summary, evaluate_layout, gradient_magnitude,
)
from scanprint.synthetic import random_layout

C = Canvas(224, 224)


class TestOve:
    def test_disjoint(self):
        assert compute_ove(Layout([1, 0], [(0, 0, 10, 10), (20, 20, 30, 30)])) == 0.0

    def test_touching_edges_do_not_overlap(self):
        assert compute_ove(Layout([1, 1], [(0, 0, 10, 10), (10, 0, 20, 10)])) == 0.0

    def test_identical(self):
        assert compute_ove(Layout([1, 1], [(5, 5, 50, 50)] * 2)) == 1.0

    def test_underlays_ignored(self):
        assert compute_ove(Layout([2, 1, 1], [(0, 0, 100, 100), (0, 0, 10, 10), (50, 50, 60, 60)])) == 0.0

    def test_small_layouts(self):
        assert compute_ove(Layout()) == 0.0
        assert compute_ove(Layout([1], [(0, 0, 5, 5)])) == 0.0

    def test_pair_average(self):
        # pair (a,b) contained -> 1, the other two pairs disjoint
        layout = Layout([1, 1, 1], [(0, 0, 10, 10), (2, 2, 4, 4), (100, 100, 110, 110)])
        assert compute_ove(layout) == pytest.approx(1 / 3)


class TestAli:
    def test_shared_left_edge(self):
        layout = Layout([1, 0, 1], [(10, 0, 50, 20), (10, 40, 30, 60), (10, 100, 200, 120)])
        assert compute_ali(layout, C) == 0.0

    def test_single(self):
        assert compute_ali(Layout([1], [(3, 7, 20, 30)]), C) == 0.0

    def test_value(self):
        # closest like-for-like line: left edges 0 and 2.24 apart in x (0.01 of the width)
        layout = Layout([1, 1], [(0, 0, 10, 10), (2.24, 50, 100, 90)])
        assert compute_ali(layout, C) == pytest.approx(0.01)


class TestUnderlay:
    def test_exact_cover(self):
        assert compute_underlay(Layout([2, 1], [(10, 10, 50, 30)] * 2)) == (1.0, 1.0, 1)

    def test_half_overlap(self):
        und_l, und_s, n = compute_underlay(Layout([2, 1], [(0, 0, 10, 10), (5, 0, 15, 10)]))
        assert (und_l, und_s, n) == (0.5, 0.0, 1)

    def test_no_underlay(self):
        assert compute_underlay(Layout([1], [(0, 0, 1, 1)])) == (0.0, 0.0, 0)

    def test_average_over_underlays(self):
        layout = Layout([2, 2, 1], [(0, 0, 20, 20), (100, 100, 120, 120), (5, 5, 10, 10)])
        assert compute_underlay(layout)[:2] == (0.5, 0.5)


class TestContent:
    def test_zero_saliency_half_covered(self):
        sal = np.zeros((224, 224))
        uti, occ = compute_content(Layout([1], [(0, 0, 112, 224)]), sal)
        assert (uti, occ) == (0.5, 0.0)

    def test_salient_blob(self):
        sal = np.zeros((224, 224))
        sal[50:100, 60:120] = 1.0
        uti, occ = compute_content(Layout([1], [(60, 50, 120, 100)]), sal)
        assert occ == 1.0 and uti == 0.0

    def test_empty_layout(self):
        assert compute_content(Layout(), np.zeros((10, 10))) == (0.0, 0.0)

    def test_half_open_rasterization(self):
        m = coverage_mask(Layout([1], [(1.5, 0, 3.2, 1)]), (4, 6))
        assert m[0].tolist() == [False, True, True, True, False, False]
        assert m[1:].sum() == 0

    def test_monotone(self):
        sal = np.zeros((224, 224))
        sal[:, 112:] = 1.0
        base = Layout([1], [(50, 50, 150, 150)])
        uti0, occ0 = compute_content(base, sal)
        salient = Layout([1, 1], [(50, 50, 150, 150), (180, 0, 224, 40)])
        plain = Layout([1, 1], [(50, 50, 150, 150), (0, 180, 40, 224)])
        assert compute_content(salient, sal)[1] >= occ0
        assert compute_content(plain, sal)[0] >= uti0


class TestRea:
    def test_constant_background(self):
        img = np.full((224, 224, 3), 90, dtype=np.uint8)
        assert compute_rea(Layout([1], [(10, 10, 100, 40)]), img) == (0.0, 1)

    def test_no_text(self):
        img = np.random.default_rng(0).integers(0, 256, (224, 224, 3), dtype=np.uint8)
        assert compute_rea(Layout([0], [(10, 10, 100, 40)]), img) == (0.0, 0)

    def test_gradient_range_and_value(self):
        img = np.zeros((8, 8), dtype=np.uint8)
        img[:, 4:] = 255
        g = gradient_magnitude(img)
        assert g.max() == pytest.approx(0.5)
        assert g.min() == 0.0
        rea, _ = compute_rea(Layout([1], [(3, 0, 5, 8)]), img)
        assert rea == pytest.approx(0.5)


class TestReport:
    def test_missing_maps_are_nan(self):
        r = evaluate_layout(Layout([1], [(0, 0, 10, 10)]), C)
        assert math.isnan(r.uti) and math.isnan(r.occ) and math.isnan(r.rea)
        assert r.n_elements == 1 and r.n_text == 1

    def test_aggregate(self):
        a = MetricReport(ove=0.2, und_l=1.0, und_s=1.0, n_underlay=1, uti=0.5)
        b = MetricReport(ove=0.4, und_l=0.0, und_s=0.0, n_underlay=0)
        s = aggregate([a, b])
        assert s["ove"] == pytest.approx(0.3)
        assert s["und_l"] == 1.0 and s["n_und_l"] == 1
        assert s["uti"] == 0.5 and s["n_uti"] == 1
        assert math.isnan(s["rea"])
        assert aggregate([b, a]) == pytest.approx(s, nan_ok=True)
        assert '"rea": null' in dumps_summary(s)

    def test_extreme_aggregate(self):
        reports = [
            evaluate_layout(Layout([2, 1], [(10, 10, 60, 60), (10, 10, 60, 30)]), C),
            evaluate_layout(Layout([1, 0], [(0, 0, 10, 10), (0, 50, 30, 70)]), C),
        ]
        s = aggregate(reports)
        assert s["ove"] == 0.0 and s["und_s"] == 1.0 and s["ali"] == 0.0


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_ranges_and_strictness(seed):
    rng = np.random.default_rng(seed)
    layout = random_layout(rng)
    sal = rng.random((224, 224))
    r = evaluate_layout(layout, C, saliency=sal, image=(sal * 255).astype(np.uint8))
    assert 0 <= r.und_s <= r.und_l <= 1
    assert 0 <= r.uti <= 1 and 0 <= r.occ <= 1
    assert r.ove >= 0 and r.ali >= 0 and r.rea >= 0


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(-20, 20), st.integers(-20, 20))
def test_translation_consistent(seed, dx, dy):
    rng = np.random.default_rng(seed)
    layout = random_layout(rng, integer=True).scaled(0.5, 0.5).translated(40, 40)
    sal = np.zeros((224, 224))
    sal[60:120, 50:110] = rng.random((60, 60))
    moved_sal = np.roll(sal, (dy, dx), axis=(0, 1))
    a = evaluate_layout(layout, C, saliency=sal)
    b = evaluate_layout(layout.translated(dx, dy), C, saliency=moved_sal)
    for name in ("ove", "ali", "und_l", "und_s", "occ"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_ove_zero_iff_no_interior_overlap(seed):
    rng = np.random.default_rng(seed)
    layout = random_layout(rng, integer=True)
    boxes = layout.corners[layout.categories != 2]
    overlaps = any(
        min(a[2], b[2]) > max(a[0], b[0]) and min(a[3], b[3]) > max(a[1], b[1])
        for k, a in enumerate(boxes) for b in boxes[k + 1:]
    )
    assert (compute_ove(layout) == 0) == (not overlaps)
