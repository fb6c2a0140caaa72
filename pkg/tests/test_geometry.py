import numpy as np
import pytest
from hypothesis import given, strategies as st

from scanprint.geometry import (
    Canvas, box_area, cxcywh_to_xyxy, enclosure_ratio, intersection_area, iou, overlap_ratio,
    xyxy_to_cxcywh,
)


@pytest.mark.parametrize("box, corners", [
    ((112, 112, 224, 224), (0, 0, 224, 224)),
    ((100, 100, 50, 20), (75, 90, 125, 110)),
    ((10, 10, 0, 0), (10, 10, 10, 10)),
])
def test_cxcywh_to_xyxy(box, corners):
    np.testing.assert_array_equal(cxcywh_to_xyxy(box), corners)


@pytest.mark.parametrize("corners, box", [
    ((0, 0, 224, 224), (112, 112, 224, 224)),
    ((75, 90, 125, 110), (100, 100, 50, 20)),
    ((5, 5, 5, 5), (5, 5, 0, 0)),
])
def test_xyxy_to_cxcywh(corners, box):
    np.testing.assert_array_equal(xyxy_to_cxcywh(corners), box)


def test_inverted_corners_rejected():
    with pytest.raises(ValueError, match="malformed"):
        xyxy_to_cxcywh((10, 0, 5, 5))


@pytest.mark.parametrize("corners, area", [
    ((0, 0, 224, 224), 50176), ((75, 90, 125, 110), 1000), ((5, 5, 5, 5), 0),
])
def test_box_area(corners, area):
    assert box_area(corners) == area


@pytest.mark.parametrize("a, b, expected", [
    ((0, 0, 10, 10), (0, 0, 10, 10), 100),
    ((0, 0, 10, 10), (10, 0, 20, 10), 0),
    ((0, 0, 10, 10), (5, 5, 15, 15), 25),
])
def test_intersection_area(a, b, expected):
    assert intersection_area(a, b) == expected


@pytest.mark.parametrize("outer, inner, expected", [
    ((0, 0, 100, 100), (10, 10, 20, 20), 1.0),
    ((0, 0, 10, 10), (5, 0, 15, 10), 0.5),
    ((0, 0, 10, 10), (3, 3, 3, 3), 0.0),
])
def test_enclosure_ratio(outer, inner, expected):
    assert enclosure_ratio(outer, inner) == expected


def test_pairwise_broadcasting():
    a = np.array([[0, 0, 10, 10], [5, 5, 15, 15]], dtype=float)
    m = intersection_area(a[:, None], a[None, :])
    np.testing.assert_array_equal(m, [[100, 25], [25, 100]])


def test_iou_mode_switch():
    outer, inner = (0, 0, 100, 100), (10, 10, 20, 20)
    assert overlap_ratio(outer, inner, "enclosure") == 1.0
    assert overlap_ratio(outer, inner, "iou") == pytest.approx(100 / 10000)
    assert iou(outer, outer) == 1.0
    with pytest.raises(ValueError):
        overlap_ratio(outer, inner, "dice")


def test_canvas_parse():
    assert Canvas.parse("224x160") == Canvas(224, 160)
    with pytest.raises(ValueError):
        Canvas.parse("224")
    with pytest.raises(ValueError):
        Canvas.parse("0x10")


coords = st.floats(-1e4, 1e4, allow_nan=False)
sizes = st.floats(0, 1e4, allow_nan=False)
corner_boxes = st.tuples(coords, coords, sizes, sizes).map(lambda t: (t[0], t[1], t[0] + t[2], t[1] + t[3]))


@given(coords, coords, sizes, sizes)
def test_round_trip(xc, yc, w, h):
    back = xyxy_to_cxcywh(cxcywh_to_xyxy((xc, yc, w, h)))
    np.testing.assert_allclose(back, (xc, yc, w, h), rtol=0, atol=1e-9 * max(1.0, abs(xc), abs(yc), w, h))


@given(corner_boxes, corner_boxes)
def test_intersection_symmetric_and_bounded(a, b):
    ab, ba = intersection_area(a, b), intersection_area(b, a)
    assert ab == ba
    assert ab <= min(box_area(a), box_area(b)) + 1e-6


int_boxes = st.tuples(
    st.integers(-500, 500), st.integers(-500, 500), st.integers(0, 500), st.integers(0, 500)
).map(lambda t: (t[0], t[1], t[0] + t[2], t[1] + t[3]))


@given(int_boxes, int_boxes)
def test_enclosure_one_iff_contained(outer, inner):
    if box_area(inner) == 0:
        assert enclosure_ratio(outer, inner) == 0
        return
    contained = (outer[0] <= inner[0] and outer[1] <= inner[1]
                 and inner[2] <= outer[2] and inner[3] <= outer[3])
    assert (enclosure_ratio(outer, inner) == 1.0) == contained
