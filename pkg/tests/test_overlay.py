"""Tests for comparison overlays."""
import numpy as np
import pytest

from neuromorph.core.masks import Instance, boundary
from neuromorph.core.matching import match_instances
from neuromorph.core.overlay import MATCHED_COLOR, MISSED_COLOR, SPURIOUS_COLOR, render_overlay
from tests.helpers import disk_mask, rect_mask


def _painted(rgb, color):
    return np.all(rgb == np.array(color, dtype=np.uint8), axis=2)


@pytest.fixture
def base():
    return np.random.default_rng(3).integers(0, 256, size=(30, 30)).astype(np.uint8)


@pytest.fixture
def gt():
    return [
        Instance.from_mask(1, rect_mask(30, 30, 2, 2, 8, 8)),
        Instance.from_mask(2, rect_mask(30, 30, 15, 4, 10, 6)),
    ]


class TestRenderOverlay:
    def test_perfect_match_is_green_and_gray(self, base, gt):
        rgb = render_overlay(base, match_instances(gt, gt), gt, gt)
        assert rgb.shape == (30, 30, 3) and rgb.dtype == np.uint8
        gray = (rgb[..., 0] == rgb[..., 1]) & (rgb[..., 1] == rgb[..., 2])
        assert (gray | _painted(rgb, MATCHED_COLOR)).all()
        edges = boundary(gt[0].mask) | boundary(gt[1].mask)
        np.testing.assert_array_equal(_painted(rgb, MATCHED_COLOR), edges)

    def test_empty_prediction_paints_gt_blue(self, base, gt):
        rgb = render_overlay(base, match_instances(gt, []), gt, [])
        edges = boundary(gt[0].mask) | boundary(gt[1].mask)
        np.testing.assert_array_equal(_painted(rgb, MISSED_COLOR), edges)
        assert not _painted(rgb, MATCHED_COLOR).any()

    def test_spurious_blob_is_red(self, base, gt):
        blob = Instance.from_mask(3, disk_mask(30, 30, 8.0, 22.0, 3.0))
        pred = list(gt) + [blob]
        rgb = render_overlay(base, match_instances(gt, pred), gt, pred)
        np.testing.assert_array_equal(_painted(rgb, SPURIOUS_COLOR), boundary(blob.mask))

    def test_interior_keeps_gray_level(self, base, gt):
        rgb = render_overlay(base, match_instances(gt, gt), gt, gt)
        assert (rgb[5, 5] == base[5, 5]).all()

    def test_dimension_mismatch(self, base):
        other = Instance.from_mask(1, rect_mask(20, 20, 0, 0, 4, 4))
        with pytest.raises(ValueError, match="does not match"):
            render_overlay(base, match_instances([other], [other]), [other], [other])
