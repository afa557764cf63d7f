"""Tests for annotation parsing, rasterisation and RLE interchange."""
import json
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from neuromorph.core.annotations import (
    AnnotationError,
    AnnotationSet,
    PolygonInstance,
    decode_rle,
    encode_rle,
    load_instance_file,
    mask_to_rings,
    parse_annotations,
    parse_rle,
    rasterize,
    serialize_annotations,
    serialize_rle,
)
from neuromorph.core.masks import bounding_box

SQUARE = [[0, 0], [4, 0], [4, 4], [0, 4]]


def _doc(instances, width=8, height=8):
    return json.dumps({"image": {"width": width, "height": height}, "instances": instances})


def _square(dx=0, dy=0):
    return PolygonInstance(1, rings=[[[x + dx, y + dy] for x, y in SQUARE]])


class TestParseAnnotations:
    def test_triangle(self):
        result = parse_annotations(_doc([{"id": 1, "class": "neuron", "rings": [[[0, 0], [4, 0], [0, 4]]]}]))
        assert isinstance(result, AnnotationSet)
        assert (result.image_width, result.image_height) == (8, 8)
        assert len(result.instances) == 1
        assert result.instances[0].rings[0].shape == (3, 2)

    def test_empty_instances(self):
        assert parse_annotations(_doc([])).instances == []

    def test_class_defaults_to_neuron(self):
        result = parse_annotations(_doc([{"id": 3, "rings": [SQUARE]}]))
        assert result.instances[0].class_name == "neuron"
        assert result.instances[0].id == 3

    def test_duplicate_id_named(self):
        text = _doc([{"id": 5, "rings": [SQUARE]}, {"id": 5, "rings": [SQUARE]}])
        with pytest.raises(AnnotationError, match="duplicate id 5") as exc:
            parse_annotations(text)
        assert exc.value.index == 1

    def test_malformed_json(self):
        with pytest.raises(AnnotationError, match="malformed JSON"):
            parse_annotations("{not json")

    def test_missing_image_block(self):
        with pytest.raises(AnnotationError, match="'image'"):
            parse_annotations(json.dumps({"instances": []}))

    def test_non_finite_vertex(self):
        text = '{"image": {"width": 8, "height": 8}, "instances": [{"id": 1, "rings": [[[0, 0], [NaN, 0], [0, 4]]]}]}'
        with pytest.raises(AnnotationError, match="non-finite"):
            parse_annotations(text)

    def test_vertex_below_lower_bound(self):
        with pytest.raises(AnnotationError, match="below"):
            parse_annotations(_doc([{"id": 1, "rings": [[[-1.5, 0], [4, 0], [0, 4]]]}]))

    def test_vertex_at_lower_bound_accepted(self):
        result = parse_annotations(_doc([{"id": 1, "rings": [[[-1, -1], [4, 0], [0, 4]]]}]))
        assert len(result.instances) == 1

    def test_short_ring_dropped_with_warning(self, caplog):
        with caplog.at_level(logging.WARNING):
            result = parse_annotations(_doc([{"id": 1, "rings": [SQUARE, [[0, 0], [1, 1]]]}]))
        assert len(result.instances[0].rings) == 1
        assert "2 vertices" in caplog.text

    def test_instance_without_valid_ring(self):
        with pytest.raises(AnnotationError, match="no ring"):
            parse_annotations(_doc([{"id": 1, "rings": [[[0, 0], [1, 1]]]}]))

    def test_darwin_subset(self):
        doc = {
            "image": {"width": 8, "height": 8},
            "annotations": [
                {"name": "neuron", "polygon": {"path": [{"x": x, "y": y} for x, y in SQUARE]}},
                {"name": "tag-only"},
                {"name": "neuron", "polygon": {"paths": [[{"x": 5, "y": 5}, {"x": 7, "y": 5}, {"x": 7, "y": 7}]]}},
            ],
        }
        result = parse_annotations(json.dumps(doc))
        assert [inst.id for inst in result.instances] == [1, 2]
        assert result.instances[1].rings[0].tolist() == [[5, 5], [7, 5], [7, 7]]

    @pytest.mark.parametrize("annotations", [3, {"polygon": {}}, [{"polygon": 5}]])
    def test_darwin_malformed_containers(self, annotations):
        doc = {"image": {"width": 8, "height": 8}, "annotations": annotations}
        with pytest.raises(AnnotationError):
            parse_annotations(json.dumps(doc))

    def test_serialize_parse_roundtrip(self):
        original = AnnotationSet(16, 12, [PolygonInstance(2, "neuron", [SQUARE]), PolygonInstance(9, "glia", [[[1, 1], [3.5, 1], [2, 6]]])])
        assert parse_annotations(serialize_annotations(original)).instances == original.instances


class TestRasterize:
    def test_square(self):
        mask = rasterize(_square(), 8, 8)
        assert int(mask.sum()) == 16
        bbox = bounding_box(mask)
        assert (bbox.x, bbox.y, bbox.w, bbox.h) == (0, 0, 4, 4)

    def test_translated_square(self):
        mask = rasterize(_square(2, 2), 8, 8)
        expected = np.zeros((8, 8), dtype=bool)
        expected[2:6, 2:6] = True
        np.testing.assert_array_equal(mask, expected)

    def test_ring_left_of_canvas(self):
        poly = PolygonInstance(1, rings=[[[-20, 0], [-10, 0], [-10, 5], [-20, 5]]])
        assert not rasterize(poly, 8, 8).any()

    def test_clipped_at_canvas_edge(self):
        poly = PolygonInstance(1, rings=[[[6, 6], [12, 6], [12, 12], [6, 12]]])
        assert int(rasterize(poly, 8, 8).sum()) == 4

    def test_rings_are_unioned(self):
        poly = PolygonInstance(1, rings=[SQUARE, [[2, 2], [6, 2], [6, 6], [2, 6]]])
        assert int(rasterize(poly, 8, 8).sum()) == 16 + 16 - 4

    def test_nonzero_winding_fills_self_overlap(self):
        # pentagram: the inner pentagon has winding number 2
        angles = np.pi / 2 + np.arange(5) * 4 * np.pi / 5
        star = np.stack([20 + 15 * np.cos(angles), 20 - 15 * np.sin(angles)], axis=1)
        mask = rasterize(PolygonInstance(1, rings=[star]), 40, 40)
        assert mask[20, 20]

    def test_rectangle_law(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            w, h = (int(v) for v in rng.integers(1, 16, size=2))
            x, y = int(rng.integers(0, 32 - w + 1)), int(rng.integers(0, 32 - h + 1))
            poly = PolygonInstance(1, rings=[[[x, y], [x + w, y], [x + w, y + h], [x, y + h]]])
            assert int(rasterize(poly, 32, 32).sum()) == w * h

    def test_translation_equivariance(self):
        rng = np.random.default_rng(77)
        for _ in range(100):
            n = int(rng.integers(3, 9))
            # quarter-pixel vertices keep every winding test exact
            ring = rng.integers(16, 80, size=(n, 2)) / 4.0
            dx, dy = (int(v) for v in rng.integers(0, 16, size=2))
            base = rasterize(PolygonInstance(1, rings=[ring]), 40, 40)
            moved = rasterize(PolygonInstance(1, rings=[ring + [dx, dy]]), 40, 40)
            np.testing.assert_array_equal(moved[dy:, dx:], base[: 40 - dy, : 40 - dx])
            assert not moved[:dy, :].any() and not moved[:, :dx].any()

    def test_rejects_empty_canvas(self):
        with pytest.raises(ValueError):
            rasterize(_square(), 0, 8)


class TestMaskToRings:
    @settings(max_examples=60, derandomize=True, deadline=None)
    @given(arrays(dtype=bool, shape=st.tuples(st.integers(1, 12), st.integers(1, 12))))
    def test_rings_rasterize_back_to_mask(self, mask):
        rings = mask_to_rings(mask)
        if not mask.any():
            assert rings == []
            return
        height, width = mask.shape
        restored = rasterize(PolygonInstance(1, rings=rings), width, height)
        np.testing.assert_array_equal(restored, mask)


class TestRle:
    def test_decode_example(self):
        mask = decode_rle([(0, 3), (1, 2), (0, 3)], 4, 2)
        assert mask.shape == (2, 4)
        assert list(zip(*np.nonzero(mask))) == [(0, 3), (1, 0)]

    def test_single_run_fills_canvas(self):
        assert decode_rle([(1, 12)], 4, 3).all()

    def test_sum_mismatch(self):
        with pytest.raises(ValueError, match="sum"):
            decode_rle([(0, 5), (1, 2)], 4, 2)

    def test_bad_value(self):
        with pytest.raises(ValueError):
            decode_rle([(2, 8)], 4, 2)

    @pytest.mark.parametrize("length", ["8", None, [8], True, float("inf"), -1, 2.5])
    def test_bad_length(self, length):
        with pytest.raises(ValueError, match="run length"):
            decode_rle([(1, length)], 4, 2)

    @pytest.mark.parametrize(
        "doc",
        [
            {"width": 16, "height": 16, "runs": [[1, "256"]]},
            {"width": 16, "height": 16, "runs": [[1, None]]},
            {"width": 16, "height": 16, "instances": {"id": 1}},
            {"width": 16, "height": 16, "instances": 7},
        ],
    )
    def test_parse_rejects_malformed_document(self, doc):
        with pytest.raises(AnnotationError):
            parse_rle(json.dumps(doc))

    @settings(max_examples=50, derandomize=True, deadline=None)
    @given(arrays(dtype=bool, shape=st.tuples(st.integers(1, 10), st.integers(1, 10))))
    def test_encode_is_inverse_of_decode(self, mask):
        height, width = mask.shape
        runs = encode_rle(mask)
        assert all(length > 0 for _, length in runs)
        np.testing.assert_array_equal(decode_rle(runs, width, height), mask)

    def test_parse_single_raster_splits_components(self):
        mask = np.zeros((4, 6), dtype=bool)
        mask[0:2, 0:2] = True
        mask[3, 4:6] = True
        loaded = parse_rle(serialize_rle(mask))
        assert (loaded.width, loaded.height) == (6, 4)
        assert [inst.area for inst in loaded.instances] == [4, 2]

    def test_parse_multi_instance_keeps_touching_cells_apart(self):
        doc = {
            "width": 4,
            "height": 1,
            "instances": [{"id": 7, "runs": [[1, 2], [0, 2]]}, {"id": 3, "runs": [[0, 2], [1, 2]]}],
        }
        loaded = parse_rle(json.dumps(doc))
        assert [inst.id for inst in loaded.instances] == [7, 3]
        assert loaded.instances[0].mask.tolist() == [[True, True, False, False]]

    def test_parse_reports_instance_index(self):
        doc = {"width": 2, "height": 2, "instances": [{"id": 1, "runs": [[1, 3]]}]}
        with pytest.raises(AnnotationError, match="instance 0"):
            parse_rle(json.dumps(doc))


class TestLoadInstanceFile:
    def test_polygon_file(self, tmp_path):
        path = tmp_path / "a.json"
        path.write_text(_doc([{"id": 4, "rings": [SQUARE]}]), encoding="utf-8")
        loaded = load_instance_file(path)
        assert [inst.id for inst in loaded.instances] == [4]
        assert loaded.instances[0].area == 16

    def test_polygon_covering_no_pixel_centre_skipped(self, tmp_path, caplog):
        path = tmp_path / "thin.json"
        path.write_text(_doc([{"id": 1, "rings": [[[0, 0], [0.2, 0], [0.2, 0.2]]]}]), encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            assert load_instance_file(path).instances == []
        assert "no pixel centre" in caplog.text

    def test_rle_file(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text(serialize_rle(np.eye(3, dtype=bool)), encoding="utf-8")
        assert len(load_instance_file(path, connectivity=8).instances) == 1
        assert len(load_instance_file(path, connectivity=4).instances) == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_instance_file(tmp_path / "absent.json")
