"""Shared fixtures for neuromorph tests."""
import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from neuromorph.core.image_io import save_pgm
from tests.helpers import disk_mask, rect_mask, write_gt, write_pred


@pytest.fixture
def corpus_config(tmp_path):
    """Write a synth corpus JSON and return its path; keyword arguments override scene defaults."""

    def _make(scenes=1, perturb=None, name="corpus.json", **scene):
        doc = {"scenes": scenes, "scene": {"width": 96, "height": 96, "n_cells": 3, "seed": 11, **scene}}
        if perturb is not None:
            doc["perturb"] = perturb
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path

    return _make


@pytest.fixture
def hand_built_scene(tmp_path):
    """Two GT cells; the prediction copies cell 1 and adds one spurious blob."""
    width, height = 48, 40
    cell1 = rect_mask(height, width, 4, 4, 10, 8)
    cell2 = rect_mask(height, width, 28, 20, 12, 12)
    blob = disk_mask(height, width, 10.0, 30.0, 3.0)

    image = np.full((height, width), 20, dtype=np.uint8)
    image[cell1] = 200
    image[cell2] = 150
    image[blob] = 90

    root = tmp_path / "scene"
    save_pgm(root / "images" / "s1.pgm", image)
    write_gt(root / "gt" / "s1.json", [cell1, cell2], width, height)
    write_pred(root / "pred" / "s1.json", [cell1, blob], width, height)
    return root
