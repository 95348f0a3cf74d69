"""File formats: gradient pairs, PFM depth maps, masks, lightings, reports."""

import json

import numpy as np
import pytest
from PIL import Image

from normint.datasets import GradientField
from normint.io import (
    read_gradient,
    read_gray,
    read_lightings,
    read_mask,
    read_pfm,
    write_error_map,
    write_gradient,
    write_gray,
    write_lightings,
    write_manifest,
    write_mask,
    write_normal_map,
    write_pfm,
)


class TestGradientFile:
    def test_round_trip(self, tmp_path, rng):
        g = GradientField(p=rng.normal(size=(5, 7)), q=rng.normal(size=(5, 7)))
        path = tmp_path / "field.gf"
        write_gradient(path, g)
        back = read_gradient(path)
        np.testing.assert_array_equal(back.p, g.p.astype(np.float32))
        np.testing.assert_array_equal(back.q, g.q.astype(np.float32))
        assert back.p.dtype == np.float64

    def test_rejects_other_formats(self, tmp_path):
        path = tmp_path / "bogus.gf"
        path.write_bytes(b"Pf\n2 2\n-1.0\n" + b"\x00" * 16)
        with pytest.raises(ValueError, match="gradient"):
            read_gradient(path)


class TestPfm:
    def test_round_trip(self, tmp_path, rng):
        arr = rng.normal(size=(6, 4))
        path = tmp_path / "depth.pfm"
        write_pfm(path, arr)
        back = read_pfm(path)
        np.testing.assert_array_equal(back, arr.astype(np.float32))

    def test_rows_are_stored_bottom_up(self, tmp_path):
        arr = np.arange(12, dtype=np.float64).reshape(3, 4)
        path = tmp_path / "depth.pfm"
        write_pfm(path, arr)
        raw = path.read_bytes()
        header_end = raw.index(b"-1.0\n") + len(b"-1.0\n")
        first_stored_row = np.frombuffer(raw[header_end:header_end + 16], "<f4")
        np.testing.assert_array_equal(first_stored_row, arr[-1].astype(np.float32))

    def test_rejects_other_formats(self, tmp_path):
        path = tmp_path / "bogus.pfm"
        path.write_bytes(b"Gf\n2 2\n" + b"\x00" * 32)
        with pytest.raises(ValueError, match="PFM"):
            read_pfm(path)


class TestMask:
    def test_round_trip(self, tmp_path, rng):
        mask = rng.random((9, 5)) > 0.4
        path = tmp_path / "mask.png"
        write_mask(path, mask)
        np.testing.assert_array_equal(read_mask(path), mask)

    def test_threshold_at_half_intensity(self, tmp_path):
        img = Image.fromarray(np.array([[0, 127, 128, 255]], dtype=np.uint8), "L")
        path = tmp_path / "mask.png"
        img.save(path)
        np.testing.assert_array_equal(read_mask(path),
                                      [[False, False, True, True]])


class TestGray:
    def test_round_trip_with_clipping(self, tmp_path):
        arr = np.array([[-5.0, 0.0, 127.6, 255.0, 300.0]])
        path = tmp_path / "img.png"
        write_gray(path, arr)
        np.testing.assert_array_equal(read_gray(path), [[0, 0, 127, 255, 255]])


class TestLightings:
    def test_round_trip(self, tmp_path, rng):
        lights = rng.normal(size=(4, 3))
        path = tmp_path / "lights.txt"
        write_lightings(path, lights)
        np.testing.assert_allclose(read_lightings(path), lights, rtol=1e-15)

    def test_single_row_keeps_two_dimensions(self, tmp_path):
        path = tmp_path / "lights.txt"
        path.write_text("0.1 0.2 0.97\n")
        assert read_lightings(path).shape == (1, 3)

    def test_wrong_column_count_is_rejected(self, tmp_path):
        path = tmp_path / "lights.txt"
        path.write_text("0.1 0.2\n0.3 0.4\n")
        with pytest.raises(ValueError, match="3 columns"):
            read_lightings(path)


class TestVisualization:
    def test_error_map_colors(self, tmp_path):
        err = np.array([[0.0, 0.5, 1.0, 2.0]])
        path = tmp_path / "error.png"
        write_error_map(path, err, cap=1.0)
        rgb = np.asarray(Image.open(path))
        np.testing.assert_array_equal(rgb[0, 0], [0, 0, 255])    # zero: blue
        np.testing.assert_array_equal(rgb[0, 2], [255, 0, 0])    # cap: red
        np.testing.assert_array_equal(rgb[0, 3], [255, 0, 0])    # clipped
        assert rgb[0, 1, 0] == rgb[0, 1, 2]                       # midpoint

    def test_normal_map_encoding(self, tmp_path):
        normals = np.zeros((1, 2, 3))
        normals[0, 0] = [0.0, 0.0, 1.0]
        normals[0, 1] = [-1.0, 1.0, 0.0]
        path = tmp_path / "normals.png"
        write_normal_map(path, normals)
        rgb = np.asarray(Image.open(path))
        np.testing.assert_array_equal(rgb[0, 0], [128, 128, 255])
        np.testing.assert_array_equal(rgb[0, 1], [0, 255, 128])


def test_manifest_records_library_versions(tmp_path):
    path = tmp_path / "run.json"
    write_manifest(path, {"dataset": "sombrero", "size": 64})
    payload = json.loads(path.read_text())
    assert payload["dataset"] == "sombrero"
    for lib in ("python", "numpy", "scipy", "numba"):
        assert lib in payload["versions"]
