import hashlib
import math

import numpy as np
import pytest

from shapebench.render import color_value, rasterize, read_png, write_png
from shapebench.scene import (
    ColorName,
    SceneConfig,
    ShapeInstance,
    ShapeKind,
    SizeSpec,
)


def mk(kind, center, extents, rot=0, color=ColorName.RED):
    return ShapeInstance(kind=kind, color=color, center=center,
                         size=SizeSpec(extents=extents), rotation_deg=rot)


class TestPalette:
    @pytest.mark.parametrize("color,rgb", [
        (ColorName.ORANGE, (255, 165, 0)),
        (ColorName.RED, (255, 0, 0)),
        (ColorName.BLUE, (0, 0, 255)),
        (ColorName.GREEN, (0, 128, 0)),
        (ColorName.YELLOW, (255, 255, 0)),
        (ColorName.MAGENTA, (255, 0, 255)),
    ])
    def test_values(self, color, rgb):
        assert color_value(color) == rgb


class TestRasterize:
    def test_empty_scene_all_white(self):
        img = rasterize(SceneConfig.build([]))
        assert (img.pixels == 255).all()

    def test_red_circle_containment(self):
        img = rasterize(SceneConfig.build([
            mk(ShapeKind.CIRCLE, (112, 112), (20,)),
        ]))
        assert tuple(img.pixels[112, 112]) == (255, 0, 0)
        assert tuple(img.pixels[10, 10]) == (255, 255, 255)

    def test_draw_order_later_on_top(self):
        scene = SceneConfig.build([
            mk(ShapeKind.CIRCLE, (112, 112), (30,)),
            mk(ShapeKind.SQUARE, (112, 112), (20,), color=ColorName.BLUE),
        ])
        img = rasterize(scene)
        assert tuple(img.pixels[112, 112]) == (0, 0, 255)
        # inside the circle but outside the 20px square
        assert tuple(img.pixels[112, 112 + 25]) == (255, 0, 0)

    def test_non_overlapping_order_irrelevant(self):
        a = mk(ShapeKind.CIRCLE, (50, 50), (20,))
        b = mk(ShapeKind.SQUARE, (170, 170), (40,), color=ColorName.GREEN)
        img1 = rasterize(SceneConfig.build([a, b]))
        img2 = rasterize(SceneConfig.build([b, a]))
        assert (img1.pixels == img2.pixels).all()

    def test_deterministic(self):
        scene = SceneConfig.build([
            mk(ShapeKind.TRIANGLE, (100, 100), (30,), rot=15),
            mk(ShapeKind.ELLIPSE, (150, 80), (30, 15), rot=30,
               color=ColorName.YELLOW),
        ])
        a = rasterize(scene)
        b = rasterize(scene)
        assert (a.pixels == b.pixels).all()

    @pytest.mark.parametrize("theta", [15, 30, 45, 72])
    def test_rotation_consistency(self, theta):
        # rotating the raster of the unrotated shape matches the raster of
        # the rotated shape up to boundary pixels (<= 2% differing)
        base = rasterize(SceneConfig.build([
            mk(ShapeKind.SQUARE, (112, 112), (60,)),
        ]))
        rotated = rasterize(SceneConfig.build([
            mk(ShapeKind.SQUARE, (112, 112), (60,), rot=theta),
        ]))
        # inverse-map nearest-neighbor rotation of the base image
        t = math.radians(theta)
        c, s = math.cos(t), math.sin(t)
        ys, xs = np.mgrid[0:224, 0:224]
        dx, dy = xs - 112.0, ys - 112.0
        # sample the unrotated image at the pre-image of each pixel
        u = np.rint(112.0 + dx * c - dy * s).astype(int)
        v = np.rint(112.0 + dx * s + dy * c).astype(int)
        valid = (u >= 0) & (u < 224) & (v >= 0) & (v < 224)
        expected = np.full_like(base.pixels, 255)
        expected[valid] = base.pixels[v[valid], u[valid]]
        diff = (expected != rotated.pixels).any(axis=2)
        assert diff.mean() <= 0.02


class TestWritePng:
    def scene(self):
        return SceneConfig.build([
            mk(ShapeKind.CIRCLE, (112, 112), (20,)),
            mk(ShapeKind.TRIANGLE, (60, 170), (25,), rot=30,
               color=ColorName.MAGENTA),
        ])

    def test_round_trip(self, tmp_path):
        img = rasterize(self.scene())
        path = tmp_path / "scene.png"
        write_png(img, path)
        back = read_png(path)
        assert (back.pixels == img.pixels).all()

    def test_byte_identical(self, tmp_path):
        img = rasterize(self.scene())
        p1, p2 = tmp_path / "a.png", tmp_path / "b.png"
        write_png(img, p1)
        write_png(img, p2)
        assert hashlib.md5(p1.read_bytes()).hexdigest() == \
               hashlib.md5(p2.read_bytes()).hexdigest()

    def test_bad_path_leaves_no_partial_file(self, tmp_path):
        img = rasterize(self.scene())
        bad = tmp_path / "missing_dir" / "scene.png"
        with pytest.raises(OSError):
            write_png(img, bad)
        assert not bad.exists()
        assert not bad.parent.exists()
