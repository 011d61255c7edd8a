#!/usr/bin/env python3
"""Regenerate the small test images under tests/data from scikit-image's bundled samples.

All sources are CC0 / no known copyright restrictions:
  camera  - Lav Varshney (CC0)
  chelsea - Stefan van der Walt (CC0)
  coffee  - Rachel Michetti (CC0)
  coins   - Brooklyn Museum collection (no known copyright restrictions)

Each image is center-cropped to a square and area-resampled to the target side.
Grayscale outputs are written as binary PGM; the RGB ones stay RGB PNG so the
loader's channel averaging is exercised.
"""
import os
import sys

import numpy as np
from PIL import Image
from skimage import data


def square_resize(arr, side):
    h, w = arr.shape[:2]
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    crop = arr[top:top + s, left:left + s]
    return np.asarray(Image.fromarray(crop).resize((side, side), Image.BOX))


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    cam = data.camera()
    for side in (32, 64, 100):
        Image.fromarray(square_resize(cam, side)).save(os.path.join(out_dir, f"camera_{side}.pgm"))
    Image.fromarray(square_resize(data.coins(), 64)).save(os.path.join(out_dir, "coins_64.pgm"))
    Image.fromarray(square_resize(data.chelsea(), 64)).save(os.path.join(out_dir, "chelsea_64.png"))
    Image.fromarray(square_resize(data.coffee(), 64)).save(os.path.join(out_dir, "coffee_64.png"))

    # Loader fixtures.
    rgb = np.array([[[30, 60, 90], [0, 0, 0]], [[255, 255, 255], [10, 20, 31]]], dtype=np.uint8)
    Image.fromarray(rgb, "RGB").save(os.path.join(out_dir, "rgb_2x2.png"))
    Image.fromarray(np.full((100, 150), 7, dtype=np.uint8)).save(os.path.join(out_dir, "wide_100x150.png"))
    Image.fromarray(np.full((3, 3, 4), 9, dtype=np.uint8), "RGBA").save(os.path.join(out_dir, "rgba_3x3.png"))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "tests", "data"))
