"""Regenerate the bundled 64x64 desk dataset from scikit-image sample data.

Each image is converted to 8-bit grayscale, center-cropped to a square and
area-downsampled to 64x64, then written as binary PGM (P5).
"""
import pathlib

import numpy as np
from skimage import color, data, transform

NATURAL = ["camera", "astronaut", "coffee", "chelsea", "coins", "rocket"]
UNNATURAL = ["cell", "hubble_deep_field", "moon", "microaneurysms", "immunohistochemistry", "retina"]


def to_gray(img):
    if img.ndim == 3:
        img = color.rgb2gray(img[..., :3]) * 255.0
    return img.astype(np.float64)


def center_square(img):
    h, w = img.shape
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    return img[top : top + s, left : left + s]


def write_pgm(path, img):
    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(img.tobytes())


def prepare(name, size):
    img = center_square(to_gray(getattr(data, name)()))
    return transform.resize(img, (size, size), anti_aliasing=True, preserve_range=True)


def main():
    here = pathlib.Path(__file__).resolve().parent
    out = here / "desk"
    out.mkdir(exist_ok=True)
    for group, names in (("nt", NATURAL), ("unt", UNNATURAL)):
        for name in names:
            write_pgm(out / f"{group}_{name}.pgm", prepare(name, 64))
    asset = here.parent / "crates" / "core" / "tests" / "assets" / "camera_128.pgm"
    write_pgm(asset, prepare("camera", 128))


if __name__ == "__main__":
    main()
