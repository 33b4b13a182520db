"""Test inputs: random label maps, real photographs and textured scenes
with exact ground truth.

Real photographs come from the sample images bundled with scikit-image.
The textured scenes stand in for a natural-image benchmark: a random
partition into a few irregular regions gives the ground truth, and each
region is filled with a crop of a different photograph, tinted, then the
whole frame is slightly blurred and noised like a camera image.
"""

from __future__ import annotations

import functools

import numpy as np
from scipy.ndimage import gaussian_filter, zoom

from rime.synthetic import blob_labels

REAL_NAMES = ("astronaut", "camera", "coins", "moon", "page", "chelsea", "coffee", "rocket",
              "immunohistochemistry", "text", "clock", "grass", "gravel", "brick", "colorwheel", "cat")
TEXTURE_NAMES = ("astronaut", "camera", "coins", "moon", "chelsea", "coffee", "rocket",
                 "immunohistochemistry", "clock", "grass", "gravel", "brick", "cat", "hubble_deep_field")


@functools.lru_cache(maxsize=None)
def real_image(name: str, max_side: int = 0) -> np.ndarray:
    """A bundled photograph as float samples (grey stays one channel)."""
    from skimage import data

    a = np.asarray(getattr(data, name)(), dtype=np.float64)
    if a.ndim == 3:
        a = a[:, :, :3]
    if max_side and max(a.shape[:2]) > max_side:
        f = max_side / max(a.shape[:2])
        a = zoom(a, (f, f) + ((1,) if a.ndim == 3 else ()), order=1)
    return np.clip(a, 0, 255)


def _rgb(a: np.ndarray) -> np.ndarray:
    return a if a.ndim == 3 else np.repeat(a[:, :, None], 3, axis=2)


def textured_scene(seed: int, width: int = 481, height: int = 321):
    """``(image, ground_truth)`` for one synthetic scene."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 11))
    gt = blob_labels(width, height, n_regions=n, seed=seed)
    img = np.zeros((height, width, 3))
    names = rng.permutation(len(TEXTURE_NAMES))
    for r in range(n):
        src = _rgb(real_image(TEXTURE_NAMES[names[r % len(names)]]))
        # crop and resample the photograph to the frame size
        fy, fx = height / src.shape[0], width / src.shape[1]
        f = max(fy, fx) * float(rng.uniform(1.0, 1.6))
        big = zoom(src, (f, f, 1), order=1)
        oy = int(rng.integers(0, big.shape[0] - height + 1))
        ox = int(rng.integers(0, big.shape[1] - width + 1))
        tex = big[oy:oy + height, ox:ox + width]
        tint = rng.uniform(0.5, 1.3, 3)
        tex = tex * tint * float(rng.uniform(0.4, 0.9)) + rng.uniform(0, 90, 3)
        img[gt == r] = tex[gt == r]
    img = gaussian_filter(img, (1.0, 1.0, 0))
    img += rng.normal(0.0, 3.0, img.shape)
    return np.clip(img, 0, 255), gt


def desk_subset(count: int = 20):
    return [textured_scene(1000 + i) for i in range(count)]


def random_map(rng, max_side: int = 64, n_labels: int | None = None):
    """Random label map of a randomly chosen flavour."""
    h, w = (int(v) for v in rng.integers(1, max_side + 1, 2))
    kind = rng.integers(0, 3)
    k = n_labels or int(rng.integers(1, 6))
    if kind == 0:
        return rng.integers(0, k, (h, w))
    if kind == 1:
        b = int(rng.integers(2, 6))
        small = rng.integers(0, k, (-(-h // b), -(-w // b)))
        out = small.repeat(b, 0).repeat(b, 1)[:h, :w]
        noise = rng.random((h, w)) < 0.03
        return np.where(noise, rng.integers(0, k + 2, (h, w)), out)
    return blob_labels(w, h, n_regions=max(1, k * 2), seed=int(rng.integers(1 << 30)), smooth=1.5)


def intensity_for(labels, rng, noise: float = 0.0):
    """Image with a random grey level per label, optionally noisy."""
    lab = np.asarray(labels)
    col = rng.uniform(0, 255, int(lab.max()) + 1)
    img = col[lab]
    if noise:
        img = np.clip(img + rng.normal(0, noise, img.shape), 0, 255)
    return img
