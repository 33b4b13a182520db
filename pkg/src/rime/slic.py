"""SLIC superpixels: local k-means over colour and position.

Colour is CIELAB (D65) for RGB input and the intensity itself for grey
input.  Cluster centres start on a regular grid, move to the lowest-gradient
pixel of their 3x3 neighbourhood, and each iteration compares every pixel
only with the centres whose window covers it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .raster_io import as_labels, as_samples, label_components


@dataclass(frozen=True)
class SlicParams:
    k: Optional[int] = None
    region_size: Optional[float] = None
    compactness: float = 10.0
    iterations: int = 10

    def __post_init__(self):
        if (self.k is None) == (self.region_size is None):
            raise ValueError("give exactly one of k and region_size")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be positive")
        if self.region_size is not None and self.region_size < 1:
            raise ValueError("region_size must be at least 1")
        if not self.compactness > 0:
            raise ValueError("compactness must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")

    def count_for(self, width: int, height: int) -> int:
        if self.k is not None:
            return self.k
        return max(1, int(round(width * height / self.region_size ** 2)))


# --------------------------------------------------------------------- colour
_M = np.array([[0.4124564, 0.3575761, 0.1804375],
               [0.2126729, 0.7151522, 0.0721750],
               [0.0193339, 0.1191920, 0.9503041]])
_WHITE = np.array([0.95047, 1.0, 1.08883])


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """sRGB samples in [0, 255] to CIELAB under D65."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    lin = np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)
    xyz = lin @ _M.T / _WHITE
    eps = (6 / 29) ** 3
    f = np.where(xyz > eps, np.cbrt(xyz), xyz / (3 * (6 / 29) ** 2) + 4 / 29)
    L = 116 * f[..., 1] - 16
    a = 500 * (f[..., 0] - f[..., 1])
    b = 200 * (f[..., 1] - f[..., 2])
    return np.stack([L, a, b], axis=-1)


def _features(image) -> np.ndarray:
    img = as_samples(image)
    if img.shape[2] == 3:
        return rgb_to_lab(img)
    return img


# ---------------------------------------------------------------------- seeds
def grid_centers(width: int, height: int, k: int):
    """Regular grid of about ``k`` centres, ``(x, y)`` in pixel indices."""
    ny = max(1, int(round(math.sqrt(k * height / width))))
    nx = max(1, int(round(k / ny)))
    ny = min(ny, height)
    nx = min(nx, width)
    xs = [int((i + 0.5) * width / nx) for i in range(nx)]
    ys = [int((j + 0.5) * height / ny) for j in range(ny)]
    return [(x, y) for y in ys for x in xs]


def _gradient(feat: np.ndarray) -> np.ndarray:
    p = np.pad(feat, ((1, 1), (1, 1), (0, 0)), mode="edge")
    gx = p[1:-1, 2:] - p[1:-1, :-2]
    gy = p[2:, 1:-1] - p[:-2, 1:-1]
    return (gx ** 2).sum(axis=2) + (gy ** 2).sum(axis=2)


def gradient_perturb(image, center: Tuple[int, int], grad: Optional[np.ndarray] = None) -> Tuple[int, int]:
    """Move ``center = (x, y)`` to the lowest-gradient pixel among its 3x3
    neighbours inside the image.  Ties keep the original position, then the
    first in row-major order."""
    if grad is None:
        grad = _gradient(_features(image))
    h, w = grad.shape
    x0, y0 = center
    best = (grad[y0, x0], 0, y0, x0)
    for y in range(max(0, y0 - 1), min(h, y0 + 2)):
        for x in range(max(0, x0 - 1), min(w, x0 + 2)):
            cand = (grad[y, x], 1, y, x)
            if cand < best:
                best = cand
    return best[3], best[2]


# ----------------------------------------------------------------- clustering
def _assign(feat, centers, S, m):
    h, w, _ = feat.shape
    dist = np.full((h, w), np.inf)
    lab = np.full((h, w), -1, dtype=np.int64)
    r = int(math.ceil(S))
    ys = np.arange(h, dtype=np.float64)
    xs = np.arange(w, dtype=np.float64)
    wsp = (m / S) ** 2
    for c, (cx, cy, col) in enumerate(centers):
        x0, x1 = max(0, int(round(cx)) - r), min(w, int(round(cx)) + r + 1)
        y0, y1 = max(0, int(round(cy)) - r), min(h, int(round(cy)) + r + 1)
        if x0 >= x1 or y0 >= y1:
            continue
        win = feat[y0:y1, x0:x1]
        dc = ((win - col) ** 2).sum(axis=2)
        ds = (ys[y0:y1, None] - cy) ** 2 + (xs[None, x0:x1] - cx) ** 2
        d = dc + ds * wsp
        cur = dist[y0:y1, x0:x1]
        better = d < cur
        cur[better] = d[better]
        lab[y0:y1, x0:x1][better] = c
    return lab


def slic(image, params: SlicParams) -> np.ndarray:
    """Label map with about ``params.k`` compact superpixels.

    Distances are ``sqrt(dc**2 + (ds / S)**2 * m**2)`` with grid step
    ``S = sqrt(W H / k)``; only centres within ``S`` of a pixel (in both
    coordinates) compete for it.  After the iterations, fragments smaller
    than ``S**2 / 4`` pixels are absorbed by a neighbour; every remaining
    4-connected piece is one superpixel, numbered ``0..k'-1`` in row-major
    order of first appearance.
    """
    feat = _features(image)
    h, w, _ = feat.shape
    k = params.count_for(w, h)
    if k > w * h:
        raise ValueError("image smaller than one region")
    S = math.sqrt(w * h / k)
    m = params.compactness
    grad = _gradient(feat)
    centers = []
    for x, y in grid_centers(w, h, k):
        px, py = gradient_perturb(None, (x, y), grad)
        centers.append((float(px), float(py), feat[py, px].copy()))
    yy, xx = np.mgrid[0:h, 0:w]
    lab = None
    for _ in range(params.iterations):
        lab = _assign(feat, centers, S, m)
        flat = lab.ravel()
        ok = flat >= 0
        n = len(centers)
        cnt = np.bincount(flat[ok], minlength=n)
        sx = np.bincount(flat[ok], weights=xx.ravel()[ok], minlength=n)
        sy = np.bincount(flat[ok], weights=yy.ravel()[ok], minlength=n)
        sc = [np.bincount(flat[ok], weights=feat[:, :, j].ravel()[ok], minlength=n) for j in range(feat.shape[2])]
        new = []
        for c in range(n):
            if cnt[c]:
                new.append((sx[c] / cnt[c], sy[c] / cnt[c], np.array([s[c] / cnt[c] for s in sc])))
            else:
                new.append(centers[c])
        centers = new
    # pixels no window reached (possible only at extreme aspect ratios)
    if (lab < 0).any():
        from scipy.ndimage import distance_transform_edt

        _, (iy, ix) = distance_transform_edt(lab < 0, return_indices=True)
        lab = lab[iy, ix]
    lab = enforce_connectivity(lab, max(1, int(S * S / 4)))
    # large fragments that survive become superpixels of their own
    return relabel_sequential(label_components(lab))


def relabel_sequential(labels) -> np.ndarray:
    a = as_labels(labels)
    _, first, inv = np.unique(a.ravel(), return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inv].reshape(a.shape)


def enforce_connectivity(labels, min_size: int) -> np.ndarray:
    """Absorb every 4-connected fragment smaller than ``min_size`` pixels.

    A fragment joins the adjacent component it shares the most unit edges
    with; ties go to the smaller label.  Fragments are handled in row-major
    order of their first pixel, and a fragment that has grown past
    ``min_size`` by absorbing others is left alone.  Labels of the surviving
    components are unchanged.
    """
    a = as_labels(labels)
    comp = label_components(a)
    n = int(comp.max()) + 1
    size = np.bincount(comp.ravel(), minlength=n).tolist()
    clabel = np.zeros(n, dtype=np.int64)
    clabel[comp.ravel()] = a.ravel()
    clabel = clabel.tolist()
    # unit-edge counts between adjacent components
    pairs = np.concatenate([
        np.stack([comp[:, :-1].ravel(), comp[:, 1:].ravel()], axis=1),
        np.stack([comp[:-1, :].ravel(), comp[1:, :].ravel()], axis=1),
    ])
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.sort(pairs, axis=1)
    keys, counts = np.unique(pairs, axis=0, return_counts=True)
    adj: Dict[int, Dict[int, int]] = {c: {} for c in range(n)}
    for (u, v), c in zip(keys.tolist(), counts.tolist()):
        adj[u][v] = c
        adj[v][u] = c
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in range(n):
        if find(c) != c or size[c] >= min_size or not adj[c]:
            continue
        target = min(adj[c], key=lambda t: (-adj[c][t], clabel[t], t))
        # fold c into target
        parent[c] = target
        size[target] += size[c]
        for t, cnt in adj.pop(c).items():
            adj[t].pop(c, None)
            if t != target:
                adj[target][t] = adj[target].get(t, 0) + cnt
                adj[t][target] = adj[t].get(target, 0) + cnt
        adj[c] = {}
    roots = np.array([find(c) for c in range(n)])
    out = np.asarray(clabel)[roots][comp]
    return out
