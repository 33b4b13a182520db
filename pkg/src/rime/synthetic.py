"""Deterministic synthetic label maps for tests, demos and timing runs."""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree


def voronoi_labels(width: int, height: int, cell: float = 16.0, seed: int = 0, jitter: float = 0.8) -> np.ndarray:
    """Label map of a jittered-grid Voronoi diagram with cells about ``cell``
    pixels across.  Labels are in row-major order of the sites."""
    rng = np.random.default_rng(seed)
    nx = max(1, int(round(width / cell)))
    ny = max(1, int(round(height / cell)))
    gx, gy = np.meshgrid((np.arange(nx) + 0.5) * width / nx, (np.arange(ny) + 0.5) * height / ny)
    sites = np.stack([gx.ravel(), gy.ravel()], axis=1)
    sites += (rng.random(sites.shape) - 0.5) * jitter * np.array([width / nx, height / ny])
    yy, xx = np.mgrid[0:height, 0:width]
    _, idx = cKDTree(sites).query(np.stack([xx.ravel() + 0.5, yy.ravel() + 0.5], axis=1))
    return idx.reshape(height, width).astype(np.int64)


def random_blocks(width: int, height: int, n_labels: int = 3, block: int = 1, seed: int = 0) -> np.ndarray:
    """Random labels on a grid of ``block x block`` squares."""
    rng = np.random.default_rng(seed)
    small = rng.integers(0, n_labels, (-(-height // block), -(-width // block)))
    return small.repeat(block, 0).repeat(block, 1)[:height, :width].astype(np.int64)


def blob_labels(width: int, height: int, n_regions: int = 8, seed: int = 0, smooth: float = 3.0) -> np.ndarray:
    """Irregular regions: Voronoi regions of random sites with boundaries
    roughened by smoothed noise."""
    from scipy.ndimage import gaussian_filter

    rng = np.random.default_rng(seed)
    sites = rng.random((n_regions, 2)) * [width, height]
    yy, xx = np.mgrid[0:height, 0:width].astype(float)
    amp = 0.08 * max(width, height)
    nx = gaussian_filter(rng.standard_normal((height, width)), smooth)
    ny = gaussian_filter(rng.standard_normal((height, width)), smooth)
    nx *= amp / (np.abs(nx).max() + 1e-12)
    ny *= amp / (np.abs(ny).max() + 1e-12)
    pts = np.stack([(xx + nx).ravel(), (yy + ny).ravel()], axis=1)
    _, idx = cKDTree(sites).query(pts)
    return idx.reshape(height, width).astype(np.int64)


def ring_map(size: int = 5) -> np.ndarray:
    """One pixel of label 1 in the middle of a ``size x size`` field of 0."""
    a = np.zeros((size, size), dtype=np.int64)
    a[size // 2, size // 2] = 1
    return a


def double_hole_map(width: int = 12, height: int = 7) -> np.ndarray:
    """Background 0 with two separate islands (labels 1 and 2)."""
    a = np.zeros((height, width), dtype=np.int64)
    a[2:5, 2:4] = 1
    a[2:5, 7:10] = 2
    return a


def nested_map(size: int = 11) -> np.ndarray:
    """Concentric squares: 0 outside, a ring of 1, a ring of 2, a core of 3."""
    a = np.zeros((size, size), dtype=np.int64)
    a[2:-2, 2:-2] = 1
    a[4:-4, 4:-4] = 2
    a[5:-5, 5:-5] = 3
    return a
