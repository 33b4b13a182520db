"""Quality measures for over-segmentations, pixel-based or polygonal.

All functions take label maps; meshes are accepted wherever a segmentation
is expected and are first turned into a label map by pixel-centre location.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.ndimage import distance_transform_edt

from .mesh import Mesh
from .raster_io import as_labels, as_samples
from .render import mesh_to_labels

__all__ = [
    "MetricsReport", "mesh_to_labels", "boundary_mask", "boundary_recall", "cue", "asa",
    "overlap_counts", "dre", "compactness", "evaluate",
]


def _labels(seg) -> np.ndarray:
    if isinstance(seg, Mesh):
        return mesh_to_labels(seg)
    return as_labels(seg)


def _pair(seg, gt):
    s, g = _labels(seg), _labels(gt)
    if s.shape != g.shape:
        raise ValueError(f"dimension mismatch: {s.shape} vs {g.shape}")
    return s, g


def boundary_mask(labels) -> np.ndarray:
    """Pixels whose right or lower neighbour carries a different label.

    Marking one side of each label change gives a one-pixel-wide boundary
    located on the pixel just before the change.
    """
    a = _labels(labels)
    b = np.zeros(a.shape, dtype=bool)
    b[:, :-1] |= a[:, 1:] != a[:, :-1]
    b[:-1, :] |= a[1:, :] != a[:-1, :]
    return b


def boundary_recall(seg, gt, eps: float = 2.0) -> float:
    """Fraction of ground-truth boundary pixels within Euclidean distance
    ``eps`` of a segmentation boundary pixel (1 when there are none)."""
    s, g = _pair(seg, gt)
    gb = boundary_mask(g)
    n = int(gb.sum())
    if n == 0:
        return 1.0
    sb = boundary_mask(s)
    if not sb.any():
        return 0.0
    dist = distance_transform_edt(~sb)
    return float(np.count_nonzero(dist[gb] <= eps)) / n


def overlap_counts(seg, gt):
    """Per superpixel: size and its overlap with the best ground-truth region.

    Returns ``(sizes, best)`` as integer arrays over the distinct superpixel
    labels; overlap ties are resolved toward the smaller ground-truth label
    (this does not change the counts).
    """
    s, g = _pair(seg, gt)
    _, si = np.unique(s.ravel(), return_inverse=True)
    _, gi = np.unique(g.ravel(), return_inverse=True)
    ng = gi.max() + 1
    pair = si.astype(np.int64) * ng + gi
    keys, counts = np.unique(pair, return_counts=True)
    ks = keys // ng
    nsp = si.max() + 1
    best = np.zeros(nsp, dtype=np.int64)
    np.maximum.at(best, ks, counts)
    sizes = np.bincount(si, minlength=nsp)
    return sizes, best


def cue(seg, gt, per_superpixel: bool = False) -> float:
    """Corrected under-segmentation error: leaked pixels over all pixels.

    ``per_superpixel=True`` averages the leak counts over superpixels
    instead of normalising by the pixel count (values may then exceed 1).
    """
    sizes, best = overlap_counts(seg, gt)
    leak = int((sizes - best).sum())
    if per_superpixel:
        return leak / len(sizes)
    return leak / int(sizes.sum())


def asa(seg, gt, per_superpixel: bool = False) -> float:
    """Achievable segmentation accuracy: best-overlap pixels over all pixels."""
    sizes, best = overlap_counts(seg, gt)
    if per_superpixel:
        return int(best.sum()) / len(sizes)
    return int(best.sum()) / int(sizes.sum())


def dre(seg, image) -> float:
    """Sum over pixels of the squared distance between the pixel colour and
    the mean colour of its superpixel."""
    s = _labels(seg)
    img = as_samples(image)
    if img.shape[:2] != s.shape:
        raise ValueError(f"dimension mismatch: {s.shape} vs {img.shape[:2]}")
    _, si = np.unique(s.ravel(), return_inverse=True)
    cnt = np.bincount(si)
    total = 0.0
    for k in range(img.shape[2]):
        v = img[:, :, k].ravel()
        mean = np.bincount(si, weights=v) / cnt
        total += float(np.sum((v - mean[si]) ** 2))
    return total


def compactness(seg) -> float:
    """Mean isoperimetric quotient ``4 pi area / perimeter**2`` over regions.

    Meshes use exact polygon areas and Euclidean perimeters.  Label maps use
    pixel counts and the number of unit pixel edges on the region boundary,
    the image border included.
    """
    if isinstance(seg, Mesh):
        qs = [4 * math.pi * seg.area(f) / seg.perimeter(f) ** 2 for f in seg.face_ids()]
        return float(np.mean(qs))
    a = as_labels(seg)
    _, si = np.unique(a.ravel(), return_inverse=True)
    si = si.reshape(a.shape)
    n = si.max() + 1
    area = np.bincount(si.ravel(), minlength=n)
    p = np.pad(si, 1, constant_values=-1)
    per = np.zeros(n, dtype=np.int64)
    for nb in (p[:-2, 1:-1], p[2:, 1:-1], p[1:-1, :-2], p[1:-1, 2:]):
        diff = nb != si
        per += np.bincount(si[diff], minlength=n)
    return float(np.mean(4 * math.pi * area / per.astype(float) ** 2))


@dataclass
class MetricsReport:
    superpixel_count: int
    br: float
    br_epsilon: float
    cue: float
    asa: float
    dre: Optional[float]
    compactness: float

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(seg, gts: Sequence, image=None, eps: float = 2.0) -> MetricsReport:
    """All measures for one segmentation.

    With several ground truths, each measure uses the one most favourable to
    it (highest BR and ASA, lowest CUE).
    """
    s = _labels(seg)
    if not isinstance(gts, (list, tuple)):
        gts = [gts]
    if not gts:
        raise ValueError("no ground truth")
    br = max(boundary_recall(s, g, eps) for g in gts)
    asas, cues = [], []
    for g in gts:
        sizes, best = overlap_counts(s, g)
        n = int(sizes.sum())
        asas.append(int(best.sum()) / n)
        cues.append(int((sizes - best).sum()) / n)
    return MetricsReport(
        superpixel_count=int(len(np.unique(s))),
        br=br, br_epsilon=float(eps), cue=min(cues), asa=max(asas),
        dre=None if image is None else dre(s, image),
        compactness=compactness(seg if isinstance(seg, Mesh) else s),
    )
