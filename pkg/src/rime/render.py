"""Point location and constant-colour rendering of a mesh at any scale.

A sample point sitting exactly on an edge is resolved by perturbing it by
``(+eps, +eps**2)``: it belongs to the face on the +x side of the edge, and a
point level with a vertex counts as lying just below it.  With that rule every
output pixel centre lands in exactly one face, and the decision is made with
integer arithmetic only.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .mesh import OUTSIDE, Mesh

Scale = Union[int, float, Fraction]


def _as_fraction(scale: Scale) -> Fraction:
    s = Fraction(scale).limit_denominator(4096) if not isinstance(scale, Fraction) else scale
    if s <= 0:
        raise ValueError("scale must be positive")
    return s


def output_shape(mesh: Mesh, scale: Scale) -> Tuple[int, int]:
    s = _as_fraction(scale)
    return (math.ceil(s * mesh.height), math.ceil(s * mesh.width))


def locate_pixels(mesh: Mesh, scale: Scale = 1) -> np.ndarray:
    """Face id of every output pixel centre for a rendering at ``scale``.

    Output pixel ``(i, j)`` has its centre at ``((i + .5) / s, (j + .5) / s)``
    in mesh coordinates.  Centres beyond the mesh (when ``s * W`` is not an
    integer) take the nearest interior face along their row or column.
    """
    s = _as_fraction(scale)
    p, q = s.numerator, s.denominator
    out_h, out_w = output_shape(mesh, s)

    seg = mesh.edge_segments()
    hes = np.array(mesh.edges(), dtype=np.int64)
    faces = np.asarray(mesh.face, dtype=np.int64)
    x0, y0, x1, y1 = seg.T
    # orient every edge downwards (increasing y); the face on its +x side is
    # the one left of the upward half-edge
    flip = y1 < y0
    f_plus = np.where(flip, faces[hes], faces[hes ^ 1])
    x0, x1 = np.where(flip, x1, x0), np.where(flip, x0, x1)
    y0, y1 = np.where(flip, y1, y0), np.where(flip, y0, y1)
    keep = (y1 > y0) & (f_plus != OUTSIDE)
    x0, y0, x1, y1, f_plus = x0[keep], y0[keep], x1[keep], y1[keep], f_plus[keep]

    # rows j with y0 <= (j + .5)/s < y1, i.e. 2p*y0 <= q(2j+1) < 2p*y1
    j_lo = -((q - 2 * p * y0) // (2 * q))
    j_hi = -((q - 2 * p * y1) // (2 * q))
    j_lo = np.clip(j_lo, 0, out_h)
    j_hi = np.clip(j_hi, 0, out_h)
    counts = np.maximum(j_hi - j_lo, 0)
    total = int(counts.sum())
    labels = np.full((out_h, out_w), OUTSIDE, dtype=np.int64)
    if total == 0:
        return labels
    e = np.repeat(np.arange(len(counts)), counts)
    starts = np.cumsum(counts) - counts
    j = j_lo[e] + (np.arange(total) - starts[e])
    dx = x1[e] - x0[e]
    dy = y1[e] - y0[e]
    y2 = q * (2 * j + 1)
    # crossing abscissa times 2p*dy, exact
    num = 2 * p * x0[e] * dy + (y2 - 2 * p * y0[e]) * dx
    den = 2 * q * dy
    # first pixel whose centre is at or right of the crossing
    i_start = -((q * dy - num) // den)
    xkey = num / den
    ok = i_start < out_w
    j, i_start, xkey, fp = j[ok], np.maximum(i_start[ok], 0), xkey[ok], f_plus[e][ok]
    order = np.lexsort((xkey, j))
    j, i_start, fp = j[order], i_start[order], fp[order]
    cell = j * (out_w + 1) + i_start
    last = np.r_[cell[1:] != cell[:-1], True]
    marker = np.full((out_h, out_w), -2, dtype=np.int64)
    marker[j[last], i_start[last]] = fp[last]

    has = marker != -2
    idx = np.where(has, np.arange(out_w)[None, :], 0)
    np.maximum.accumulate(idx, axis=1, out=idx)
    labels = np.take_along_axis(marker, idx, axis=1)
    labels[~np.take_along_axis(has, idx, axis=1)] = OUTSIDE
    # rows entirely past the bottom edge copy the last covered row
    covered = (labels != OUTSIDE).any(axis=1)
    if not covered.all() and covered.any():
        last_row = np.maximum.accumulate(np.where(covered, np.arange(out_h), 0))
        labels = labels[last_row]
    return labels


def mesh_to_labels(mesh: Mesh) -> np.ndarray:
    """Label map holding, per pixel, the id of the face containing its centre."""
    return locate_pixels(mesh, 1)


def face_colors(mesh: Mesh, image, return_flagged: bool = False):
    """Best constant colour per face: the mean of pixels centred inside it.

    Faces that contain no pixel centre get the colour of the pixel nearest to
    their vertex centroid, and are reported when ``return_flagged`` is set.
    """
    img = np.asarray(getattr(image, "samples", image), dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None]
    h, w, c = img.shape
    if (h, w) != (mesh.height, mesh.width):
        raise ValueError("image and mesh dimensions differ")
    ids = mesh_to_labels(mesh).ravel()
    n = len(mesh.faces)
    cnt = np.bincount(ids, minlength=n)
    sums = np.stack([np.bincount(ids, weights=img[:, :, k].ravel(), minlength=n) for k in range(c)], axis=1)
    colors: Dict[int, np.ndarray] = {}
    flagged = []
    for f in mesh.face_ids():
        if cnt[f]:
            colors[f] = sums[f] / cnt[f]
        else:
            pts = np.array(mesh.cycle_points(mesh.faces[f].outer), dtype=float)
            cx, cy = pts.mean(axis=0)
            i = min(max(int(math.floor(cx)), 0), w - 1)
            jj = min(max(int(math.floor(cy)), 0), h - 1)
            colors[f] = img[jj, i].copy()
            flagged.append(f)
    if return_flagged:
        return colors, flagged
    return colors


def rasterize(mesh: Mesh, colors: Dict[int, Sequence[float]], scale: Scale = 1,
              stroke: Optional[Sequence[float]] = None) -> np.ndarray:
    """Render ``mesh`` filled with per-face ``colors`` at ``scale``.

    Returns an ``(ceil(s*H), ceil(s*W), C)`` float array.  With ``stroke`` the
    edges are drawn over the fill, one output pixel wide.
    """
    ids = locate_pixels(mesh, scale)
    c = len(next(iter(colors.values())))
    table = np.zeros((len(mesh.faces) + 1, c))
    for f, col in colors.items():
        table[f] = col
    out = table[ids]
    if stroke is not None:
        s = float(_as_fraction(scale))
        oh, ow = ids.shape
        for x0, y0, x1, y1 in mesh.edge_segments():
            length = math.hypot(x1 - x0, y1 - y0) * s
            t = np.linspace(0.0, 1.0, max(int(math.ceil(length * 2)), 1) + 1)
            px = np.clip(((x0 + (x1 - x0) * t) * s).astype(int), 0, ow - 1)
            py = np.clip(((y0 + (y1 - y0) * t) * s).astype(int), 0, oh - 1)
            out[py, px] = stroke
    return out
