"""Exact predicates on integer lattice points.

All mesh vertices live on the pixel-corner lattice, so every sign test here is
an integer computation and never rounds.  Floating point only appears in the
metric quantities (distances, angles) that are compared against tolerances.
"""

from __future__ import annotations

import math
from typing import Sequence, Tuple

Point = Tuple[int, int]


def orient2d(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> int:
    """Sign of the cross product ``(b - a) x (c - a)``.

    Returns +1 when ``a, b, c`` turn counterclockwise in the (x, y) frame,
    -1 when clockwise and 0 when collinear.  Python integers are unbounded,
    so the result is exact for any integer input.
    """
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return int(det > 0) - int(det < 0)


def cross(a: Sequence[int], b: Sequence[int], c: Sequence[int]) -> int:
    """Twice the signed area of triangle ``abc``."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(p, q, r) -> bool:
    # r collinear with pq assumed
    return min(p[0], q[0]) <= r[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])


def segments_properly_intersect(p1, p2, q1, q2) -> bool:
    """True iff closed segments p1p2 and q1q2 share a point other than a shared endpoint.

    Crossings, an endpoint touching the other segment's interior and collinear
    overlaps all count.  Two segments meeting only at a common endpoint do not.

    Raises:
        ValueError: if either segment has zero length.
    """
    p1 = tuple(p1)
    p2 = tuple(p2)
    q1 = tuple(q1)
    q2 = tuple(q2)
    if p1 == p2 or q1 == q2:
        raise ValueError("degenerate zero-length segment")
    # cheap bounding-box rejection
    if max(p1[0], p2[0]) < min(q1[0], q2[0]) or max(q1[0], q2[0]) < min(p1[0], p2[0]):
        return False
    if max(p1[1], p2[1]) < min(q1[1], q2[1]) or max(q1[1], q2[1]) < min(p1[1], p2[1]):
        return False

    d1 = orient2d(q1, q2, p1)
    d2 = orient2d(q1, q2, p2)
    d3 = orient2d(p1, p2, q1)
    d4 = orient2d(p1, p2, q2)

    if d1 == 0 and d2 == 0:
        # collinear: overlap of positive length, or a single shared point
        if p1[0] != p2[0]:
            lo_p, hi_p = sorted((p1[0], p2[0]))
            lo_q, hi_q = sorted((q1[0], q2[0]))
        else:
            lo_p, hi_p = sorted((p1[1], p2[1]))
            lo_q, hi_q = sorted((q1[1], q2[1]))
        lo, hi = max(lo_p, lo_q), min(hi_p, hi_q)
        if lo < hi:
            return True
        if lo > hi:
            return False
        # exactly one common point; allowed only if it is an endpoint of both
        shared = {p1, p2} & {q1, q2}
        return not shared

    shared = {p1, p2} & {q1, q2}
    if shared:
        # non-collinear segments with a common endpoint meet only there
        return False
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    # touching configurations: an endpoint lies on the other segment
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def point_line_distance(c, a, b) -> float:
    """Distance from ``c`` to the infinite line through ``a`` and ``b``.

    The numerator is the exact integer cross product; only the final division
    is rounded.
    """
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    if dx == 0 and dy == 0:
        raise ValueError("line through coincident points")
    return abs(dx * (c[1] - a[1]) - dy * (c[0] - a[0])) / math.hypot(dx, dy)


# straightening measures deviation from the line AB; alias kept for callers
point_segment_distance = point_line_distance


def distance_to_segment(c, a, b) -> float:
    """Distance from ``c`` to the closed segment ``ab``."""
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    if dx == 0 and dy == 0:
        raise ValueError("segment with coincident endpoints")
    t = (c[0] - a[0]) * dx + (c[1] - a[1]) * dy
    if t <= 0:
        return math.hypot(c[0] - a[0], c[1] - a[1])
    if t >= dx * dx + dy * dy:
        return math.hypot(c[0] - b[0], c[1] - b[1])
    return abs(dx * (c[1] - a[1]) - dy * (c[0] - a[0])) / math.hypot(dx, dy)


def angle_between(shared, u, v) -> float:
    """Angle in degrees in [0, 180] between rays ``shared->u`` and ``shared->v``."""
    ux, uy = u[0] - shared[0], u[1] - shared[1]
    vx, vy = v[0] - shared[0], v[1] - shared[1]
    if (ux == 0 and uy == 0) or (vx == 0 and vy == 0):
        raise ValueError("zero-length ray")
    # atan2 of (|cross|, dot) is well conditioned for every angle
    return math.degrees(math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy))


def _half(v) -> int:
    # 0 for angles in [0, 180), 1 for [180, 360)
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def sweep_less(ref, d1, d2) -> bool:
    """Is the counterclockwise sweep from ``ref`` to ``d1`` shorter than to ``d2``?

    Directions are integer vectors; a direction parallel to ``ref`` has sweep
    0.  Exact.
    """
    a = (ref[0] * d1[0] + ref[1] * d1[1], ref[0] * d1[1] - ref[1] * d1[0])
    b = (ref[0] * d2[0] + ref[1] * d2[1], ref[0] * d2[1] - ref[1] * d2[0])
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha < hb
    return a[0] * b[1] - a[1] * b[0] > 0


def same_direction(u, v) -> bool:
    return u[0] * v[1] - u[1] * v[0] == 0 and u[0] * v[0] + u[1] * v[1] > 0


def in_sector(out_dir, back_dir, d) -> bool:
    """Does ``d`` point strictly into the wedge swept counterclockwise from
    ``out_dir`` to ``back_dir``?

    For a face lying left of an outgoing edge ``out_dir`` whose previous edge
    arrives from ``back_dir``, this is the face's angular wedge at the vertex.
    Equal directions (a spike) make the wedge the full turn.
    """
    if same_direction(d, out_dir):
        return False
    if same_direction(back_dir, out_dir):
        return True
    return sweep_less(out_dir, d, back_dir)


def polygon_area2(points: Sequence[Sequence[int]]) -> int:
    """Twice the signed shoelace area of a closed polygon (exact)."""
    n = len(points)
    s = 0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def polygon_perimeter(points: Sequence[Sequence[int]]) -> float:
    n = len(points)
    return sum(
        math.hypot(points[(i + 1) % n][0] - points[i][0], points[(i + 1) % n][1] - points[i][1])
        for i in range(n)
    )
