"""Stage 2: replace zigzag chains between two faces by straight segments.

A chain is a maximal run of interior edges between branch vertices (degree
at least 3, or image corners) that separates the same two faces.  A chain is
replaced by the segment joining its ends when it stays close to that segment
and the segment fits; otherwise it is split at the vertex of largest
deviation and both halves are treated the same way.  How close is close
enough depends on the colour contrast of the two faces: low-contrast
boundaries may move further.

Only existing chain vertices are ever used as segment ends, so all vertices
stay on the pixel-corner lattice and every predicate stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .geometry import (
    angle_between,
    distance_to_segment,
    point_line_distance,
    segments_properly_intersect,
)
from .mesh import OUTSIDE, Mesh


@dataclass(frozen=True)
class RimeParams:
    """Thresholds of the conversion.

    color_offset: intensity times pixels; a boundary between faces whose mean
        intensities differ by ``c`` may move by ``color_offset / c`` pixels.
    max_color_dif: adjacent faces closer than this in mean intensity merge.
    min_angle: smallest angle in degrees a new segment may form with any edge
        at its ends.
    """

    color_offset: float = 30.0
    max_color_dif: float = 2.0
    min_angle: float = 30.0

    def __post_init__(self):
        if not (self.color_offset > 0 and self.max_color_dif > 0 and self.min_angle > 0):
            raise ValueError("parameters must be positive")
        if not self.min_angle < 90:
            raise ValueError("min_angle must be below 90 degrees")


@dataclass
class Chain:
    a: int
    b: int
    interior: List[int]
    left: int
    right: int
    halfedges: List[int]

    @property
    def vertices(self) -> List[int]:
        return [self.a] + self.interior + [self.b]


@dataclass
class DeviationResult:
    vertex: Optional[int]
    distance: float
    index: int = -1


@dataclass
class Replacement:
    a: Tuple[int, int]
    b: Tuple[int, int]
    points: List[Tuple[int, int]]


@dataclass
class ChainLog:
    faces: Tuple[int, int]
    a: Tuple[int, int]
    b: Tuple[int, int]
    original_edges: int
    replacement_edges: int
    original_length: float
    replacement_length: float
    tolerance: float
    color_difference: float
    replacements: List[Replacement] = field(default_factory=list)


# -------------------------------------------------------------------- chains
def _branch_flags(mesh: Mesh) -> List[bool]:
    deg = [0] * len(mesh.vx)
    for h, o in enumerate(mesh.origin):
        if o >= 0:
            deg[o] += 1
    return [deg[v] >= 3 or (deg[v] > 0 and mesh.is_corner(v)) for v in range(len(mesh.vx))]


def _make_chain(mesh: Mesh, hs: List[int]) -> Chain:
    pa = mesh.point(mesh.origin[hs[0]])
    pb = mesh.point(mesh.dest(hs[-1]))
    if pb < pa:
        hs = [h ^ 1 for h in reversed(hs)]
    return Chain(
        a=mesh.origin[hs[0]], b=mesh.dest(hs[-1]),
        interior=[mesh.origin[h] for h in hs[1:]],
        left=mesh.face[hs[0]], right=mesh.face[hs[0] ^ 1], halfedges=list(hs),
    )


def _split_at(mesh: Mesh, hs: List[int], k: int) -> List[List[int]]:
    return [hs[:k], hs[k:]]


def extract_chains(mesh: Mesh) -> List[Chain]:
    """All chains of interior edges in canonical order.

    Each edge with interior faces on both sides lies in exactly one chain.
    Chains are oriented from the lexicographically smaller end and sorted by
    ``(min face, max face, smaller end, larger end)``.  A closed loop without
    branch vertices is cut at its lexicographically smallest and largest
    vertices; a chain returning to its start is cut at the interior vertex
    farthest from it.
    """
    branch = _branch_flags(mesh)
    used = bytearray(len(mesh.origin) // 2)
    pieces: List[List[int]] = []
    for h in mesh.edges():
        if used[h >> 1] or mesh.face[h] == OUTSIDE or mesh.face[h ^ 1] == OUTSIDE:
            continue
        g = h
        closed = False
        while not branch[mesh.origin[g]]:
            g = mesh.prev[g]
            if g == h:
                closed = True
                break
        hs = [g]
        used[g >> 1] = 1
        while not branch[mesh.dest(hs[-1])]:
            n = mesh.next[hs[-1]]
            if n == g:
                break
            hs.append(n)
            used[n >> 1] = 1
        if closed:
            pts = [mesh.point(mesh.origin[x]) for x in hs]
            i0 = min(range(len(hs)), key=lambda i: pts[i])
            hs = hs[i0:] + hs[:i0]
            pts = pts[i0:] + pts[:i0]
            i1 = max(range(len(hs)), key=lambda i: pts[i])
            pieces += _split_at(mesh, hs, i1)
        elif mesh.origin[hs[0]] == mesh.dest(hs[-1]):
            a = mesh.point(mesh.origin[hs[0]])
            best = max(range(1, len(hs)), key=lambda i: (
                (mesh.vx[mesh.origin[hs[i]]] - a[0]) ** 2 + (mesh.vy[mesh.origin[hs[i]]] - a[1]) ** 2,
                tuple(-c for c in mesh.point(mesh.origin[hs[i]]))))
            pieces += _split_at(mesh, hs, best)
        else:
            pieces.append(hs)
    chains = [_make_chain(mesh, hs) for hs in pieces]
    chains.sort(key=lambda c: (min(c.left, c.right), max(c.left, c.right), mesh.point(c.a), mesh.point(c.b),
                               mesh.point(c.interior[0]) if c.interior else (-1, -1)))
    return chains


# ----------------------------------------------------------------- deviation
def _max_dev(mesh: Mesh, verts: Sequence[int], i: int, j: int) -> Tuple[float, int]:
    a, b = mesh.point(verts[i]), mesh.point(verts[j])
    best, arg = -1.0, -1
    for k in range(i + 1, j):
        d = point_line_distance(mesh.point(verts[k]), a, b)
        if d > best:
            best, arg = d, k
    return best, arg


def max_deviation(chain: Chain, mesh: Mesh) -> DeviationResult:
    """Interior vertex farthest from the line through the chain ends.

    Ties go to the vertex nearest ``A`` along the chain.  A chain without
    interior vertices gives distance 0 and no vertex.
    """
    if not chain.interior:
        return DeviationResult(None, 0.0)
    verts = chain.vertices
    if chain.a == chain.b:
        raise ValueError("chain ends coincide")
    d, k = _max_dev(mesh, verts, 0, len(verts) - 1)
    return DeviationResult(verts[k], d, k)


def chain_tolerance(f1, f2, params: RimeParams = RimeParams()) -> float:
    """Allowed deviation for the boundary between two faces.

    ``f1`` and ``f2`` are mean intensities (or face records carrying
    ``luma``).  The result is ``max(1, color_offset / |f1 - f2|)``, infinite
    for equal intensities.
    """
    l1 = getattr(f1, "luma", f1)
    l2 = getattr(f2, "luma", f2)
    diff = abs(float(l1) - float(l2))
    if diff == 0:
        return math.inf
    return max(1.0, params.color_offset / diff)


# -------------------------------------------------------------- admissibility
def _on_path(mesh: Mesh, hs: Sequence[int], mx2: int, my2: int) -> bool:
    for h in hs:
        a, b = mesh.origin[h], mesh.dest(h)
        ax, ay, bx, by = 2 * mesh.vx[a], 2 * mesh.vy[a], 2 * mesh.vx[b], 2 * mesh.vy[b]
        if (bx - ax) * (my2 - ay) - (by - ay) * (mx2 - ax) == 0 and \
                min(ax, bx) <= mx2 <= max(ax, bx) and min(ay, by) <= my2 <= max(ay, by):
            return True
    return False


def _inside2(mesh: Mesh, hs: Sequence[int], mx2: int, my2: int) -> bool:
    # even-odd crossing test in doubled coordinates over the given half-edges
    inside = False
    for g in hs:
        a, b = mesh.origin[g], mesh.dest(g)
        ax, ay = 2 * mesh.vx[a], 2 * mesh.vy[a]
        bx, by = 2 * mesh.vx[b], 2 * mesh.vy[b]
        if (ay > my2) != (by > my2):
            lhs = (mx2 - ax) * (by - ay)
            rhs = (my2 - ay) * (bx - ax)
            if (lhs < rhs) if by > ay else (lhs > rhs):
                inside = not inside
    return inside


def segment_admissible(mesh: Mesh, a: int, b: int, f1: int, f2: int, hs: Sequence[int],
                       params: RimeParams = RimeParams()) -> bool:
    """Can the path ``hs`` from ``a`` to ``b`` between faces ``f1`` and ``f2``
    be replaced by the straight segment ``ab``?

    Requires that the segment crosses or touches no other edge of the two
    faces, that its midpoint lies inside one of them (or on the path), and
    that it meets every other edge at ``a`` and ``b`` at more than
    ``min_angle`` degrees.
    """
    if a == b:
        raise ValueError("segment ends coincide")
    pa, pb = mesh.point(a), mesh.point(b)
    own = {h >> 1 for h in hs}
    h1 = mesh.face_halfedges(f1)
    h2 = mesh.face_halfedges(f2) if f2 != f1 else []
    lo_x, hi_x = min(pa[0], pb[0]), max(pa[0], pb[0])
    lo_y, hi_y = min(pa[1], pb[1]), max(pa[1], pb[1])
    vx, vy, origin = mesh.vx, mesh.vy, mesh.origin
    for g in h1 + h2:
        if g >> 1 in own:
            continue
        u, v = origin[g], origin[g ^ 1]
        ux, uy, wx, wy = vx[u], vy[u], vx[v], vy[v]
        if max(ux, wx) < lo_x or min(ux, wx) > hi_x or max(uy, wy) < lo_y or min(uy, wy) > hi_y:
            continue
        if segments_properly_intersect(pa, pb, (ux, uy), (wx, wy)):
            return False
    mx2, my2 = pa[0] + pb[0], pa[1] + pb[1]
    if not (_on_path(mesh, hs, mx2, my2) or _inside2(mesh, h1, mx2, my2) or (h2 and _inside2(mesh, h2, mx2, my2))):
        return False
    first, last = hs[0] >> 1, hs[-1] >> 1
    for end, other, skip in ((a, pb, first), (b, pa, last)):
        pe = mesh.point(end)
        for g in mesh.outgoing(end):
            if g >> 1 == skip:
                continue
            if angle_between(pe, other, mesh.point(mesh.dest(g))) <= params.min_angle:
                return False
    return True


# ---------------------------------------------------------------- replacement
def _path_length(mesh: Mesh, hs: Sequence[int]) -> float:
    return sum(math.dist(mesh.point(mesh.origin[h]), mesh.point(mesh.dest(h))) for h in hs)


def straighten_chain(mesh: Mesh, chain: Chain, params: RimeParams = RimeParams(),
                     log: Optional[List[ChainLog]] = None) -> List[int]:
    """Straighten ``chain`` in place; returns the vertex ids of the result.

    A (sub)chain ``A..B`` becomes the segment ``AB`` when its largest
    deviation from line ``AB`` is below the tolerance, every lattice point it
    ever passed through (including points absorbed by earlier replacements)
    lies within the tolerance of segment ``AB``, and the segment is
    admissible.  Otherwise it is split at the farthest vertex and both parts
    are processed, left part first.
    """
    f1, f2 = chain.left, chain.right
    l1, l2 = mesh.faces[f1].luma, mesh.faces[f2].luma
    tol = chain_tolerance(l1 if l1 is not None else 0.0, l2 if l2 is not None else 0.0, params)
    cdiff = abs((l1 or 0.0) - (l2 or 0.0))
    verts = chain.vertices
    hs = list(chain.halfedges)
    entry = ChainLog(faces=(f1, f2), a=mesh.point(chain.a), b=mesh.point(chain.b),
                     original_edges=len(hs), replacement_edges=len(hs),
                     original_length=_path_length(mesh, hs), replacement_length=0.0,
                     tolerance=tol, color_difference=cdiff)
    keep = [True] * len(verts)
    stack = [(0, len(verts) - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        sub = hs[i:j]
        a, b = verts[i], verts[j]
        if a == b:
            pa = mesh.point(a)
            k = max(range(i + 1, j), key=lambda t: (math.dist(mesh.point(verts[t]), pa), -t))
            stack += [(k, j), (i, k)]
            continue
        d, k = _max_dev(mesh, verts, i, j)
        pa, pb = mesh.point(a), mesh.point(b)
        ok = d < tol
        if ok:
            pts = mesh.path_points(sub)
            ok = all(distance_to_segment(p, pa, pb) < tol for p in pts)
        if ok:
            ok = segment_admissible(mesh, a, b, f1, f2, sub, params)
        if ok:
            pts = mesh.path_points(sub)
            mesh.replace_path(sub)
            for t in range(i + 1, j):
                keep[t] = False
            entry.replacements.append(Replacement(pa, pb, pts))
        else:
            stack += [(k, j), (i, k)]
    out = [v for v, kp in zip(verts, keep) if kp]
    alive = [hs[t] for t in range(len(hs)) if keep[t]]
    entry.replacement_edges = len(alive)
    entry.replacement_length = _path_length(mesh, alive)
    if log is not None:
        log.append(entry)
    return out


def straighten_all(mesh: Mesh, params: RimeParams = RimeParams(), until_stable: bool = True,
                   faces: Optional[set] = None) -> Tuple[Mesh, List[ChainLog]]:
    """Straighten every chain in canonical order, in place.

    With ``until_stable`` the pass is repeated while it still changes the
    mesh, so a second call finds nothing left to do.  ``faces`` restricts
    the work to chains touching those faces.
    """
    log: List[ChainLog] = []
    while True:
        changed = False
        for chain in extract_chains(mesh):
            if faces is not None and chain.left not in faces and chain.right not in faces:
                continue
            if not chain.interior:
                continue
            before = len(chain.halfedges)
            straighten_chain(mesh, chain, params, log)
            if log[-1].replacement_edges != before:
                changed = True
        if not (until_stable and changed):
            return mesh, log
