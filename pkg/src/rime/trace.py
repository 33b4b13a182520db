"""Stage 1: turn a label map into a pixel-based mesh.

Boundaries are followed corner by corner along the pixel grid, keeping the
region being traced on the left of travel.  "Left" is taken in the (x, y)
frame with y pointing down, so the left side of an eastward step is the row
below it; traced outer boundaries therefore have positive shoelace area.
Regions are 4-connected: at a checkerboard corner the walk takes the tight
left turn, which keeps diagonal neighbours apart.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .geometry import angle_between, segments_properly_intersect
from .mesh import Face, Mesh
from .raster_io import as_labels, label_components

# directions in raster coordinates; (d + 1) % 4 is a left turn
E, S, W, N = 0, 1, 2, 3
DX = (1, 0, -1, 0)
DY = (0, 1, 0, -1)
NAMES = "ESWN"

# index into a corner window (TL, TR, BL, BR) of the pixel left / right of an
# outgoing unit edge
_LEFT = (3, 2, 0, 1)
_RIGHT = (1, 3, 2, 0)


def _as_dir(d) -> int:
    return NAMES.index(d) if isinstance(d, str) else int(d)


def next_direction(window, incoming, traced) -> int:
    """Outgoing direction at a pixel corner.

    Args:
        window: 2x2 labels around the corner, ``[[TL, TR], [BL, BR]]``.
        incoming: direction of the step that reached the corner (index or
            one of ``"ESWN"``).
        traced: label of the region being followed.

    Returns the first of left turn, straight, right turn whose unit edge has
    ``traced`` on its left and something else on its right.
    """
    w = (window[0][0], window[0][1], window[1][0], window[1][1])
    if all(v == traced for v in w) or not any(v == traced for v in w):
        raise ValueError("corner is not on the boundary of the traced region")
    d = _as_dir(incoming)
    for o in ((d + 1) % 4, d, (d + 3) % 4):
        if w[_LEFT[o]] == traced and w[_RIGHT[o]] != traced:
            return o
    raise ValueError("corner is not on the boundary of the traced region")


@dataclass
class TraceStats:
    boundary_pixel_count: int
    faces_found: int
    components_added: int
    enclosures_split: int = 0
    loops_traced: int = 0


@dataclass
class EnclosureSplit:
    outer_face: int
    inner_face: int
    edge_d1: Tuple[Tuple[int, int], Tuple[int, int]]
    edge_d2: Tuple[Tuple[int, int], Tuple[int, int]]
    new_face: int
    angle_ok: bool = True


def boundary_pixel_count(labels) -> int:
    """Pixels with at least one 4-neighbour carrying a different label."""
    a = as_labels(labels)
    b = np.zeros(a.shape, dtype=bool)
    dh = a[:, 1:] != a[:, :-1]
    dv = a[1:, :] != a[:-1, :]
    b[:, 1:] |= dh
    b[:, :-1] |= dh
    b[1:, :] |= dv
    b[:-1, :] |= dv
    return int(b.sum())


def vertex_mask(comp: np.ndarray) -> np.ndarray:
    """Corners where the region boundary branches or turns, ``(H+1, W+1)``."""
    p = np.pad(comp, 1, constant_values=-1)
    tl, tr, bl, br = p[:-1, :-1], p[:-1, 1:], p[1:, :-1], p[1:, 1:]
    up = tl != tr
    down = bl != br
    left = tl != bl
    right = tr != br
    deg = up.astype(np.int8) + down + left + right
    straight = (up & down & ~left & ~right) | (left & right & ~up & ~down)
    return (deg >= 3) | ((deg == 2) & ~straight)


def trace_boundaries(labels) -> Tuple[Mesh, TraceStats]:
    """Trace every region boundary of ``labels`` into a half-edge mesh.

    The walk starts at the image corner (0, 0).  Whenever a traversed edge has
    an untraced region on its right, the reversed edge is queued so that
    region is followed later.  Regions never reached that way (those sitting
    inside another one) are picked up by scanning for components whose outer
    boundary has not been walked.  Face ids follow discovery order; each face
    carries its label and pixel count.  Collinear unit steps are merged, so
    vertices appear only where the boundary turns or branches.
    """
    lab = as_labels(labels)
    h, w = lab.shape
    comp = label_components(lab)
    ncomp = int(comp.max()) + 1
    sizes = np.bincount(comp.ravel(), minlength=ncomp)
    comp_label = np.zeros(ncomp, dtype=np.int64)
    comp_label[comp.ravel()] = lab.ravel()
    first = np.full(ncomp, -1, dtype=np.int64)
    flat = comp.ravel()
    first[flat[::-1]] = np.arange(h * w)[::-1]

    W1 = w + 1
    Wp = w + 2
    P = np.pad(comp, 1, constant_values=-1).ravel().tolist()
    vert = vertex_mask(comp).ravel().tolist()
    visited = bytearray((h + 1) * W1 * 4)
    comp_face = [-1] * ncomp
    loops: List[Tuple[int, List[Tuple[int, int]]]] = []
    queue: deque = deque()

    def window(x, y):
        base = y * Wp + x
        return P[base], P[base + 1], P[base + Wp], P[base + Wp + 1]

    def walk(x, y, d):
        win = window(x, y)
        owner = win[_LEFT[d]]
        sx, sy, sd = x, y, d
        pts = []
        while True:
            visited[((y * W1) + x) * 4 + d] = 1
            r = win[_RIGHT[d]]
            nx, ny = x + DX[d], y + DY[d]
            rd = (d + 2) % 4
            if r >= 0 and not visited[((ny * W1) + nx) * 4 + rd]:
                queue.append((nx, ny, rd))
            win = window(nx, ny)
            d = next_direction(((win[0], win[1]), (win[2], win[3])), d, owner)
            x, y = nx, ny
            if vert[y * W1 + x]:
                pts.append((x, y))
            if x == sx and y == sy and d == sd:
                break
        if comp_face[owner] < 0:
            comp_face[owner] = n_faces[0]
            face_comp.append(owner)
            n_faces[0] += 1
        loops.append((comp_face[owner], pts))

    n_faces = [0]
    face_comp: List[int] = []

    def drain():
        while queue:
            x, y, d = queue.popleft()
            if not visited[((y * W1) + x) * 4 + d]:
                walk(x, y, d)

    queue.append((0, 0, E))
    drain()
    for c in range(ncomp):
        # the top edge of a component's first pixel lies on its outer boundary
        fy, fx = divmod(int(first[c]), w)
        if not visited[((fy * W1) + fx) * 4 + E]:
            queue.append((fx, fy, E))
            drain()

    mesh = Mesh(w, h)
    ids = {}
    he_of = {}
    for f, pts in loops:
        vs = []
        for p in pts:
            v = ids.get(p)
            if v is None:
                v = ids[p] = mesh.add_vertex(*p)
            vs.append(v)
        for u, v in zip(vs, vs[1:] + vs[:1]):
            g = he_of.get((v, u))
            if g is None:
                g = mesh.add_edge(u, v)
                he_of[(v, u)] = g ^ 1
            else:
                g ^= 1
            he_of[(u, v)] = g
            mesh.face[g] = f
    mesh.faces = [Face(label=int(comp_label[c]), pixel_count=int(sizes[c])) for c in face_comp]
    mesh.link_by_rotation()
    mesh.assign_faces_from_cycles()

    stats = TraceStats(
        boundary_pixel_count=boundary_pixel_count(lab),
        faces_found=len(face_comp),
        components_added=len(face_comp) - len(np.unique(lab)),
        loops_traced=len(loops),
    )
    return mesh, stats


def repaired_labels(labels) -> np.ndarray:
    """The label map a traced mesh reproduces: one id per 4-connected
    component, numbered in trace discovery order."""
    from .render import mesh_to_labels

    mesh, _ = trace_boundaries(labels)
    return mesh_to_labels(mesh)


def _left_pixel(mesh: Mesh, h: int) -> Tuple[int, int]:
    u, v = mesh.origin[h], mesh.dest(h)
    x, y = mesh.vx[u], mesh.vy[u]
    dx, dy = mesh.vx[v] - x, mesh.vy[v] - y
    if dy == 0:
        return (x, y) if dx > 0 else (x - 1, y - 1)
    return (x - 1, y) if dy > 0 else (x, y - 1)


def verify_areas(mesh: Mesh, labels) -> List[Tuple[int, int, int]]:
    """Faces whose traced outer boundary encloses more area than their pixels.

    Returns ``(face, expected_area, traced_area)`` for each mismatch, where
    the expected area is the pixel count of the face's 4-connected component
    in ``labels`` and the traced area is the shoelace area of its outer cycle.
    A mismatch means the face surrounds other faces.
    """
    comp = label_components(labels)
    sizes = np.bincount(comp.ravel())
    out = []
    for f in mesh.face_ids():
        # bridges are diagonal; any axis-aligned edge names a pixel of the face
        h = next((g for g in mesh.cycle(mesh.faces[f].outer)
                  if mesh.vx[mesh.origin[g]] == mesh.vx[mesh.dest(g)]
                  or mesh.vy[mesh.origin[g]] == mesh.vy[mesh.dest(g)]), mesh.faces[f].outer)
        x, y = _left_pixel(mesh, h)
        expected = int(sizes[comp[y, x]])
        traced = mesh.outer_area2(f) // 2
        if traced != expected:
            out.append((f, expected, traced))
    return out


# ------------------------------------------------------------ enclosures
def _point_in_face2(mesh: Mesh, f: int, mx2: int, my2: int) -> bool:
    """Crossing test for a point given in doubled coordinates; the point must
    not lie on the face boundary."""
    inside = False
    for c in mesh.face_cycles(f):
        for g in mesh.cycle(c):
            a, b = mesh.origin[g], mesh.dest(g)
            ax, ay = 2 * mesh.vx[a], 2 * mesh.vy[a]
            bx, by = 2 * mesh.vx[b], 2 * mesh.vy[b]
            if (ay > my2) != (by > my2):
                # x of the crossing compared exactly: mx2 < ax + (my2-ay)(bx-ax)/(by-ay)
                lhs = (mx2 - ax) * (by - ay)
                rhs = (my2 - ay) * (bx - ax)
                if (lhs < rhs) if by > ay else (lhs > rhs):
                    inside = not inside
    return inside


def _face_segments(mesh: Mesh, f: int):
    segs = []
    seen = set()
    for g in mesh.face_halfedges(f):
        e = g >> 1
        if e in seen:
            continue
        seen.add(e)
        segs.append((mesh.point(mesh.origin[g]), mesh.point(mesh.dest(g))))
    return segs


def _angles_ok(pv: Tuple[int, int], nbrs, other: Tuple[int, int], min_angle: float) -> bool:
    return all(angle_between(pv, other, q) > min_angle for q in nbrs)


def _ring_points(mesh: Mesh, f: int, members: set, with_edges: bool):
    """Anchor candidates on the cycles of ``f`` whose lattice points are in
    ``members``: ``(point, vertex or -1, half-edge, neighbour points)``.
    Points inside an edge are included with ``with_edges``."""
    out = {}
    for c in mesh.face_cycles(f):
        for g in mesh.cycle(c):
            u, v = mesh.origin[g], mesh.dest(g)
            pu, pv = mesh.point(u), mesh.point(v)
            if pu in members and pu not in out:
                nb = [mesh.point(mesh.dest(x)) for x in mesh.outgoing(u)]
                out[pu] = (pu, u, g, nb)
            if not with_edges:
                continue
            dx, dy = pv[0] - pu[0], pv[1] - pu[1]
            n = math.gcd(abs(dx), abs(dy))
            for i in range(1, n):
                q = (pu[0] + i * dx // n, pu[1] + i * dy // n)
                if q in members and q not in out:
                    out[q] = (q, -1, g, [pu, pv])
    return list(out.values())


def _edge_key(mesh: Mesh, g: int):
    return (mesh.point(mesh.origin[g]), mesh.point(mesh.dest(g)))


def _wedge_ok(mesh: Mesh, f: int, anchor, target: Tuple[int, int]) -> bool:
    p, v, g, _ = anchor
    d = (target[0] - p[0], target[1] - p[1])
    if v >= 0:
        try:
            mesh.corner_halfedge(v, f, d)
        except ValueError:
            return False
        return True
    # inside edge g, whose left side is f: the segment must leave to the left
    a, b = mesh.point(mesh.origin[g]), mesh.point(mesh.dest(g))
    return (b[0] - a[0]) * d[1] - (b[1] - a[1]) * d[0] > 0


def _find_bridge(mesh: Mesh, f: int, outer: set, hole: set, min_angle: float,
                 first: Optional[Tuple[Tuple[int, int], Tuple[int, int]]] = None):
    """Closest admissible (outer anchor, hole anchor) pair for face ``f``.

    Preference order: ring vertices with angles above ``min_angle``, then
    also lattice points inside ring edges, then ring vertices without the
    angle condition.  Within each tier the ends of ``first`` are avoided when
    possible.
    """
    segs = _face_segments(mesh, f)
    for use_angle, with_edges in ((True, False), (True, True), (False, False)):
        ro = _ring_points(mesh, f, outer, with_edges)
        rh = _ring_points(mesh, f, hole, with_edges)
        cands = sorted(((po[0] - ph[0]) ** 2 + (po[1] - ph[1]) ** 2, po, ph, i, j)
                       for i, (po, *_) in enumerate(ro) for j, (ph, *_) in enumerate(rh)
                       if first is None or (po, ph) != first)
        for shared in ((False, True) if first else (False,)):
            for _, po, ph, i, j in cands:
                if first is not None and (po == first[0] or ph == first[1]) != shared:
                    continue
                if use_angle and not (_angles_ok(po, ro[i][3], ph, min_angle)
                                      and _angles_ok(ph, rh[j][3], po, min_angle)):
                    continue
                if not (_wedge_ok(mesh, f, ro[i], ph) and _wedge_ok(mesh, f, rh[j], po)):
                    continue
                # an anchor inside an edge touches that edge by construction
                host = {_edge_key(mesh, a[2]) for a in (ro[i], rh[j]) if a[1] < 0}
                if any(segments_properly_intersect(po, ph, s0, s1) for s0, s1 in segs
                       if not host or (s0, s1) not in host):
                    continue
                if not _point_in_face2(mesh, f, po[0] + ph[0], po[1] + ph[1]):
                    continue
                return ro[i], rh[j], use_angle
    return None


def _anchor_vertex(mesh: Mesh, anchor) -> int:
    p, v, g, _ = anchor
    return v if v >= 0 else mesh.split_edge(g, *p)


def _lattice_points(mesh: Mesh, c: int) -> set:
    pts = set()
    for g in mesh.cycle(c):
        pu, pv = mesh.point(mesh.origin[g]), mesh.point(mesh.dest(g))
        dx, dy = pv[0] - pu[0], pv[1] - pu[1]
        n = math.gcd(abs(dx), abs(dy))
        pts.update((pu[0] + i * dx // n, pu[1] + i * dy // n) for i in range(n))
    return pts


def split_enclosed(mesh: Mesh, min_angle: float = 30.0) -> Tuple[Mesh, List[EnclosureSplit]]:
    """Cut every face that surrounds others into two simple polygons.

    For each hole of a face, edge D1 joins the closest pair of (outer vertex,
    hole vertex) and D2 the closest remaining pair, both chosen so that they
    cross no edge, run inside the face and, whenever possible, meet incident
    edges at more than ``min_angle`` degrees.  D2 avoids the endpoints of D1
    unless sharing one is the only way to respect the angle.  The two resulting faces share
    the parent's label and intensities.  Faces are processed in id order,
    which puts enclosing faces before the faces they enclose.  The mesh is
    modified in place and returned.
    """
    splits: List[EnclosureSplit] = []
    work = [f for f in mesh.face_ids() if mesh.faces[f].holes]
    while work:
        f = work.pop(0)
        rec = mesh.faces[f]
        if not rec.holes:
            continue
        ring = rec.holes[0]
        inner_face = mesh.face[ring ^ 1]
        outer_pts = _lattice_points(mesh, rec.outer)
        hole_pts = _lattice_points(mesh, ring)
        first = _find_bridge(mesh, f, outer_pts, hole_pts, min_angle)
        if first is None:
            raise RuntimeError(f"no admissible bridge from face {f} to its hole")
        o1 = _anchor_vertex(mesh, first[0])
        h1 = _anchor_vertex(mesh, first[1])
        ok1 = first[2]
        mesh.insert_edge(o1, h1, f)
        second = _find_bridge(mesh, f, outer_pts, hole_pts, min_angle, first=(mesh.point(o1), mesh.point(h1)))
        if second is None:
            raise RuntimeError(f"no second bridge from face {f} to its hole")
        o2 = _anchor_vertex(mesh, second[0])
        h2 = _anchor_vertex(mesh, second[1])
        ok2 = second[2]
        _, new = mesh.insert_edge(o2, h2, f)
        # remaining holes go to whichever half contains them
        for c in list(mesh.faces[f].holes):
            pts = mesh.cycle_points(c)
            boundary = set(mesh.cycle_points(mesh.faces[new].outer))
            probe = next((p for p in pts if p not in boundary), None)
            if probe is not None and _point_in_face2(mesh, new, 2 * probe[0], 2 * probe[1]):
                mesh.faces[f].holes.remove(c)
                mesh.faces[new].holes.append(c)
                for g in mesh.cycle(c):
                    mesh.face[g] = new
        splits.append(EnclosureSplit(
            outer_face=f, inner_face=inner_face,
            edge_d1=(mesh.point(o1), mesh.point(h1)), edge_d2=(mesh.point(o2), mesh.point(h2)),
            new_face=new, angle_ok=ok1 and ok2,
        ))
        for g in (f, new):
            if mesh.faces[g].holes:
                work.insert(0, g)
    return mesh, splits


def attach_intensities(mesh: Mesh, image) -> Mesh:
    """Store each face's mean colour and mean luma, computed over the pixels
    whose centres it contains.  Faces without pixel centres keep ``None``."""
    from .raster_io import GrayImage
    from .render import mesh_to_labels

    img = image if isinstance(image, GrayImage) else GrayImage(getattr(image, "samples", image))
    if (img.height, img.width) != (mesh.height, mesh.width):
        raise ValueError("image and label map dimensions differ")
    ids = mesh_to_labels(mesh).ravel()
    n = len(mesh.faces)
    cnt = np.bincount(ids, minlength=n)
    sums = np.stack([np.bincount(ids, weights=img.samples[:, :, k].ravel(), minlength=n)
                     for k in range(img.channels)], axis=1)
    lsum = np.bincount(ids, weights=img.luma.ravel(), minlength=n)
    for f in mesh.face_ids():
        if cnt[f]:
            mesh.faces[f].mean = sums[f] / cnt[f]
            mesh.faces[f].luma = float(lsum[f] / cnt[f])
    return mesh
