"""Half-edge planar subdivision of the image rectangle.

Vertices sit on the integer pixel-corner lattice: pixel ``(i, j)`` covers the
unit square ``[i, i+1] x [j, j+1]`` with x to the right and y downwards.
Half-edges are allocated in twin pairs, so ``twin(h) == h ^ 1``.  Every
half-edge has a face on its left; interior cycles have positive shoelace
area in the (x, y) frame, and the unbounded outside is the face ``OUTSIDE``.

Removed vertices and half-edges are tombstoned (``origin == -1``) rather than
compacted, so ids held by callers stay valid across edits.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import in_sector, polygon_area2

OUTSIDE = -1


@dataclass
class Face:
    """Bookkeeping for one interior face.

    ``mean`` is the per-channel average intensity and ``luma`` the scalar
    average used by the straightening and merging thresholds; both come from
    the pixel-based superpixel and are carried through later edits.
    """

    label: int = -1
    outer: int = -1
    holes: List[int] = field(default_factory=list)
    pixel_count: int = 0
    mean: Optional[np.ndarray] = None
    luma: Optional[float] = None
    alive: bool = True


class Mesh:
    def __init__(self, width: int, height: int):
        if width < 1 or height < 1:
            raise ValueError("mesh needs a non-empty rectangle")
        self.width = int(width)
        self.height = int(height)
        self.vx: List[int] = []
        self.vy: List[int] = []
        self.v_he: List[int] = []
        self.origin: List[int] = []
        self.next: List[int] = []
        self.prev: List[int] = []
        self.face: List[int] = []
        # per edge pair: lattice points the edge replaced, ordered from origin(2e)
        self.absorbed: List[List[Tuple[int, int]]] = []
        self.faces: List[Face] = []
        self.outside_he = -1

    # ------------------------------------------------------------------ basics
    def add_vertex(self, x: int, y: int) -> int:
        self.vx.append(int(x))
        self.vy.append(int(y))
        self.v_he.append(-1)
        return len(self.vx) - 1

    def point(self, v: int) -> Tuple[int, int]:
        return (self.vx[v], self.vy[v])

    def add_edge(self, u: int, v: int) -> int:
        """Allocate the half-edge pair ``u->v`` / ``v->u`` (unlinked)."""
        h = len(self.origin)
        self.origin += [u, v]
        self.next += [-1, -1]
        self.prev += [-1, -1]
        self.face += [OUTSIDE, OUTSIDE]
        self.absorbed.append([])
        if self.v_he[u] < 0:
            self.v_he[u] = h
        if self.v_he[v] < 0:
            self.v_he[v] = h + 1
        return h

    @staticmethod
    def twin(h: int) -> int:
        return h ^ 1

    def dest(self, h: int) -> int:
        return self.origin[h ^ 1]

    def alive_he(self, h: int) -> bool:
        return self.origin[h] >= 0

    def vertex_alive(self, v: int) -> bool:
        return self.v_he[v] >= 0

    def vertices(self) -> List[int]:
        return [v for v in range(len(self.vx)) if self.v_he[v] >= 0]

    def edges(self) -> List[int]:
        """Even half-edge id of every live edge."""
        return [h for h in range(0, len(self.origin), 2) if self.origin[h] >= 0]

    def face_ids(self) -> List[int]:
        return [f for f, rec in enumerate(self.faces) if rec.alive]

    @property
    def n_faces(self) -> int:
        return sum(1 for rec in self.faces if rec.alive)

    @property
    def n_edges(self) -> int:
        return sum(1 for h in range(0, len(self.origin), 2) if self.origin[h] >= 0)

    @property
    def n_vertices(self) -> int:
        return sum(1 for h in self.v_he if h >= 0)

    def cycle(self, h: int) -> Iterator[int]:
        start = h
        while True:
            yield h
            h = self.next[h]
            if h == start:
                return

    def outgoing(self, v: int) -> Iterator[int]:
        start = h = self.v_he[v]
        while True:
            yield h
            h = self.next[h ^ 1]
            if h == start:
                return

    def degree(self, v: int) -> int:
        return sum(1 for _ in self.outgoing(v))

    def is_corner(self, v: int) -> bool:
        return self.vx[v] in (0, self.width) and self.vy[v] in (0, self.height)

    def on_border(self, v: int) -> bool:
        return self.vx[v] in (0, self.width) or self.vy[v] in (0, self.height)

    def is_border_edge(self, h: int) -> bool:
        return self.face[h] == OUTSIDE or self.face[h ^ 1] == OUTSIDE

    def face_cycles(self, f: int) -> List[int]:
        rec = self.faces[f]
        return [rec.outer] + list(rec.holes)

    def cycle_points(self, h: int) -> List[Tuple[int, int]]:
        return [(self.vx[self.origin[g]], self.vy[self.origin[g]]) for g in self.cycle(h)]

    def face_halfedges(self, f: int) -> List[int]:
        out: List[int] = []
        for h in self.face_cycles(f):
            out.extend(self.cycle(h))
        return out

    def face_vertices(self, f: int) -> List[int]:
        """Vertex ids of the outer cycle, in boundary order."""
        return [self.origin[g] for g in self.cycle(self.faces[f].outer)]

    def area2(self, f: int) -> int:
        """Twice the net area of face ``f`` (outer cycle minus holes); exact."""
        return sum(polygon_area2(self.cycle_points(h)) for h in self.face_cycles(f))

    def outer_area2(self, f: int) -> int:
        return polygon_area2(self.cycle_points(self.faces[f].outer))

    def area(self, f: int) -> float:
        return self.area2(f) / 2.0

    def perimeter(self, f: int) -> float:
        total = 0.0
        for h in self.face_halfedges(f):
            a, b = self.origin[h], self.dest(h)
            total += math.hypot(self.vx[b] - self.vx[a], self.vy[b] - self.vy[a])
        return total

    def neighbors(self, f: int) -> List[int]:
        return sorted({self.face[g ^ 1] for g in self.face_halfedges(f)} - {OUTSIDE, f})

    # ------------------------------------------------------------ construction
    def link_by_rotation(self) -> None:
        """Set ``next``/``prev`` of every live half-edge from the angular order
        of edges around each vertex (the face on the left turns as tightly as
        possible)."""
        around: Dict[int, List[Tuple[float, int]]] = defaultdict(list)
        for h in range(len(self.origin)):
            u = self.origin[h]
            if u < 0:
                continue
            v = self.origin[h ^ 1]
            around[u].append((math.atan2(self.vy[v] - self.vy[u], self.vx[v] - self.vx[u]), h))
        for u, lst in around.items():
            lst.sort()
            n = len(lst)
            # incoming g = twin(out_i) continues with the outgoing edge just
            # clockwise of out_i
            for i in range(n):
                out_i = lst[i][1]
                cw = lst[i - 1][1]
                g = out_i ^ 1
                self.next[g] = cw
                self.prev[cw] = g
            self.v_he[u] = lst[0][1]

    def assign_faces_from_cycles(self) -> None:
        """Rebuild the ``faces`` cycle references from ``face`` labels.

        Each cycle's half-edges must already carry one face id.  Positive
        cycles become the face's outer boundary, negative ones its holes.
        Cycles left at ``OUTSIDE`` form the unbounded face.
        """
        for rec in self.faces:
            rec.outer = -1
            rec.holes = []
        seen = bytearray(len(self.origin))
        for h in range(len(self.origin)):
            if self.origin[h] < 0 or seen[h]:
                continue
            cyc = list(self.cycle(h))
            fid = self.face[h]
            for g in cyc:
                seen[g] = 1
                if self.face[g] != fid:
                    raise ValueError("cycle with mixed face labels")
            if fid == OUTSIDE:
                self.outside_he = h
                continue
            a2 = polygon_area2(self.cycle_points(h))
            rec = self.faces[fid]
            if a2 > 0:
                if rec.outer >= 0:
                    raise ValueError(f"face {fid} has two outer cycles")
                rec.outer = h
            else:
                rec.holes.append(h)
        for f, rec in enumerate(self.faces):
            if rec.alive and rec.outer < 0:
                raise ValueError(f"face {f} has no outer cycle")

    @classmethod
    def from_polygons(cls, width: int, height: int, polygons: Sequence[Sequence[Tuple[int, int]]],
                      faces: Optional[Sequence[Face]] = None) -> "Mesh":
        """Build a mesh from positively oriented face polygons that tile the
        rectangle.  Edges are matched by their endpoint pairs."""
        mesh = cls(width, height)
        index: Dict[Tuple[int, int], int] = {}
        he_of: Dict[Tuple[int, int], int] = {}
        used = set()

        def vid(p):
            p = (int(p[0]), int(p[1]))
            if p not in index:
                index[p] = mesh.add_vertex(*p)
            return index[p]

        for f, poly in enumerate(polygons):
            ids = [vid(p) for p in poly]
            if polygon_area2([mesh.point(v) for v in ids]) <= 0:
                raise ValueError(f"polygon {f} is not positively oriented")
            for i, u in enumerate(ids):
                v = ids[(i + 1) % len(ids)]
                if (u, v) in used:
                    raise ValueError("edge used twice in the same direction")
                used.add((u, v))
                if (v, u) in he_of:
                    h = he_of[(v, u)] ^ 1
                else:
                    h = mesh.add_edge(u, v)
                he_of[(u, v)] = h
                mesh.face[h] = f
        if faces is None:
            faces = [Face(label=f) for f in range(len(polygons))]
        mesh.faces = [Face(label=r.label, pixel_count=r.pixel_count, mean=r.mean, luma=r.luma) for r in faces]
        mesh.link_by_rotation()
        mesh.assign_faces_from_cycles()
        return mesh

    def copy(self) -> "Mesh":
        other = Mesh(self.width, self.height)
        other.vx = list(self.vx)
        other.vy = list(self.vy)
        other.v_he = list(self.v_he)
        other.origin = list(self.origin)
        other.next = list(self.next)
        other.prev = list(self.prev)
        other.face = list(self.face)
        other.absorbed = [list(a) for a in self.absorbed]
        other.faces = [Face(label=r.label, outer=r.outer, holes=list(r.holes), pixel_count=r.pixel_count,
                            mean=None if r.mean is None else np.array(r.mean), luma=r.luma, alive=r.alive)
                       for r in self.faces]
        other.outside_he = self.outside_he
        return other

    # ----------------------------------------------------------------- editing
    def _fix_refs(self, f: int, valid: int) -> None:
        if f == OUTSIDE:
            if self.origin[self.outside_he] < 0:
                self.outside_he = valid
            return
        rec = self.faces[f]
        if self.origin[rec.outer] < 0:
            rec.outer = valid
        rec.holes = [valid if self.origin[h] < 0 else h for h in rec.holes]

    def _path_points(self, hs: Sequence[int]) -> List[Tuple[int, int]]:
        """Original lattice points strictly between the ends of path ``hs``."""
        pts: List[Tuple[int, int]] = []
        for i, h in enumerate(hs):
            if i:
                v = self.origin[h]
                pts.append((self.vx[v], self.vy[v]))
            ab = self.absorbed[h >> 1]
            pts.extend(ab if not h & 1 else reversed(ab))
        return pts

    def path_points(self, hs: Sequence[int]) -> List[Tuple[int, int]]:
        return self._path_points(hs)

    def replace_path(self, hs: Sequence[int]) -> int:
        """Replace consecutive half-edges ``hs`` by one straight edge joining
        the path's ends.  Interior vertices must have degree 2 and are removed.
        Returns the surviving half-edge (``hs[0]``, now ending at the path end).
        """
        h0 = hs[0]
        if len(hs) == 1:
            return h0
        hl = hs[-1]
        a = self.origin[h0]
        b = self.dest(hl)
        if a == b:
            raise ValueError("cannot collapse a closed path")
        pts = self._path_points(hs)
        t0, tl = h0 ^ 1, hl ^ 1
        nxt = self.next[hl]
        prv_t = self.prev[tl]
        self.next[h0] = nxt
        self.prev[nxt] = h0
        self.origin[t0] = b
        self.next[prv_t] = t0
        self.prev[t0] = prv_t
        for h in hs[1:]:
            v = self.origin[h]
            self.v_he[v] = -1
            for g in (h, h ^ 1):
                self.origin[g] = -1
                self.next[g] = self.prev[g] = -1
            self.absorbed[h >> 1] = []
        self.v_he[a] = h0
        self.v_he[b] = t0
        self.absorbed[h0 >> 1] = pts if not h0 & 1 else pts[::-1]
        self._fix_refs(self.face[h0], h0)
        self._fix_refs(self.face[t0], t0)
        return h0

    def split_edge(self, h: int, x: int, y: int) -> int:
        """Put a new vertex at lattice point ``(x, y)`` strictly inside edge
        ``h``; ``h`` keeps its origin and now ends there.  Returns the vertex."""
        t = h ^ 1
        v = self.origin[t]
        w = self.add_vertex(x, y)
        k = self.add_edge(w, v)
        kt = k ^ 1
        n, p = self.next[h], self.prev[t]
        self.next[h], self.prev[k] = k, h
        self.next[k], self.prev[n] = n, k
        self.next[p], self.prev[kt] = kt, p
        self.next[kt], self.prev[t] = t, kt
        self.origin[t] = w
        self.face[k], self.face[kt] = self.face[h], self.face[t]
        self.v_he[w] = k
        if self.v_he[v] == t:
            self.v_he[v] = kt
        ab = self.absorbed[h >> 1] if not h & 1 else self.absorbed[h >> 1][::-1]
        if ab:
            i = ab.index((x, y))
            self.absorbed[h >> 1] = ab[:i] if not h & 1 else ab[:i][::-1]
            self.absorbed[k >> 1] = ab[i + 1:]
        return w

    def corner_halfedge(self, u: int, f: int, direction: Tuple[int, int]) -> int:
        """The half-edge leaving ``u`` on face ``f`` whose wedge contains ``direction``."""
        for g in self.outgoing(u):
            if self.face[g] != f:
                continue
            w = self.origin[self.prev[g]]
            out_dir = (self.vx[self.dest(g)] - self.vx[u], self.vy[self.dest(g)] - self.vy[u])
            back_dir = (self.vx[w] - self.vx[u], self.vy[w] - self.vy[u])
            if in_sector(out_dir, back_dir, direction):
                return g
        raise ValueError("direction does not enter the face at this vertex")

    def insert_edge(self, u: int, v: int, f: int) -> Tuple[int, Optional[int]]:
        """Insert the straight edge ``u-v`` through the interior of face ``f``.

        Joining two different boundary cycles of ``f`` fuses them; joining a
        cycle to itself splits the face and the part left of ``v->u`` becomes
        a new face inheriting ``f``'s attributes.  Returns the new half-edge
        ``u->v`` and the new face id (or None).
        """
        pu, pv = self.point(u), self.point(v)
        gu = self.corner_halfedge(u, f, (pv[0] - pu[0], pv[1] - pu[1]))
        gv = self.corner_halfedge(v, f, (pu[0] - pv[0], pu[1] - pv[1]))
        same_cycle = any(g == gv for g in self.cycle(gu))
        cycles_before = self.face_cycles(f)
        h = self.add_edge(u, v)
        t = h ^ 1
        pgu, pgv = self.prev[gu], self.prev[gv]
        self.next[pgu] = h
        self.prev[h] = pgu
        self.next[h] = gv
        self.prev[gv] = h
        self.next[pgv] = t
        self.prev[t] = pgv
        self.next[t] = gu
        self.prev[gu] = t
        self.face[h] = self.face[t] = f
        rec = self.faces[f]
        if not same_cycle:
            # the two cycles are now one; keep a single reference to it
            keep = [c for c in cycles_before if not any(g == h for g in self.cycle(c))]
            if polygon_area2(self.cycle_points(h)) > 0:
                rec.outer = h
                rec.holes = keep
            else:
                rec.holes = [c for c in keep if c != rec.outer] + [h]
            return h, None
        new = len(self.faces)
        self.faces.append(Face(label=rec.label, pixel_count=0,
                               mean=None if rec.mean is None else np.array(rec.mean), luma=rec.luma))
        for g in self.cycle(t):
            self.face[g] = new
        others = [c for c in cycles_before if self.face[c] == f and not any(g == h for g in self.cycle(c))]
        rec.outer = h
        rec.holes = others
        self.faces[new].outer = t
        return h, new

    def dissolve_path(self, hs: Sequence[int]) -> int:
        """Remove a run of edges separating face ``face[hs[0]]`` from the face on
        the other side, merging the latter into the former.  Returns the
        surviving face id."""
        f = self.face[hs[0]]
        g = self.face[hs[0] ^ 1]
        h0, hl = hs[0], hs[-1]
        t0, tl = h0 ^ 1, hl ^ 1
        p1, n1 = self.prev[h0], self.next[hl]
        p2, n2 = self.prev[tl], self.next[t0]
        a = self.origin[h0]
        b = self.dest(hl)
        if self.next[t0] == tl:
            # the run is the whole boundary of g, pinched onto f at a == b
            n2 = n1
        else:
            self.next[p2] = n1
            self.prev[n1] = p2
        self.next[p1] = n2
        self.prev[n2] = p1
        for i, h in enumerate(hs):
            if i:
                self.v_he[self.origin[h]] = -1
            for x in (h, h ^ 1):
                self.origin[x] = -1
                self.next[x] = self.prev[x] = -1
            self.absorbed[h >> 1] = []
        self.v_he[a] = n2
        self.v_he[b] = n1
        for x in self.cycle(n1):
            self.face[x] = f
        rf, rg = self.faces[f], self.faces[g]
        merged = set(self.cycle(n1))
        rf.outer = n1
        rf.holes = [c for c in rf.holes + rg.holes if self.origin[c] >= 0 and c not in merged]
        rg.alive = False
        rg.outer = -1
        rg.holes = []
        return f

    # -------------------------------------------------------------- inspection
    def edge_segments(self) -> np.ndarray:
        """Array ``(E, 4)`` of live edges as ``x0, y0, x1, y1``."""
        rows = [(self.vx[self.origin[h]], self.vy[self.origin[h]], self.vx[self.origin[h + 1]], self.vy[self.origin[h + 1]])
                for h in self.edges()]
        return np.array(rows, dtype=np.int64).reshape(-1, 4)

    def check(self) -> None:
        """Raise ``AssertionError`` if the half-edge structure is inconsistent."""
        n = len(self.origin)
        for h in range(n):
            if self.origin[h] < 0:
                continue
            assert self.origin[h ^ 1] >= 0, f"dead twin of {h}"
            assert self.next[h] >= 0 and self.origin[self.next[h]] >= 0, f"dangling next at {h}"
            assert self.prev[self.next[h]] == h, f"prev/next mismatch at {h}"
            assert self.origin[self.next[h]] == self.dest(h), f"next of {h} does not start at its end"
            assert self.face[self.next[h]] == self.face[h], f"face changes along cycle at {h}"
            assert self.v_he[self.origin[h]] >= 0, f"dead origin vertex at {h}"
            assert self.origin[h] != self.dest(h), f"loop edge {h}"
        for v, h in enumerate(self.v_he):
            if h >= 0:
                assert self.origin[h] == v, f"vertex {v} points to foreign half-edge"
        total = 0
        for f in self.face_ids():
            rec = self.faces[f]
            assert self.origin[rec.outer] >= 0 and self.face[rec.outer] == f
            assert self.outer_area2(f) > 0, f"face {f} outer cycle not positive"
            for c in rec.holes:
                assert self.face[c] == f
            total += self.area2(f)
        listed = set()
        for f in self.face_ids():
            for c in self.face_cycles(f):
                listed.update(self.cycle(c))
        for h in range(n):
            if self.origin[h] >= 0 and self.face[h] != OUTSIDE:
                assert h in listed, f"half-edge {h} not reachable from its face record"
        assert total == 2 * self.width * self.height, "face areas do not tile the rectangle"
