"""Stage 3: merge adjacent faces of nearly equal mean intensity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Set, Tuple

import numpy as np

from .geometry import cross
from .mesh import OUTSIDE, Mesh
from .straighten import ChainLog, RimeParams, extract_chains, straighten_chain


@dataclass
class MergeRecord:
    kept: int
    removed: int
    luma_kept: float
    luma_removed: float
    luma_merged: float
    area2_kept: int
    area2_removed: int


def shared_run(mesh: Mesh, f: int, g: int) -> Optional[List[int]]:
    """Half-edges of ``f`` bordering ``g`` if they form one contiguous run.

    Returns None when the border is split into several runs, covers all of a
    boundary cycle of ``f``, or when the two faces also touch at a vertex off
    the run.  Merging across such a border would leave a hole or a pinched
    polygon.
    """
    rf, rg = mesh.faces[f], mesh.faces[g]
    if rf.holes or rg.holes:
        return None
    cyc = list(mesh.cycle(rf.outer))
    n = len(cyc)
    mark = [mesh.face[h ^ 1] == g for h in cyc]
    if all(mark) or not any(mark):
        return None
    # start right after a non-shared edge
    s = next(i for i in range(n) if mark[i] and not mark[i - 1])
    run = []
    i = s
    while mark[i % n] and len(run) < n:
        run.append(cyc[i % n])
        i += 1
    if len(run) != sum(mark):
        return None
    for x, y in zip(run, run[1:]):
        if mesh.next[y ^ 1] != x ^ 1:
            return None
    run_vs = {mesh.origin[h] for h in run} | {mesh.dest(run[-1])}
    fv = {mesh.origin[h] for h in cyc}
    gv = {mesh.origin[h] for h in mesh.cycle(rg.outer)}
    if (fv & gv) != run_vs:
        return None
    return run


def _drop_collinear(mesh: Mesh, v: int) -> bool:
    if not mesh.vertex_alive(v) or mesh.degree(v) != 2 or mesh.is_corner(v):
        return False
    out = mesh.v_he[v]
    inc = mesh.prev[out]
    a, b = mesh.origin[inc], mesh.dest(out)
    pa, pv, pb = mesh.point(a), mesh.point(v), mesh.point(b)
    if a == b or cross(pa, pv, pb) != 0:
        return False
    if (pv[0] - pa[0]) * (pb[0] - pv[0]) + (pv[1] - pa[1]) * (pb[1] - pv[1]) <= 0:
        return False
    mesh.replace_path([inc, out])
    return True


def merge_adjacent(mesh: Mesh, params: RimeParams = RimeParams()) -> Tuple[Mesh, List[MergeRecord]]:
    """Merge neighbouring faces whose mean lumas differ by less than
    ``max_color_dif``, in place, until no pair qualifies.

    Pairs are visited in ``(smaller id, larger id)`` order and the smaller id
    survives.  Faces merge only across a single contiguous shared chain with
    no other contact, so every face stays a simple polygon.  The merged mean
    is weighted by polygon area.  Vertices left with two exactly collinear
    edges are removed afterwards.
    """
    log: List[MergeRecord] = []
    while True:
        pairs = set()
        for h in mesh.edges():
            f, g = mesh.face[h], mesh.face[h ^ 1]
            if f != OUTSIDE and g != OUTSIDE and f != g:
                pairs.add((min(f, g), max(f, g)))
        merged = False
        for f, g in sorted(pairs):
            rf, rg = mesh.faces[f], mesh.faces[g]
            if not (rf.alive and rg.alive) or rf.luma is None or rg.luma is None:
                continue
            if not abs(rf.luma - rg.luma) < params.max_color_dif:
                continue
            run = shared_run(mesh, f, g)
            if run is None:
                continue
            a2f, a2g = mesh.area2(f), mesh.area2(g)
            wf, wg = a2f / (a2f + a2g), a2g / (a2f + a2g)
            luma = wf * rf.luma + wg * rg.luma
            mean = None
            if rf.mean is not None and rg.mean is not None:
                mean = wf * np.asarray(rf.mean) + wg * np.asarray(rg.mean)
            ends = (mesh.origin[run[0]], mesh.dest(run[-1]))
            log.append(MergeRecord(f, g, rf.luma, rg.luma, luma, a2f, a2g))
            mesh.dissolve_path(run)
            rf.luma, rf.mean = luma, mean
            rf.pixel_count += rg.pixel_count
            for v in ends:
                _drop_collinear(mesh, v)
            merged = True
        if not merged:
            return mesh, log


def restraighten_affected(mesh: Mesh, params: RimeParams = RimeParams(),
                          changed: Optional[Iterable[int]] = None) -> Tuple[Mesh, List[ChainLog]]:
    """One straightening pass over the chains that touch a face in ``changed``
    (the faces that survived a merge)."""
    log: List[ChainLog] = []
    if not changed:
        return mesh, log
    faces: Set[int] = set(changed)
    for chain in extract_chains(mesh):
        if chain.interior and (chain.left in faces or chain.right in faces):
            straighten_chain(mesh, chain, params, log)
    return mesh, log
