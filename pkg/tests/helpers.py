"""Small helpers shared by the test modules."""

import numpy as np

from rime.mesh import Mesh
from oracles import crossing_pairs, incident_angles


def face_polygons(mesh: Mesh):
    return {f: mesh.cycle_points(mesh.faces[f].outer) for f in mesh.face_ids()}


def planarity_failures(mesh: Mesh) -> int:
    return len(crossing_pairs(mesh.edge_segments()))


def min_angle(mesh: Mesh) -> float:
    pts = {v: mesh.point(v) for v in mesh.vertices()}
    edges = [(mesh.origin[h], mesh.origin[h ^ 1]) for h in mesh.edges()]
    angles = incident_angles(pts, edges)
    return min(angles.values()) if angles else 180.0


def square_mesh(w=1, h=1) -> Mesh:
    return Mesh.from_polygons(w, h, [[(0, 0), (w, 0), (w, h), (0, h)]])


def two_triangles(n=4) -> Mesh:
    return Mesh.from_polygons(n, n, [[(0, 0), (n, 0), (n, n)], [(0, 0), (n, n), (0, n)]])


def oriented(poly):
    """Polygon with positive shoelace area (reversed if needed)."""
    a = sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]))
    return list(poly) if a > 0 else list(reversed(poly))


def polygon_mesh(width, height, polys, lumas):
    from rime.mesh import Face

    faces = [Face(label=i, luma=float(l), mean=np.array([float(l)])) for i, l in enumerate(lumas)]
    return Mesh.from_polygons(width, height, [oriented(p) for p in polys], faces)


def stage1(labels, image=None):
    """Stage-1 mesh with face intensities; ``image`` defaults to the labels."""
    from rime.trace import attach_intensities, split_enclosed, trace_boundaries

    lab = np.asarray(labels)
    m, _ = trace_boundaries(lab)
    attach_intensities(m, lab.astype(float) if image is None else image)
    m, _ = split_enclosed(m)
    return m


def chain_between(mesh, f, g):
    from rime.straighten import extract_chains

    return [c for c in extract_chains(mesh) if {c.left, c.right} == {f, g}]


def vertex_points(mesh):
    return {mesh.point(v) for v in mesh.vertices()}
