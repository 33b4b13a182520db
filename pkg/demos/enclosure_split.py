"""Faces with holes, and how tracing cuts them.

A face that surrounds another one would be a polygon with a hole.  Stage 1
cuts every such face with two bridges between its outer ring and the hole,
so each face of the mesh is a simple polygon.  The nested fixture needs
several cuts; the printout shows each bridge, the smallest angle it makes
with the edges around it, and that the areas still add up to the image.

    python3 demos/enclosure_split.py
"""

import math

import numpy as np

from rime import split_enclosed, trace_boundaries, verify_areas
from rime.synthetic import double_hole_map, nested_map

for name, lab in (("nested", nested_map(11)), ("double hole", double_hole_map())):
    print(f"--- {name} ({lab.shape[1]}x{lab.shape[0]})")
    print("\n".join("    " + "".join(str(v) for v in row) for row in lab))
    mesh, stats = trace_boundaries(lab)
    print(f"  traced faces: {len(mesh.face_ids())}, faces failing the area check (face, area, enclosed area): {verify_areas(mesh, lab)}")
    mesh, splits = split_enclosed(mesh, 30.0)
    for s in splits:
        print(f"  face {s.outer_face} around face {s.inner_face}: "
              f"D1 {s.edge_d1}  D2 {s.edge_d2}  -> new face {s.new_face} (angles ok: {s.angle_ok})")

    # smallest angle between edges meeting at a vertex, from the coordinates
    worst = 180.0
    for v in mesh.vertices():
        px, py = mesh.point(v)
        dirs = [(mesh.vx[mesh.dest(h)] - px, mesh.vy[mesh.dest(h)] - py) for h in mesh.outgoing(v)]
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                (ax, ay), (bx, by) = dirs[i], dirs[j]
                c = (ax * bx + ay * by) / math.hypot(ax, ay) / math.hypot(bx, by)
                worst = min(worst, math.degrees(math.acos(max(-1.0, min(1.0, c)))))
    area2 = sum(mesh.area2(f) for f in mesh.face_ids())
    print(f"  faces after split: {len(mesh.face_ids())}, smallest angle {worst:.1f} deg, "
          f"total area {area2 / 2:g} = W*H {lab.size}")
