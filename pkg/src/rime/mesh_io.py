"""OFF, JSON and SVG export of meshes (and the matching readers)."""

from __future__ import annotations

import json
import os
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .mesh import Face, Mesh
from .render import _as_fraction

PathLike = Union[str, os.PathLike]


def face_polygons(mesh: Mesh) -> Tuple[List[Tuple[int, int]], List[Tuple[int, List[int]]]]:
    """Compact vertex list and per-face vertex index lists.

    Faces come in id order, each starting at its smallest vertex id after
    renumbering.  Vertices are numbered by first appearance while walking the
    faces, so the output depends only on the mesh geometry and face ids.
    """
    index: Dict[int, int] = {}
    points: List[Tuple[int, int]] = []
    faces = []
    for f in mesh.face_ids():
        vs = mesh.face_vertices(f)
        # start each face at its lexicographically smallest point
        k = min(range(len(vs)), key=lambda i: mesh.point(vs[i]))
        vs = vs[k:] + vs[:k]
        ids = []
        for v in vs:
            if v not in index:
                index[v] = len(points)
                points.append(mesh.point(v))
            ids.append(index[v])
        faces.append((f, ids))
    return points, faces


def off_text(mesh: Mesh) -> str:
    points, faces = face_polygons(mesh)
    lines = ["OFF", f"{len(points)} {len(faces)} {mesh.n_edges}"]
    lines += [f"{x} {y} 0" for x, y in points]
    lines += [" ".join(str(i) for i in [len(ids)] + ids) for _, ids in faces]
    return "\n".join(lines) + "\n"


def export_off(mesh: Mesh, path: PathLike) -> None:
    """Write the interior faces as an OFF file (``z = 0``)."""
    with open(path, "w", newline="\n") as fh:
        fh.write(off_text(mesh))


def read_off(path: PathLike) -> Tuple[np.ndarray, List[List[int]]]:
    """Parse an OFF file into vertex coordinates and face index lists."""
    with open(path) as fh:
        toks = [ln.split("#", 1)[0].split() for ln in fh]
    toks = [t for t in toks if t]
    if not toks or toks[0][0] != "OFF":
        raise ValueError("missing OFF header")
    head = toks[0][1:] or toks[1]
    rest = toks[1:] if toks[0][1:] else toks[2:]
    nv, nf = int(head[0]), int(head[1])
    verts = np.array([[float(c) for c in t[:3]] for t in rest[:nv]]).reshape(-1, 3)
    faces = []
    for t in rest[nv:nv + nf]:
        n = int(t[0])
        if len(t) < n + 1:
            raise ValueError("short face line")
        faces.append([int(c) for c in t[1:n + 1]])
    if len(verts) != nv or len(faces) != nf:
        raise ValueError("counts do not match the header")
    return verts, faces


def _color_list(c) -> List[float]:
    return [float(v) for v in np.atleast_1d(np.asarray(c, dtype=float))]


def mesh_document(mesh: Mesh, colors: Optional[Dict[int, Sequence[float]]] = None) -> dict:
    points, faces = face_polygons(mesh)
    out = []
    for f, ids in faces:
        rec = mesh.faces[f]
        col = colors.get(f) if colors else None
        avg = rec.mean if rec.mean is not None else col
        out.append({
            "vertices": ids,
            "label": int(rec.label),
            "color": None if col is None else _color_list(col),
            "avg_intensity": None if avg is None else _color_list(avg),
            "luma": None if rec.luma is None else float(rec.luma),
            "area": mesh.area2(f) / 2,
        })
    return {"width": mesh.width, "height": mesh.height, "vertices": [list(p) for p in points], "faces": out}


def export_json(mesh: Mesh, colors: Optional[Dict[int, Sequence[float]]], path: PathLike) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(mesh_document(mesh, colors), fh, indent=1)
        fh.write("\n")


def mesh_from_document(doc: dict) -> Tuple[Mesh, Dict[int, np.ndarray]]:
    pts = [tuple(int(c) for c in p) for p in doc["vertices"]]
    polys = [[pts[i] for i in fd["vertices"]] for fd in doc["faces"]]
    recs = []
    colors = {}
    for f, fd in enumerate(doc["faces"]):
        avg = fd.get("avg_intensity")
        recs.append(Face(label=fd.get("label", f), mean=None if avg is None else np.array(avg),
                         luma=fd.get("luma")))
        if fd.get("color") is not None:
            colors[f] = np.array(fd["color"], dtype=float)
    mesh = Mesh.from_polygons(int(doc["width"]), int(doc["height"]), polys, recs)
    return mesh, colors


def load_json(path: PathLike) -> Tuple[Mesh, Dict[int, np.ndarray]]:
    """Read a mesh written by :func:`export_json`; face ids become 0..F-1."""
    with open(path) as fh:
        return mesh_from_document(json.load(fh))


def _hex(c) -> str:
    v = _color_list(c)
    if len(v) == 1:
        v = v * 3
    r, g, b = (int(min(max(round(x), 0), 255)) for x in v[:3])
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_text(mesh: Mesh, colors: Dict[int, Sequence[float]], scale=1, stroke: Optional[str] = None) -> str:
    s = _as_fraction(scale)
    w, h = s * mesh.width, s * mesh.height
    sf = float(s)
    points, faces = face_polygons(mesh)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{float(w):g}" height="{float(h):g}" '
        f'viewBox="0 0 {float(w):g} {float(h):g}">',
        f'<g transform="scale({sf:g})"' + (f' stroke="{stroke}" stroke-width="{1 / sf:g}"' if stroke else "") + ">",
    ]
    for f, ids in faces:
        pts = " ".join(f"{points[i][0]},{points[i][1]}" for i in ids)
        fill = _hex(colors[f]) if f in colors else "#000000"
        lines.append(f'<polygon points="{pts}" fill="{fill}"/>')
    lines += ["</g>", "</svg>"]
    return "\n".join(lines) + "\n"


def export_svg(mesh: Mesh, colors: Dict[int, Sequence[float]], scale, path: PathLike,
               stroke: Optional[str] = None) -> None:
    """One ``<polygon>`` per face inside a ``scale(s)`` group."""
    with open(path, "w", newline="\n") as fh:
        fh.write(svg_text(mesh, colors, scale, stroke))
