import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from PIL import Image, ImageDraw

from rime.mesh_io import (
    export_json, export_off, export_svg, face_polygons, load_json, off_text, read_off, svg_text,
)
from rime.pipeline import convert
from rime.render import rasterize
from fixtures import intensity_for, random_map
from helpers import square_mesh
from oracles import parse_off_strict


def test_unit_square_off():
    text = off_text(square_mesh(1, 1))
    assert text == "OFF\n4 1 4\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"


def test_off_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for i in range(15):
        lab = random_map(rng, 32)
        res = convert(lab, intensity_for(lab, rng))
        p = tmp_path / f"m{i}.off"
        export_off(res.mesh, p)
        nv, nf, faces = parse_off_strict(p.read_text())
        verts, faces2 = read_off(p)
        assert (len(verts), len(faces2)) == (nv, nf) == (res.mesh.n_vertices, res.mesh.n_faces)
        assert faces2 == faces
        # counterclockwise with y up means positive shoelace in these coordinates
        for f in faces:
            xy = verts[f, :2]
            a = np.sum(xy[:, 0] * np.roll(xy[:, 1], -1) - np.roll(xy[:, 0], -1) * xy[:, 1])
            assert a > 0
        assert sum(
            0.5 * np.sum(verts[f, 0] * np.roll(verts[f, 1], -1) - np.roll(verts[f, 0], -1) * verts[f, 1])
            for f in faces) == lab.size


def test_read_off_rejects_bad_files(tmp_path):
    p = tmp_path / "bad.off"
    p.write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n")
    with pytest.raises(ValueError):
        read_off(p)
    p.write_text("PLY\n")
    with pytest.raises(ValueError):
        read_off(p)


def test_json_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    for i in range(10):
        lab = random_map(rng, 24)
        img = intensity_for(lab, rng)
        res = convert(lab, img)
        p = tmp_path / f"m{i}.json"
        export_json(res.mesh, res.colors, p)
        doc = json.loads(p.read_text())
        assert set(doc) == {"width", "height", "vertices", "faces"}
        assert {"vertices", "label", "color", "avg_intensity", "area"} <= set(doc["faces"][0])
        m2, colors2 = load_json(p)
        m2.check()
        assert face_polygons(m2) == (face_polygons(res.mesh)[0],
                                     [(j, ids) for j, (_, ids) in enumerate(face_polygons(res.mesh)[1])])
        ids = res.mesh.face_ids()
        for j, f in enumerate(ids):
            assert np.allclose(colors2[j], res.colors[f])
            assert m2.faces[j].luma == res.mesh.faces[f].luma
            assert doc["faces"][j]["area"] == res.mesh.area(f)


def _svg_polygons(text):
    root = ET.fromstring(text)
    ns = {"s": "http://www.w3.org/2000/svg"}
    g = root.find("s:g", ns)
    scale = float(g.get("transform")[len("scale("):-1])
    polys = []
    for el in g.findall("s:polygon", ns):
        pts = [tuple(float(c) for c in p.split(",")) for p in el.get("points").split()]
        fill = el.get("fill")
        polys.append((pts, tuple(int(fill[i:i + 2], 16) for i in (1, 3, 5))))
    return root, scale, polys


def test_svg_polygon_count(tmp_path):
    rng = np.random.default_rng(2)
    lab = random_map(rng, 24)
    res = convert(lab, intensity_for(lab, rng))
    p = tmp_path / "m.svg"
    export_svg(res.mesh, res.colors, 3, p)
    root, scale, polys = _svg_polygons(p.read_text())
    assert scale == 3 and len(polys) == res.mesh.n_faces
    assert float(root.get("width")) == 3 * lab.shape[1]


@pytest.mark.parametrize("scale", [1, 3, 4])
def test_svg_matches_rasterize_off_edges(scale):
    rng = np.random.default_rng(3 + scale)
    checked = 0
    for _ in range(6):
        lab = random_map(rng, 24)
        img = np.stack([intensity_for(lab, rng)] * 3, axis=2)
        res = convert(lab, img)
        cols = {f: np.round(c) for f, c in res.colors.items()}
        ref = rasterize(res.mesh, cols, scale)
        _, s, polys = _svg_polygons(svg_text(res.mesh, cols, scale))
        h, w = ref.shape[:2]
        canvas = Image.new("RGB", (w, h))
        draw = ImageDraw.Draw(canvas)
        for pts, fill in polys:
            draw.polygon([(x * s, y * s) for x, y in pts], fill=fill)
        edges = Image.new("L", (w, h))
        ed = ImageDraw.Draw(edges)
        for pts, _ in polys:
            q = [(x * s, y * s) for x, y in pts]
            ed.line(q + q[:1], fill=255, width=3)
        got = np.asarray(canvas, dtype=float)
        away = np.asarray(edges) == 0
        assert np.array_equal(got[away], ref[away])
        checked += int(away.sum())
    assert checked > 200
