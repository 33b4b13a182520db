"""Command-line entry point: ``rime <subcommand> ...``.

Exit status is 0 on success, 1 for usage errors and 2 for unreadable or
inconsistent data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import bench, mesh_io
from .metrics import evaluate
from .raster_io import FormatError, load_gray_image, load_label_map, save_image, save_label_map
from .render import rasterize
from .straighten import RimeParams


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _csv_list(text: str, kind=str) -> List:
    try:
        return [kind(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rime", description="Resolution-independent meshes from superpixel label maps.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("slic", help="segment an image into superpixels")
    s.add_argument("--image", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--compactness", type=float, default=10.0)
    s.add_argument("--iters", type=int, default=10)
    s.add_argument("--out", required=True, help="label map (.pgm or .csv)")

    c = sub.add_parser("convert", help="turn a label map into a polygonal mesh")
    c.add_argument("--labels", required=True)
    c.add_argument("--image", required=True)
    c.add_argument("--color-offset", type=float, default=30.0)
    c.add_argument("--max-color-dif", type=float, default=2.0)
    c.add_argument("--min-angle", type=float, default=30.0)
    c.add_argument("--no-merge", action="store_true")
    c.add_argument("--strict-paper", action="store_true",
                   help="skip the extra straightening pass after merging")
    c.add_argument("--off", required=True)
    c.add_argument("--json")
    c.add_argument("--stem", help="name used in progress lines (default: image file stem)")

    r = sub.add_parser("render", help="render a mesh at any scale")
    r.add_argument("--mesh", required=True)
    r.add_argument("--scale", type=float, required=True)
    r.add_argument("--png")
    r.add_argument("--svg")
    r.add_argument("--stroke", action="store_true")

    m = sub.add_parser("metrics", help="evaluate a segmentation against ground truth")
    g = m.add_mutually_exclusive_group(required=True)
    g.add_argument("--labels")
    g.add_argument("--mesh")
    m.add_argument("--gt", required=True, action="append", help="ground truth; repeat for several")
    m.add_argument("--image")
    m.add_argument("--eps", type=float, default=2.0)
    m.add_argument("--out", required=True)

    b = sub.add_parser("bench", help="benchmark over a dataset directory")
    b.add_argument("--dataset", required=True)
    b.add_argument("--algos", type=lambda t: _csv_list(t), default=list(bench.ALGORITHMS))
    b.add_argument("--k-list", type=lambda t: _csv_list(t, int), default=[200, 600, 1200])
    b.add_argument("--color-offset", type=float, default=30.0)
    b.add_argument("--max-color-dif", type=float, default=2.0)
    b.add_argument("--min-angle", type=float, default=30.0)
    b.add_argument("--eps", type=float, default=2.0)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true", help="write time_s as 0 for reproducible files")
    b.add_argument("--out", required=True)
    return p


def _params(a) -> RimeParams:
    try:
        return RimeParams(a.color_offset, a.max_color_dif, a.min_angle)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cmd_slic(a) -> None:
    from .slic import SlicParams, slic

    try:
        sp = SlicParams(k=a.k, compactness=a.compactness, iterations=a.iters)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    save_label_map(slic(load_gray_image(a.image), sp), a.out)


def _cmd_convert(a) -> None:
    from .pipeline import convert

    params = _params(a)
    labels = load_label_map(a.labels)
    image = load_gray_image(a.image)
    res = convert(labels, image, params, merge=not a.no_merge, restraighten=not a.strict_paper)
    stem = a.stem or Path(a.image).stem
    for stage, ms in res.timings_ms.items():
        print(f"image={stem} stage={stage} ms={ms:.1f}")
    mesh_io.export_off(res.mesh, a.off)
    if a.json:
        mesh_io.export_json(res.mesh, res.colors, a.json)


def _cmd_render(a) -> None:
    if not a.scale > 0:
        raise UsageError("--scale must be positive")
    if not (a.png or a.svg):
        raise UsageError("give --png and/or --svg")
    mesh, colors = mesh_io.load_json(a.mesh)
    if not colors:
        colors = {f: np.array([128.0]) for f in mesh.face_ids()}
    if a.png:
        c = len(next(iter(colors.values())))
        stroke = None
        if a.stroke:
            stroke = [0.0] * c
        save_image(rasterize(mesh, colors, a.scale, stroke=stroke), a.png)
    if a.svg:
        mesh_io.export_svg(mesh, colors, a.scale, a.svg, stroke="#000000" if a.stroke else None)


def _cmd_metrics(a) -> None:
    if a.mesh:
        seg, _ = mesh_io.load_json(a.mesh)
    else:
        seg = load_label_map(a.labels).labels
    gts = [load_label_map(p).labels for p in a.gt]
    image = load_gray_image(a.image) if a.image else None
    rep = evaluate(seg, gts, image, a.eps)
    with open(a.out, "w", newline="\n") as fh:
        json.dump(rep.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def _cmd_bench(a) -> None:
    params = _params(a)
    for algo in a.algos:
        if algo not in bench.ALGORITHMS:
            raise UsageError(f"unknown algorithm {algo!r}")
    if not a.k_list or any(k < 1 for k in a.k_list):
        raise UsageError("--k-list needs positive integers")
    if not Path(a.dataset).is_dir():
        raise FileNotFoundError(a.dataset)
    rows = bench.run_benchmark(a.dataset, a.algos, a.k_list, params, a.eps, a.jobs, timing=not a.no_timing,
                               progress=lambda stem, ms: print(f"image={stem} stage=bench ms={ms:.1f}"))
    bench.write_rows(rows, a.out)


COMMANDS = {"slic": _cmd_slic, "convert": _cmd_convert, "render": _cmd_render,
            "metrics": _cmd_metrics, "bench": _cmd_bench}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rime: {exc}", file=sys.stderr)
        return 1
    except (OSError, FormatError, ValueError, KeyError) as exc:
        print(f"rime: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
