"""Dataset-scale benchmark runs.

A dataset directory holds ``images/<stem>.<ext>`` and one or more ground
truths ``gt/<stem>.pgm``, ``gt/<stem>.<n>.pgm`` (or ``.csv``).  Every image
is segmented by each algorithm at each target superpixel count, and the
measures are taken against the most favourable ground truth per measure.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .metrics import evaluate
from .raster_io import load_gray_image, load_label_map
from .straighten import RimeParams

log = logging.getLogger(__name__)

HEADER = ["image", "algo", "k", "br", "cue", "asa", "dre", "comp", "time_s"]
ALGORITHMS = ("slic", "slic+rime")
IMAGE_SUFFIXES = (".pgm", ".ppm", ".png")


@dataclass
class BenchRow:
    image: str
    algo: str
    k: float
    br: float
    cue: float
    asa: float
    dre: float
    comp: float
    time_s: float
    target_k: int = 0

    def as_list(self) -> list:
        return [self.image, self.algo, _num(self.k), _num(self.br), _num(self.cue), _num(self.asa),
                _num(self.dre), _num(self.comp), _num(self.time_s)]


def _num(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def discover(dataset: Path) -> List[Tuple[str, Path, List[Path]]]:
    """Pairs of ``(stem, image path, ground-truth paths)``, sorted by stem."""
    dataset = Path(dataset)
    images = {}
    img_dir = dataset / "images"
    gt_dir = dataset / "gt"
    if img_dir.is_dir():
        for p in sorted(img_dir.iterdir()):
            if p.suffix.lower() in IMAGE_SUFFIXES:
                images.setdefault(p.stem, p)
    gts: Dict[str, List[Path]] = {}
    if gt_dir.is_dir():
        for p in sorted(gt_dir.iterdir()):
            if p.suffix.lower() not in (".pgm", ".csv"):
                continue
            stem = p.stem.split(".")[0]
            gts.setdefault(stem, []).append(p)
    out = []
    for stem in sorted(set(images) | set(gts)):
        if stem not in images or stem not in gts:
            log.warning("skipping unpaired %s", stem)
            continue
        out.append((stem, images[stem], gts[stem]))
    return out


def _run_one(job) -> List[BenchRow]:
    stem, img_path, gt_paths, algos, k_list, params, eps, timing = job
    from .pipeline import convert
    from .slic import SlicParams, slic

    image = load_gray_image(img_path)
    gts = [load_label_map(p).labels for p in gt_paths]
    for g in gts:
        if g.shape != (image.height, image.width):
            raise ValueError(f"{stem}: ground truth and image dimensions differ")
    rows = []
    for k in k_list:
        t0 = time.perf_counter()
        labels = slic(image, SlicParams(k=k))
        t_slic = time.perf_counter() - t0
        for algo in algos:
            if algo == "slic":
                seg, elapsed = labels, t_slic
            elif algo == "slic+rime":
                t1 = time.perf_counter()
                seg = convert(labels, image, params).mesh
                elapsed = t_slic + time.perf_counter() - t1
            else:
                raise ValueError(f"unknown algorithm {algo!r}")
            rep = evaluate(seg, gts, image, eps)
            rows.append(BenchRow(stem, algo, rep.superpixel_count, rep.br, rep.cue, rep.asa, rep.dre,
                                 rep.compactness, elapsed if timing else 0.0, k))
    return rows


def average_rows(rows: Sequence[BenchRow], algos: Sequence[str], k_list: Sequence[int]) -> List[BenchRow]:
    """One ``mean`` row per (algorithm, target k), in the given order; the
    ``k`` column holds the mean realised superpixel count."""
    out = []
    for k in k_list:
        for algo in algos:
            sel = [r for r in rows if r.algo == algo and r.target_k == k]
            if not sel:
                continue
            m = lambda f: float(np.mean([getattr(r, f) for r in sel]))
            out.append(BenchRow(f"mean@{k}", algo, m("k"), m("br"), m("cue"), m("asa"), m("dre"), m("comp"),
                                m("time_s"), k))
    return out


def run_benchmark(dataset, algorithms: Sequence[str] = ALGORITHMS, k_list: Sequence[int] = (200, 600, 1200),
                  params: RimeParams = RimeParams(), eps: float = 2.0, jobs: int = 1, timing: bool = True,
                  progress=None) -> List[BenchRow]:
    """Benchmark rows for every (image, k, algorithm) followed by averages.

    Rows are ordered by image stem, then k, then algorithm, regardless of
    ``jobs``.
    """
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    pairs = discover(Path(dataset))
    work = [(stem, ip, gp, tuple(algorithms), tuple(k_list), params, eps, timing) for stem, ip, gp in pairs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    rows: List[BenchRow] = []
    for (stem, *_), rs in zip(pairs, results):
        if progress is not None:
            progress(stem, 1e3 * sum(r.time_s for r in rs))
        rows.extend(rs)
    return rows + average_rows(rows, algorithms, k_list)


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(r.as_list())
    return buf.getvalue()


def _value(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def rows_to_json(rows: Sequence[BenchRow]) -> str:
    return json.dumps([{h: _value(getattr(r, h)) for h in HEADER} for r in rows], indent=1) + "\n"


def write_rows(rows: Sequence[BenchRow], path) -> None:
    text = rows_to_json(rows) if str(path).lower().endswith(".json") else rows_to_csv(rows)
    with open(path, "w", newline="") as fh:
        fh.write(text)
