"""Label map plus image in, coloured polygonal mesh out."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List

from .merge import MergeRecord, merge_adjacent, restraighten_affected
from .mesh import Mesh
from .raster_io import GrayImage, as_labels
from .render import face_colors
from .straighten import ChainLog, RimeParams, straighten_all
from .trace import (
    EnclosureSplit,
    TraceStats,
    attach_intensities,
    split_enclosed,
    trace_boundaries,
    verify_areas,
)


@dataclass
class ConversionResult:
    mesh: Mesh
    colors: Dict[int, object]
    stats: TraceStats
    splits: List[EnclosureSplit] = field(default_factory=list)
    straighten_log: List[ChainLog] = field(default_factory=list)
    merge_log: List[MergeRecord] = field(default_factory=list)
    restraighten_log: List[ChainLog] = field(default_factory=list)
    timings_ms: Dict[str, float] = field(default_factory=dict)

    @property
    def chain_log(self) -> List[ChainLog]:
        return self.straighten_log + self.restraighten_log


def convert(labels, image, params: RimeParams = RimeParams(), merge: bool = True,
            restraighten: bool = True) -> ConversionResult:
    """Run the three stages on a label map and its image.

    Stage 1 traces the 4-connected components and cuts enclosing faces,
    stage 2 straightens chains and stage 3 merges near-equal neighbours
    (skipped with ``merge=False``), followed by one extra straightening pass
    over merged faces unless ``restraighten=False``.
    """
    lab = as_labels(labels)
    img = image if isinstance(image, GrayImage) else GrayImage(getattr(image, "samples", image))
    if (img.height, img.width) != lab.shape:
        raise ValueError("image and label map dimensions differ")
    t = {}

    t0 = time.perf_counter()
    mesh, stats = trace_boundaries(lab)
    attach_intensities(mesh, img)
    if verify_areas(mesh, lab):
        mesh, splits = split_enclosed(mesh, params.min_angle)
    else:
        splits = []
    stats.enclosures_split = len(splits)
    t["1"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    mesh, slog = straighten_all(mesh, params)
    t["2"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    mlog: List[MergeRecord] = []
    rlog: List[ChainLog] = []
    if merge:
        mesh, mlog = merge_adjacent(mesh, params)
        if restraighten and mlog:
            mesh, rlog = restraighten_affected(mesh, params, {r.kept for r in mlog if mesh.faces[r.kept].alive})
    t["3"] = (time.perf_counter() - t0) * 1e3

    colors = face_colors(mesh, img)
    return ConversionResult(mesh, colors, stats, splits, slog, mlog, rlog, t)
