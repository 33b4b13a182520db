"""Images and label maps: in-memory types and bit-exact file formats.

Supported: binary Netpbm (P5 grey at 8 or 16 bits, P6 colour at 8 bits),
8-bit PNG through Pillow, and CSV label maps (one image row per line).
16-bit samples are big-endian, as Netpbm prescribes.
"""

from __future__ import annotations

import io
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

PathLike = Union[str, os.PathLike]

LUMA = np.array([0.299, 0.587, 0.114])


class FormatError(ValueError):
    """A file could not be decoded or a value cannot be encoded."""


@dataclass
class GrayImage:
    """``height x width x channels`` intensity samples in [0, 255]."""

    samples: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.samples, dtype=np.float64)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3 or a.shape[2] not in (1, 3):
            raise ValueError("image must have 1 or 3 channels")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        self.samples = a

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def luma(self) -> np.ndarray:
        """Scalar intensity view, ``0.299 R + 0.587 G + 0.114 B`` for colour."""
        if self.channels == 1:
            return self.samples[:, :, 0]
        return self.samples @ LUMA


@dataclass
class LabelMap:
    """Superpixel index per pixel, row-major, non-negative."""

    labels: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.labels)
        if a.ndim != 2 or a.size == 0:
            raise ValueError("label map must be a non-empty 2-D array")
        if not np.issubdtype(a.dtype, np.integer):
            if not np.all(np.equal(np.mod(a, 1), 0)):
                raise ValueError("labels must be integers")
        a = a.astype(np.int64)
        if (a < 0).any():
            raise ValueError("negative label")
        self.labels = a

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def __eq__(self, other):
        return isinstance(other, LabelMap) and np.array_equal(self.labels, other.labels)


def as_labels(x) -> np.ndarray:
    return LabelMap(getattr(x, "labels", x)).labels


def as_samples(x) -> np.ndarray:
    return GrayImage(getattr(x, "samples", x)).samples


def luma_of(x) -> np.ndarray:
    return GrayImage(getattr(x, "samples", x)).luma


# ------------------------------------------------------------------- Netpbm
_FIELD = re.compile(rb"(?:\s|#[^\n]*\n)*(\d+)")


def _parse_netpbm(data: bytes):
    if len(data) < 2 or data[:1] != b"P":
        raise FormatError("malformed header")
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"unsupported Netpbm type {magic!r}")
    pos = 2
    fields = []
    for _ in range(3):
        # comments may appear anywhere in the header
        m = _FIELD.match(data, pos)
        if not m:
            raise FormatError("malformed header")
        fields.append(int(m.group(1)))
        pos = m.end()
    if pos >= len(data) or data[pos:pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise FormatError("malformed header")
    pos += 1
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError("malformed header")
    if maxval < 1 or maxval > 65535:
        raise FormatError("unsupported bit depth")
    channels = 1 if magic == b"P5" else 3
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    need = width * height * channels * dtype.itemsize
    if len(data) - pos < need:
        raise FormatError("truncated pixel data")
    arr = np.frombuffer(data, dtype=dtype, count=width * height * channels, offset=pos)
    return arr.reshape(height, width, channels).astype(np.int64), maxval


def _netpbm_bytes(arr: np.ndarray, maxval: int) -> bytes:
    h, w, c = arr.shape
    magic = b"P5" if c == 1 else b"P6"
    dtype = ">u2" if maxval > 255 else "u1"
    return magic + b"\n%d %d\n%d\n" % (w, h, maxval) + arr.astype(dtype).tobytes()


def _read(path: PathLike) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def load_gray_image(path: PathLike) -> GrayImage:
    """Read a PGM, PPM or PNG file.

    PGM gives one channel and PPM three.  PNG keeps one channel for greyscale
    files and three otherwise (alpha is dropped).  Samples with a maxval above
    255 are rescaled into [0, 255].
    """
    data = _read(path)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return GrayImage(_load_png(data))
    arr, maxval = _parse_netpbm(data)
    a = arr.astype(np.float64)
    if maxval != 255:
        a = a * (255.0 / maxval)
    return GrayImage(a)


def _load_png(data: bytes) -> np.ndarray:
    from PIL import Image

    try:
        im = Image.open(io.BytesIO(data))
        im.load()
    except Exception as exc:  # Pillow raises a zoo of types
        raise FormatError(f"malformed PNG: {exc}") from exc
    if im.mode.startswith("I") or im.mode == "F":
        raise FormatError("unsupported bit depth")
    if im.mode in ("1", "L", "LA"):
        return np.asarray(im.convert("L"), dtype=np.float64)
    return np.asarray(im.convert("RGB"), dtype=np.float64)


def save_image(img, path: PathLike) -> None:
    """Write an image; the format follows the suffix (``.pgm``, ``.ppm``, ``.png``).

    Samples are rounded and clipped to 8 bits.
    """
    g = img if isinstance(img, GrayImage) else GrayImage(img)
    a = np.clip(np.rint(g.samples), 0, 255).astype(np.uint8)
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        from PIL import Image

        Image.fromarray(a[:, :, 0] if g.channels == 1 else a).save(path, format="PNG")
        return
    if suffix == ".pgm" and g.channels != 1:
        raise FormatError("PGM holds one channel")
    if suffix == ".ppm" and g.channels != 3:
        raise FormatError("PPM holds three channels")
    if suffix not in (".pgm", ".ppm"):
        raise FormatError(f"unknown image suffix {suffix!r}")
    with open(path, "wb") as fh:
        fh.write(_netpbm_bytes(a, 255))


# ---------------------------------------------------------------- label maps
def load_label_map(path: PathLike) -> LabelMap:
    """Read a label map from a 16-bit (or 8-bit) PGM or a CSV of integers."""
    data = _read(path)
    if data[:1] == b"P":
        arr, _ = _parse_netpbm(data)
        if arr.shape[2] != 1:
            raise FormatError("label maps must be single-channel")
        return LabelMap(arr[:, :, 0])
    return LabelMap(_parse_csv(data.decode("ascii", errors="strict")))


def _parse_csv(text: str) -> np.ndarray:
    rows = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip()]
    if not rows:
        raise FormatError("empty label map")
    try:
        table = [[int(tok) for tok in ln.split(",")] for ln in rows]
    except ValueError as exc:
        raise FormatError(f"non-integer label: {exc}") from exc
    if len({len(r) for r in table}) != 1:
        raise FormatError("ragged rows")
    arr = np.array(table, dtype=np.int64)
    if (arr < 0).any():
        raise FormatError("negative label")
    return arr


def save_label_map(labels, path: PathLike) -> None:
    """Write a label map as 16-bit PGM (``.pgm``) or CSV (anything else)."""
    a = as_labels(labels)
    if Path(path).suffix.lower() == ".pgm":
        if a.max() > 65535:
            raise FormatError("label exceeds 65535, cannot be stored in PGM16")
        with open(path, "wb") as fh:
            fh.write(_netpbm_bytes(a[:, :, None], 65535))
        return
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(",".join(str(int(v)) for v in row) for row in a) + "\n")


# ---------------------------------------------------------------- validation
@dataclass
class LabelStats:
    pixels: int
    components: int


def label_components(labels) -> np.ndarray:
    """4-connected components of equal-label pixels.

    Components are numbered ``0..n-1`` in row-major order of their first
    pixel.
    """
    a = as_labels(labels)
    h, w = a.shape
    idx = np.arange(h * w).reshape(h, w)
    right = a[:, 1:] == a[:, :-1]
    down = a[1:, :] == a[:-1, :]
    src = np.concatenate([idx[:, :-1][right], idx[:-1, :][down]])
    dst = np.concatenate([idx[:, 1:][right], idx[1:, :][down]])
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(h * w, h * w))
    _, comp = connected_components(graph, directed=False)
    # renumber by first occurrence
    _, first, inv = np.unique(comp, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inv].reshape(h, w)


def validate_label_map(labels) -> Dict[int, LabelStats]:
    """Pixel count and number of 4-connected components for every label."""
    a = as_labels(labels)
    comp = label_components(a)
    n = int(comp.max()) + 1
    comp_label = np.zeros(n, dtype=np.int64)
    comp_label[comp.ravel()] = a.ravel()
    uniq, pix = np.unique(a, return_counts=True)
    ncomp = dict(zip(*np.unique(comp_label, return_counts=True)))
    return {int(lab): LabelStats(pixels=int(c), components=int(ncomp[lab])) for lab, c in zip(uniq, pix)}
