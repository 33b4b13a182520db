"""Resolution-independent polygonal meshes from superpixel label maps.

The conversion runs in three stages: boundary tracing into a pixel-based
mesh, straightening of the chains between faces, and merging of faces with
near-equal mean intensity.  The result can be rendered at any scale and
evaluated with the usual superpixel benchmark measures.
"""

from .mesh import OUTSIDE, Face, Mesh
from .merge import merge_adjacent, restraighten_affected
from .metrics import MetricsReport, asa, boundary_recall, compactness, cue, dre, evaluate, mesh_to_labels
from .pipeline import ConversionResult, convert
from .raster_io import GrayImage, LabelMap, load_gray_image, load_label_map, save_image, save_label_map
from .render import face_colors, rasterize
from .slic import SlicParams, slic
from .straighten import RimeParams, extract_chains, straighten_all
from .trace import split_enclosed, trace_boundaries, verify_areas

__version__ = "0.1.0"
