"""Vertex-based layouts, top-k patch scanning and patch/vertex mixup for poster layouts."""

__version__ = "0.1.0"

from .geometry import Box, Canvas, Corners, box_area, cxcywh_to_xyxy, enclosure_ratio, intersection_area, xyxy_to_cxcywh
from .layout import CGL_CATEGORIES, PKU_CATEGORIES, CategoryTable, Element, Layout
from .vlr import IdTree, VertexTensor, arrange_severtex_id, decode_vlr, encode_vlr, group_element_id, sorting_weight
from .tokenizer import LayoutTokenizer, dequantize_coord, quantize_coord
from .scan import PatchIndexSet, heuristic_density, mask_from_indices, pool_patch_scores, select_topk
from .mixer import (
    AugmentedSample, Region, Sample, find_regions, lcs_categories, mix_images, mix_vertices,
    print_augment, select_pairs, shift_pair, strict_mask,
)
from .metrics import MetricReport, evaluate_layout
from .errors import MalformedTensorError, ManifestError, ScanPrintError
