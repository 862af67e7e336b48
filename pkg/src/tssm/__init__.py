"""Tabular structure detection in document images via row similarity.

Rows of a candidate region are reduced to per-partition horizontal
coverage features; a region whose consecutive rows are structurally
similar is a tabular structure, and structures with a real column layout
are refined into tables. Ships with an IOU-based evaluation harness and
a deterministic synthetic-page generator for end-to-end verification.
"""

from .detector import (
    KIND_TABLE,
    KIND_TABULAR_STRUCTURE,
    DetectionConfig,
    TabularRegion,
    build_row_elements,
    detect_and_refine,
    detect_tabular_regions,
    refine_tables,
    score_region,
)
from .errors import (
    DimensionError,
    InvalidConfigError,
    InvalidInputError,
    LayoutError,
    NoContentError,
    PageMismatchError,
)
from .evaluation import (
    GroundTruthPage,
    MatchResult,
    Metrics,
    compute_metrics,
    evaluate_corpus,
    load_regions,
    match_detections,
    metrics_from_counts,
    voc_xml_to_page,
)
from .geometry import BBox, Point, intersection_area, iou, length, x_cover_fraction
from .page import (
    BinaryImage,
    CandidateRegion,
    GrayImage,
    PageAnalysis,
    TextLine,
    analyze_page,
    binarize,
    connected_components,
    estimate_char_width,
    load_image,
    propose_candidate_regions,
    segment_lines,
)
from .rows import (
    FeatureVector,
    HorizontalRegion,
    RowElement,
    SubElement,
    column_feature,
    partition_count,
    row_feature,
    split_horizontal_regions,
)
from .similarity import (
    SimilarityMatrix,
    euclidean_distance,
    is_similar,
    normalized_distance,
    pairwise_tssm,
    tssm,
)
from .synth import (
    EquationStackSpec,
    FigureSpec,
    PageSpec,
    ParagraphSpec,
    TableSpec,
    generate_corpus,
    generate_page,
)

__version__ = "0.1.0"
