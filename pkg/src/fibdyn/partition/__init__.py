"""Rectangle partition of the real plane for 0 < c < 1/4."""
from .certify import (
    TRANSITIONS,
    CertStatus,
    InclusionCertificate,
    Transition,
    TransitionReport,
    a2_bound,
    certify_inclusion,
    covered_by,
    exact_regions,
    rect_image_bbox,
    verify_transition_tables,
)
from .limits import (
    LimitClass,
    LimitKind,
    classify_backward_limit_real,
    classify_limit_grid,
    classify_limit_real,
    itinerary,
)
from .regions import LABELS, S_PRIME, Z_PRIME, Box, LabeledRect, XInterval, build_regions, locate

__all__ = [
    "TRANSITIONS", "CertStatus", "InclusionCertificate", "Transition", "TransitionReport",
    "certify_inclusion", "covered_by", "exact_regions", "a2_bound", "rect_image_bbox",
    "verify_transition_tables", "LimitClass", "LimitKind", "classify_backward_limit_real",
    "classify_limit_grid", "classify_limit_real", "itinerary", "LABELS", "S_PRIME", "Z_PRIME",
    "Box", "LabeledRect", "XInterval", "build_regions", "locate",
]
