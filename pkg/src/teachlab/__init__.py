"""Greedy teaching sets, the classes that defeat them, and brute-force checks."""

__version__ = "0.1.0"

from .concepts import (
    Concept,
    ConceptClass,
    Domain,
    DomainPoint,
    Restriction,
    TeachingCertificate,
    build_class,
    consistent_mask,
    count_consistent,
    flip_label,
    is_shattered,
    is_teaching_set,
    patterns_on,
    restrict,
)
from .errors import BudgetExceeded, ConstructionError, DomainMismatchError, PreconditionError, TeachlabError
from .greedy import GreedyConfig, GreedyTrace, best_restriction, greedy_teach
from .headtail import HTParams, build_headtail, check_f_and, count_A, validate_ht_widths
from .kernels import BACKEND
from .rectangles import build_rectangles, realize_rectangle, validate_rect_widths

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "Concept",
    "ConceptClass",
    "ConstructionError",
    "Domain",
    "DomainMismatchError",
    "DomainPoint",
    "GreedyConfig",
    "GreedyTrace",
    "HTParams",
    "PreconditionError",
    "Restriction",
    "TeachingCertificate",
    "TeachlabError",
    "best_restriction",
    "build_class",
    "build_headtail",
    "build_rectangles",
    "check_f_and",
    "consistent_mask",
    "count_A",
    "count_consistent",
    "flip_label",
    "greedy_teach",
    "is_shattered",
    "is_teaching_set",
    "patterns_on",
    "realize_rectangle",
    "restrict",
    "validate_ht_widths",
    "validate_rect_widths",
]
