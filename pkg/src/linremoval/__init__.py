"""Removal machinery for systems of linear equations over finite fields."""

from .gf import FieldSpec, field_make
from .matgf import MatrixGF
from .normalize import LinSystem, normalize
from .certificate import certify, verify_certificate
from .hypergraph import BigHypergraph, TemplateHypergraph, count_copies
from .removal import count_solutions, removal_pipeline

__all__ = [
    "FieldSpec",
    "field_make",
    "MatrixGF",
    "LinSystem",
    "normalize",
    "certify",
    "verify_certificate",
    "BigHypergraph",
    "TemplateHypergraph",
    "count_copies",
    "count_solutions",
    "removal_pipeline",
]
