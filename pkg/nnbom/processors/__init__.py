"""Traitements : normalisation, familles de clones, domaines."""

from .clone_families import group_families, mark_reuse, shared_family_edges
from .domain_classifier import DomainTaxonomy, classify_domains
from .normalizer import NormalizationError, NormalizedForm, module_hash, normalize

__all__ = [
    "group_families", "mark_reuse", "shared_family_edges", "DomainTaxonomy",
    "classify_domains", "NormalizationError", "NormalizedForm", "module_hash", "normalize",
]
