"""Analyses de l'évolution de l'écosystème à partir d'une base NNBOM fermée."""

from .domains import (
    EntropyMode,
    average_entropy,
    domain_overlap,
    entropy_report,
    family_entropy,
    lifespan_matrix,
    overlap_percentage,
)
from .networks import (
    CommunityPartition,
    ComponentType,
    build_cousage,
    build_dependency_graph,
    community_dynamics,
    louvain,
    write_edge_list,
)
from .reuse import ReusedModule, top_reused_modules
from .trends import TrendRow, size_distribution, yearly_trends

__all__ = [
    "EntropyMode", "average_entropy", "domain_overlap", "entropy_report", "family_entropy",
    "lifespan_matrix", "overlap_percentage", "CommunityPartition", "ComponentType",
    "build_cousage", "build_dependency_graph", "community_dynamics", "louvain",
    "write_edge_list", "ReusedModule", "top_reused_modules", "TrendRow",
    "size_distribution", "yearly_trends",
]
