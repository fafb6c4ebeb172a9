"""Applications : analyse différentielle et évaluation d'un dépôt."""

from .assessor import (
    AssessmentReport,
    ModuleStatus,
    Recommendation,
    SimilarRepo,
    assess_repo,
    recommend_components,
    similar_repos,
)
from .delta import DeltaReport, delta_analyze

__all__ = [
    "AssessmentReport", "ModuleStatus", "Recommendation", "SimilarRepo", "assess_repo",
    "recommend_components", "similar_repos", "DeltaReport", "delta_analyze",
]
