"""Évaluation d'un dépôt cible : statut de ses modules, recommandations, dépôts similaires."""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Set

from ..analytics.networks import ComponentType, build_cousage
from ..database.operations import StagedVersion, latest_complete_year
from ..database.store import NNBOMStore

logger = logging.getLogger(__name__)


class ModuleStatus(str, Enum):
    ORIGINAL = "original"
    REUSED = "reused"
    OUTDATED = "outdated"


@dataclass(frozen=True)
class ModuleAssessment:
    name: str
    file: str
    hash: str
    status: ModuleStatus
    origin_year: Optional[int] = None
    last_year: Optional[int] = None


@dataclass(frozen=True)
class Recommendation:
    component_type: ComponentType
    component: str
    score: float


@dataclass(frozen=True)
class SimilarRepo:
    repo_id: str
    similarity: float


@dataclass
class AssessmentReport:
    target: str
    snapshot_time: Optional[datetime]
    inventory: Dict[str, int]
    modules: List[ModuleAssessment] = field(default_factory=list)
    new_tpls: List[str] = field(default_factory=list)
    recommendations: List[Recommendation] = field(default_factory=list)
    similar: List[SimilarRepo] = field(default_factory=list)

    def status_counts(self) -> Dict[str, int]:
        counts = Counter(m.status.value for m in self.modules)
        return {status.value: counts.get(status.value, 0) for status in ModuleStatus}

    def origin_years(self) -> Dict[int, int]:
        """Répartition des années d'origine des modules réutilisés."""
        counts = Counter(m.origin_year for m in self.modules if m.origin_year is not None)
        return dict(sorted(counts.items()))

    def to_records(self) -> List[Dict[str, Any]]:
        records: List[Dict[str, Any]] = [{
            "kind": "summary",
            "target": self.target,
            "snapshot_time": self.snapshot_time.isoformat() if self.snapshot_time else None,
            **{f"{k}_count": v for k, v in self.inventory.items()},
            **self.status_counts(),
            "new_tpls": self.new_tpls,
            "origin_years": {str(y): n for y, n in self.origin_years().items()},
        }]
        records.extend({
            "kind": "module", "name": m.name, "file": m.file, "hash": m.hash,
            "status": m.status.value, "origin_year": m.origin_year, "last_year": m.last_year,
        } for m in self.modules)
        records.extend({
            "kind": "recommendation", "type": r.component_type.value, "component": r.component, "score": r.score,
        } for r in self.recommendations)
        records.extend({"kind": "similar", "repo_id": s.repo_id, "similarity": s.similarity} for s in self.similar)
        return records


def target_components(target: Optional[StagedVersion]) -> Dict[ComponentType, Set[str]]:
    if target is None:
        return {ctype: set() for ctype in ComponentType}
    return {
        ComponentType.TPL: {t.name for t in target.tpls},
        ComponentType.PTM: {p.identity for p in target.ptms if p.identity is not None},
        ComponentType.MODULE: {m.module_hash for m in target.modules},
    }


def recommend_components(
    store: NNBOMStore,
    inventory: Dict[ComponentType, Set[str]],
    n: int = 10,
    year: Optional[int] = None,
    threshold: int = 5,
) -> List[Recommendation]:
    """Composants absents de la cible, notés par poids de co-usage avec ses composants."""
    year = year if year is not None else latest_complete_year(store)
    if year is None or n <= 0:
        return []

    recommendations: List[Recommendation] = []
    for ctype in ComponentType:
        owned = inventory.get(ctype, set())
        graph = build_cousage(store, ctype, year, threshold)
        scores: Dict[str, float] = defaultdict(float)
        for component in owned:
            if component not in graph:
                continue
            for neighbour, data in graph[component].items():
                if neighbour not in owned:
                    scores[neighbour] += data.get("weight", 1)
        ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
        recommendations.extend(Recommendation(ctype, c, s) for c, s in ranked[:n] if s > 0)
    return recommendations


def repository_families(store: NNBOMStore) -> Dict[str, Set[str]]:
    families: Dict[str, Set[str]] = defaultdict(set)
    for module in store.modules.values():
        families[module.repo_id].add(module.module_hash)
    return families


def jaccard(a: Set[str], b: Set[str]) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 0.0


def similar_repos(
    store: NNBOMStore,
    families: Set[str],
    n: int = 5,
    exclude: Optional[str] = None,
) -> List[SimilarRepo]:
    """Dépôts classés par indice de Jaccard sur les familles de clones."""
    scored = []
    for repo_id, repo_families in repository_families(store).items():
        if repo_id == exclude:
            continue
        score = jaccard(families, repo_families)
        if score > 0:
            scored.append(SimilarRepo(repo_id, score))
    scored.sort(key=lambda s: (-s.similarity, s.repo_id))
    return scored[:n]


def assess_repo(
    store: NNBOMStore,
    repo_id: str,
    target: Optional[StagedVersion],
    staleness_years: int = 2,
    recommend: int = 10,
    similar: int = 5,
    threshold: int = 5,
) -> AssessmentReport:
    """Évalue l'instantané `target` (version HEAD du dépôt) contre la base."""
    if target is None:
        return AssessmentReport(repo_id, None, {"tpl": 0, "ptm": 0, "module": 0})

    # Occurrences des autres dépôts seulement
    others: Dict[str, List[int]] = defaultdict(list)
    for module in store.modules.values():
        if module.repo_id != repo_id:
            others[module.module_hash].append(module.release_year)

    snapshot_year = target.release_time.year
    assessments = []
    for module in target.modules:
        years = others.get(module.module_hash)
        if not years:
            assessments.append(ModuleAssessment(module.name, module.file, module.module_hash, ModuleStatus.ORIGINAL))
            continue
        origin, last = min(years), max(years)
        status = ModuleStatus.OUTDATED if snapshot_year - last > staleness_years else ModuleStatus.REUSED
        assessments.append(ModuleAssessment(module.name, module.file, module.module_hash, status, origin, last))

    known_tpls = {t.name for v in store.versions.values() if v.repo_id != repo_id for t in v.tpls}
    inventory = target_components(target)
    report = AssessmentReport(
        target=repo_id,
        snapshot_time=target.release_time,
        inventory={"tpl": len(target.tpls), "ptm": len(target.ptms), "module": len(target.modules)},
        modules=assessments,
        new_tpls=sorted({t.name for t in target.tpls} - known_tpls),
        recommendations=recommend_components(store, inventory, recommend, threshold=threshold),
        similar=similar_repos(store, inventory[ComponentType.MODULE], similar, exclude=repo_id),
    )
    counts = report.status_counts()
    logger.info(
        f"Évaluation de {repo_id}: {counts['original']} original(aux), {counts['reused']} réutilisé(s), "
        f"{counts['outdated']} obsolète(s)"
    )
    return report
