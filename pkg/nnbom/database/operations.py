"""Opérations sur la base : ajout de dépôts, reconstruction des index, statistiques."""

import logging
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

from ..models import (
    DOMAIN_ORDER,
    Domain,
    ModuleRecord,
    PtmInvocation,
    RepoMeta,
    RepoRecord,
    RepoStatus,
    TplDependency,
    VersionRecord,
)
from ..processors.clone_families import group_families, mark_reuse, shared_family_edges
from .store import NNBOMStore

logger = logging.getLogger(__name__)

SIZE_BUCKETS = ((0, 100), (100, 500), (500, 1000), (1000, None))


def size_bucket(module_count: int) -> int:
    """Indice de l'intervalle [0,100), [100,500), [500,1000), [1000,∞)."""
    if module_count < 0:
        raise ValueError("nombre de modules négatif")
    for index, (low, high) in enumerate(SIZE_BUCKETS):
        if high is None or module_count < high:
            return index
    return len(SIZE_BUCKETS) - 1


@dataclass(frozen=True)
class StagedModule:
    name: str
    file: str
    loc: int
    module_hash: str


@dataclass
class StagedVersion:
    """Version extraite, prête à être écrite d'un bloc dans la base."""

    tag: str
    release_time: datetime
    tpls: List[TplDependency] = field(default_factory=list)
    ptms: List[PtmInvocation] = field(default_factory=list)
    modules: List[StagedModule] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)


class StoreOperations:
    """Opérations d'écriture et d'indexation sur un NNBOMStore."""

    def __init__(self, store: NNBOMStore):
        self.store = store

    def has_repository(self, repo_id: str) -> bool:
        return repo_id in self.store.repos

    def record_skipped(self, meta: RepoMeta, domains: List[Domain], reason: str):
        self.store.repos[meta.repo_id] = RepoRecord(
            **meta.model_dump(),
            domains=domains,
            status=RepoStatus.SKIPPED,
            skip_reason=reason,
        )
        logger.info(f"Dépôt {meta.repo_id} ignoré: {reason}")

    def add_repository(self, meta: RepoMeta, domains: List[Domain], versions: List[StagedVersion]) -> RepoRecord:
        """Ajoute un dépôt et ses versions ; les index globaux sont alloués ici."""
        domains = [d for d in DOMAIN_ORDER if d in set(domains)]
        version_indices = []
        for staged in versions:
            version_index = self.store.meta.next_version_index
            self.store.meta.next_version_index += 1

            module_ids = []
            for module in staged.modules:
                module_index = self.store.meta.next_module_index
                self.store.meta.next_module_index += 1
                self.store.modules[module_index] = ModuleRecord(
                    module_index=module_index,
                    module_hash=module.module_hash,
                    version_index=version_index,
                    repo_id=meta.repo_id,
                    name=module.name,
                    file=module.file,
                    loc=module.loc,
                    domains=domains,
                    release_time=staged.release_time,
                )
                module_ids.append(module_index)

            self.store.versions[version_index] = VersionRecord(
                version_index=version_index,
                repo_id=meta.repo_id,
                tag=staged.tag,
                release_time=staged.release_time,
                tpls=list(staged.tpls),
                ptms=list(staged.ptms),
                self_developed=module_ids,
                diagnostics=list(staged.diagnostics),
            )
            version_indices.append(version_index)

        record = RepoRecord(**meta.model_dump(), domains=domains, version_indices=version_indices)
        self.store.repos[meta.repo_id] = record
        logger.info(f"Dépôt {meta.repo_id}: {len(version_indices)} version(s) ajoutée(s)")
        return record

    def rebuild_indices(self):
        """Familles, fréquences, réutilisation et arêtes de dépendance."""
        families = group_families(self.store.modules.values())
        self.store.families = {f.hash: f for f in families}

        for index, module in list(self.store.modules.items()):
            frequency = self.store.families[module.module_hash].frequency
            if module.frequency != frequency:
                self.store.modules[index] = module.model_copy(update={"frequency": frequency})

        updated = mark_reuse(self.store.versions.values(), self.store.modules, families)
        self.store.versions = {v.version_index: v for v in updated}
        self.store.edges = shared_family_edges(families)
        logger.info(
            f"Index reconstruits: {len(families)} famille(s), {len(self.store.edges)} arête(s) de dépendance"
        )

    def get_stats(self) -> Dict[str, Any]:
        """Vue d'ensemble de la base."""
        versions = list(self.store.versions.values())
        skipped = sum(1 for r in self.store.repos.values() if r.status is RepoStatus.SKIPPED)
        return {
            "repositories": len(self.store.repos) - skipped,
            "skipped_repositories": skipped,
            "versions": len(versions),
            "distinct_tpls": len({t.name for v in versions for t in v.tpls}),
            "tpl_occurrences": sum(len(v.tpls) for v in versions),
            "ptm_invocations": sum(len(v.ptms) for v in versions),
            "modules": len(self.store.modules),
            "cloned_modules": sum(len(v.cloned) for v in versions),
            "families": len(self.store.families),
            "dependency_edges": len(self.store.edges),
            "first_year": min((v.release_year for v in versions), default=None),
            "last_year": max((v.release_year for v in versions), default=None),
        }


def latest_complete_year(store: NNBOMStore) -> Optional[int]:
    """Dernière année close : des versions sont publiées après elle. L'unique année sinon."""
    years = store.years()
    if not years:
        return None
    return years[-2] if len(years) > 1 else years[-1]
