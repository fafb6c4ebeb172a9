"""Contenu en mémoire d'une base NNBOM et accès indexés."""

from collections import defaultdict
from typing import Dict, Iterable, List, Optional

from ..models import CloneFamily, DependencyEdge, ModuleRecord, RepoRecord, RepoStatus, StoreMeta, VersionRecord


class NNBOMStore:
    """Dépôts, versions, modules, familles et arêtes de dépendance."""

    def __init__(
        self,
        meta: Optional[StoreMeta] = None,
        repos: Iterable[RepoRecord] = (),
        versions: Iterable[VersionRecord] = (),
        modules: Iterable[ModuleRecord] = (),
        families: Iterable[CloneFamily] = (),
        edges: Iterable[DependencyEdge] = (),
    ):
        self.meta = meta or StoreMeta()
        self.repos: Dict[str, RepoRecord] = {r.repo_id: r for r in repos}
        self.versions: Dict[int, VersionRecord] = {v.version_index: v for v in versions}
        self.modules: Dict[int, ModuleRecord] = {m.module_index: m for m in modules}
        self.families: Dict[str, CloneFamily] = {f.hash: f for f in families}
        self.edges: List[DependencyEdge] = list(edges)

    def ingested_repos(self) -> List[RepoRecord]:
        return [r for _, r in sorted(self.repos.items()) if r.status is RepoStatus.INGESTED]

    def versions_of(self, repo_id: str) -> List[VersionRecord]:
        repo = self.repos.get(repo_id)
        if repo is None:
            return []
        return [self.versions[i] for i in repo.version_indices if i in self.versions]

    def versions_by_year(self) -> Dict[int, List[VersionRecord]]:
        by_year: Dict[int, List[VersionRecord]] = defaultdict(list)
        for _, version in sorted(self.versions.items()):
            by_year[version.release_year].append(version)
        return dict(sorted(by_year.items()))

    def years(self) -> List[int]:
        return sorted({v.release_year for v in self.versions.values()})

    def modules_of(self, version: VersionRecord) -> List[ModuleRecord]:
        return [self.modules[i] for i in version.module_ids if i in self.modules]

    def check_consistency(self) -> List[str]:
        """Anomalies d'index : clés étrangères absentes, fréquences fausses."""
        problems = []
        for index, module in sorted(self.modules.items()):
            if module.version_index not in self.versions:
                problems.append(f"module {index}: version {module.version_index} absente")
        for index, version in sorted(self.versions.items()):
            missing = [i for i in version.module_ids if i not in self.modules]
            if missing:
                problems.append(f"version {index}: modules absents {missing}")
            if version.repo_id not in self.repos:
                problems.append(f"version {index}: dépôt {version.repo_id} absent")

        counts: Dict[str, int] = defaultdict(int)
        for module in self.modules.values():
            counts[module.module_hash] += 1
        for family_hash, family in sorted(self.families.items()):
            if family.frequency != counts.get(family_hash, 0):
                problems.append(f"famille {family_hash[:12]}: fréquence {family.frequency} != {counts.get(family_hash, 0)}")
        if set(counts) != set(self.families):
            problems.append("familles et empreintes de modules divergentes")
        return problems

    def __eq__(self, other) -> bool:
        if not isinstance(other, NNBOMStore):
            return NotImplemented
        return (
            self.meta == other.meta
            and self.repos == other.repos
            and self.versions == other.versions
            and self.modules == other.modules
            and self.families == other.families
            and self.edges == other.edges
        )
