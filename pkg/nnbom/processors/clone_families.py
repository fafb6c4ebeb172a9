"""Familles de clones, détection de réutilisation et dépendances inter-dépôts."""

import logging
from collections import Counter, defaultdict
from datetime import datetime
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Set

from ..models import DOMAIN_ORDER, CloneFamily, DependencyEdge, ModuleRecord, VersionRecord

logger = logging.getLogger(__name__)


def group_families(modules: Iterable[ModuleRecord]) -> List[CloneFamily]:
    by_hash: Dict[str, List[ModuleRecord]] = defaultdict(list)
    for module in modules:
        by_hash[module.module_hash].append(module)

    families = []
    for module_hash in sorted(by_hash):
        members = sorted(by_hash[module_hash], key=lambda m: m.module_index)
        domains: Counter = Counter()
        for member in members:
            domains.update(member.domains)
        years = [m.release_year for m in members]
        families.append(CloneFamily(
            hash=module_hash,
            members=[m.module_index for m in members],
            repositories=sorted({m.repo_id for m in members}),
            first_year=min(years),
            last_year=max(years),
            domains={d: domains[d] for d in DOMAIN_ORDER if domains[d]},
            frequency=len(members),
            representative=_representative(members),
        ))

    logger.debug(f"{len(families)} famille(s) de clones")
    return families


def _representative(members: List[ModuleRecord]) -> str:
    """Nom de classe le plus fréquent, le plus petit en ordre lexicographique à égalité."""
    counts = Counter(m.simple_name for m in members)
    return min(counts.items(), key=lambda item: (-item[1], item[0]))[0]


def cloned_module_ids(families: Iterable[CloneFamily], modules: Mapping[int, ModuleRecord]) -> Set[int]:
    """Occurrences précédées strictement dans le temps par un autre dépôt."""
    cloned: Set[int] = set()
    for family in families:
        if len(family.repositories) < 2:
            continue
        members = [modules[i] for i in family.members]
        earliest: Dict[str, datetime] = {}
        for member in members:
            current = earliest.get(member.repo_id)
            if current is None or member.release_time < current:
                earliest[member.repo_id] = member.release_time
        for member in members:
            if any(t < member.release_time for repo, t in earliest.items() if repo != member.repo_id):
                cloned.add(member.module_index)
    return cloned


def mark_reuse(
    versions: Iterable[VersionRecord],
    modules: Mapping[int, ModuleRecord],
    families: Iterable[CloneFamily],
) -> List[VersionRecord]:
    """Répartit les modules de chaque version entre développés et clonés."""
    cloned = cloned_module_ids(families, modules)
    updated = []
    for version in versions:
        ids = version.module_ids
        updated.append(version.model_copy(update={
            "self_developed": [i for i in ids if i not in cloned],
            "cloned": [i for i in ids if i in cloned],
        }))
    return updated


def shared_family_edges(families: Iterable[CloneFamily]) -> List[DependencyEdge]:
    """Arêtes entre dépôts pondérées par le nombre de familles partagées."""
    weights: Counter = Counter()
    for family in families:
        for pair in combinations(sorted(family.repositories), 2):
            weights[pair] += 1
    return [
        DependencyEdge(source=source, target=target, weight=weight)
        for (source, target), weight in sorted(weights.items())
    ]
