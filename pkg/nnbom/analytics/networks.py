"""Graphes : dépendances entre dépôts, réseaux de co-usage et communautés Louvain."""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, Hashable, List, Optional, Set, TextIO, Tuple

import networkx as nx

from ..database.store import NNBOMStore
from ..models import VersionRecord
from ..processors.clone_families import shared_family_edges

logger = logging.getLogger(__name__)

# Tolérance numérique sur la croissance de la modularité entre niveaux
_MODULARITY_TOLERANCE = 1e-9


class ComponentType(str, Enum):
    TPL = "tpl"
    PTM = "ptm"
    MODULE = "module-family"


def version_components(store: NNBOMStore, version: VersionRecord, component_type: ComponentType) -> Set[str]:
    if component_type is ComponentType.TPL:
        return {t.name for t in version.tpls}
    if component_type is ComponentType.PTM:
        return {p.identity for p in version.ptms if p.identity is not None}
    return {m.module_hash for m in store.modules_of(version)}


def repo_components(store: NNBOMStore, component_type: ComponentType, year: int) -> Dict[str, Set[str]]:
    """Composants utilisés par chaque dépôt dans ses versions publiées cette année-là."""
    per_repo: Dict[str, Set[str]] = defaultdict(set)
    for version in store.versions_by_year().get(year, []):
        per_repo[version.repo_id] |= version_components(store, version, component_type)
    return dict(per_repo)


def repo_pairs(store: NNBOMStore, component_type: ComponentType, year: int) -> Dict[str, Set[Tuple[str, str]]]:
    """Paires de composants réunies dans une même version publiée cette année-là, par dépôt."""
    per_repo: Dict[str, Set[Tuple[str, str]]] = defaultdict(set)
    for version in store.versions_by_year().get(year, []):
        components = version_components(store, version, component_type)
        per_repo[version.repo_id].update(combinations(sorted(components), 2))
    return dict(per_repo)


def build_dependency_graph(store: NNBOMStore) -> nx.Graph:
    """Dépôts reliés par le nombre de familles de clones partagées."""
    graph = nx.Graph()
    graph.add_nodes_from(r.repo_id for r in store.ingested_repos())
    for edge in shared_family_edges(store.families[h] for h in sorted(store.families)):
        graph.add_edge(edge.source, edge.target, weight=edge.weight)
    return graph


def build_cousage(
    store: NNBOMStore,
    component_type: ComponentType,
    year: int,
    threshold: int = 5,
) -> nx.Graph:
    """Réseau de co-usage : arête si au moins `threshold` dépôts ont une version contenant les deux composants."""
    if threshold < 1:
        raise ValueError("le seuil de co-usage doit être >= 1")

    per_repo = repo_components(store, component_type, year)
    presence = Counter(c for components in per_repo.values() for c in components)
    nodes = sorted(c for c, count in presence.items() if count >= threshold)
    node_set = set(nodes)

    pair_counts: Counter = Counter(
        pair for pairs in repo_pairs(store, component_type, year).values()
        for pair in pairs if node_set.issuperset(pair)
    )

    graph = nx.Graph(component_type=component_type.value, year=year, threshold=threshold)
    graph.add_nodes_from(nodes)
    graph.add_weighted_edges_from(
        (a, b, count) for (a, b), count in sorted(pair_counts.items()) if count >= threshold
    )
    return graph


@dataclass(frozen=True)
class CommunityPartition:
    assignment: Dict[Hashable, int]
    modularity: float
    level_modularities: Tuple[float, ...] = ()

    @property
    def communities(self) -> List[Set[Hashable]]:
        grouped: Dict[int, Set[Hashable]] = defaultdict(set)
        for node, community in self.assignment.items():
            grouped[community].add(node)
        return [grouped[c] for c in sorted(grouped)]

    @property
    def average_size(self) -> float:
        count = len(self.communities)
        return len(self.assignment) / count if count else 0.0


def _ordered_assignment(communities) -> Dict[Hashable, int]:
    ordered = sorted(communities, key=lambda c: min(str(n) for n in c))
    return {node: index for index, community in enumerate(ordered) for node in sorted(community, key=str)}


def louvain(graph: nx.Graph, resolution: float = 1.0, seed: Optional[int] = 0) -> CommunityPartition:
    """Partition de Louvain (déplacements locaux puis agrégation) ; déterministe pour une graine donnée."""
    if graph.number_of_nodes() == 0:
        return CommunityPartition({}, 0.0)
    if graph.size(weight="weight") == 0:
        return CommunityPartition(_ordered_assignment([{n} for n in graph.nodes]), 0.0)

    previous = nx.community.modularity(graph, [{n} for n in graph.nodes], weight="weight", resolution=resolution)
    levels: List[float] = []
    best = None
    for partition in nx.community.louvain_partitions(graph, weight="weight", resolution=resolution, seed=seed):
        quality = nx.community.modularity(graph, partition, weight="weight", resolution=resolution)
        if quality < previous - _MODULARITY_TOLERANCE:
            raise RuntimeError(f"modularité en baisse entre deux niveaux ({previous:.6f} -> {quality:.6f})")
        levels.append(quality)
        previous = quality
        best = partition

    assignment = _ordered_assignment(best)
    grouped: Dict[int, Set[Hashable]] = defaultdict(set)
    for node, community in assignment.items():
        grouped[community].add(node)
    quality = nx.community.modularity(graph, list(grouped.values()), weight="weight", resolution=resolution)
    logger.debug(f"Louvain: {len(grouped)} communauté(s), Q={quality:.4f}, {len(levels)} niveau(x)")
    return CommunityPartition(assignment, quality, tuple(levels))


def community_dynamics(
    store: NNBOMStore,
    threshold: int = 5,
    resolution: float = 1.0,
    seed: Optional[int] = 0,
) -> Dict[Tuple[int, ComponentType], Tuple[int, float]]:
    """(nombre de communautés, taille moyenne) par année et type de composant."""
    dynamics = {}
    for year in store.years():
        for component_type in ComponentType:
            graph = build_cousage(store, component_type, year, threshold)
            partition = louvain(graph, resolution, seed)
            dynamics[(year, component_type)] = (len(partition.communities), partition.average_size)
    return dynamics


def write_edge_list(graph: nx.Graph, stream: TextIO):
    """Export `source<TAB>cible<TAB>poids`, une arête par ligne, triées."""
    edges = sorted((tuple(sorted((str(u), str(v)))), data.get("weight", 1)) for u, v, data in graph.edges(data=True))
    for (source, target), weight in edges:
        stream.write(f"{source}\t{target}\t{weight}\n")
