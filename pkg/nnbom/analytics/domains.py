"""Diversité des domaines : entropie des familles, recouvrement, durée de vie."""

import logging
from collections import Counter
from enum import Enum
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Set, Tuple

from scipy.stats import entropy

from ..database.store import NNBOMStore
from ..models import DOMAIN_ORDER, CloneFamily, Domain, ModuleRecord

logger = logging.getLogger(__name__)


class EntropyMode(str, Enum):
    CUMULATIVE = "cumulative"
    YEARLY = "yearly"


def _considered(year: int, member_year: int, mode: EntropyMode) -> bool:
    if mode is EntropyMode.CUMULATIVE:
        return member_year <= year
    return member_year == year


def family_entropy(
    family: CloneFamily,
    modules: Mapping[int, ModuleRecord],
    year: int,
    mode: EntropyMode = EntropyMode.CUMULATIVE,
    base: Optional[float] = None,
) -> Optional[float]:
    """Entropie de la répartition des affectations de domaines ; None sans affectation."""
    counts: Counter = Counter()
    for index in family.members:
        member = modules[index]
        if _considered(year, member.release_year, mode):
            counts.update(member.domains)
    if not counts:
        return None
    return float(entropy([counts[d] for d in DOMAIN_ORDER if counts[d]], base=base))


def average_entropy(
    store: NNBOMStore,
    year: int,
    mode: EntropyMode = EntropyMode.CUMULATIVE,
    base: Optional[float] = None,
) -> Tuple[int, Optional[float]]:
    """(familles éligibles N, entropie moyenne) ; moyenne absente si N = 0."""
    values = []
    for family_hash in sorted(store.families):
        value = family_entropy(store.families[family_hash], store.modules, year, mode, base)
        if value is not None:
            values.append(value)
    if not values:
        return 0, None
    return len(values), sum(values) / len(values)


def entropy_report(
    store: NNBOMStore,
    mode: EntropyMode = EntropyMode.CUMULATIVE,
    base: Optional[float] = None,
) -> Dict[int, Tuple[int, Optional[float]]]:
    return {year: average_entropy(store, year, mode, base) for year in store.years()}


def overlap_percentage(a: Set[str], b: Set[str]) -> float:
    union = a | b
    if not union:
        return 0.0
    return 100.0 * len(a & b) / len(union)


def domain_family_sets(store: NNBOMStore, year: int) -> Dict[Domain, Set[str]]:
    """Familles actives cette année-là, par domaine de leurs occurrences de l'année."""
    sets: Dict[Domain, Set[str]] = {d: set() for d in DOMAIN_ORDER}
    for module in store.modules.values():
        if module.release_year != year:
            continue
        for domain in module.domains:
            sets[domain].add(module.module_hash)
    return sets


def domain_overlap(
    store: NNBOMStore,
    year: int,
    top: Optional[int] = None,
) -> List[Tuple[Tuple[Domain, Domain], float]]:
    """Paires de domaines classées par pourcentage de familles partagées."""
    sets = domain_family_sets(store, year)
    ranked = []
    for position, (a, b) in enumerate(combinations(DOMAIN_ORDER, 2)):
        if not (sets[a] or sets[b]):
            continue
        ranked.append((position, (a, b), overlap_percentage(sets[a], sets[b])))
    ranked.sort(key=lambda item: (-item[2], item[0]))
    result = [(pair, value) for _, pair, value in ranked]
    return result[:top] if top is not None else result


def observation_window(store: NNBOMStore) -> int:
    if not store.families:
        return 0
    first = min(f.first_year for f in store.families.values())
    last = max(f.last_year for f in store.families.values())
    return last - first + 1


def lifespan_matrix(store: NNBOMStore, window: Optional[int] = None) -> List[List[int]]:
    """Matrice [durée de vie 1..W][nombre de domaines 1..7] du nombre de familles."""
    window = window or observation_window(store)
    matrix = [[0] * len(DOMAIN_ORDER) for _ in range(window)]
    for family in store.families.values():
        if family.domain_range == 0:
            continue
        lifespan = min(family.lifespan, window)
        matrix[lifespan - 1][family.domain_range - 1] += 1
    return matrix
