"""Modules les plus réutilisés par année."""

from collections import Counter
from dataclasses import asdict, dataclass
from typing import Any, Dict, List

from ..database.store import NNBOMStore


@dataclass(frozen=True)
class ReusedModule:
    rank: int
    hash: str
    representative: str
    occurrences: int
    first_year: int
    repositories: int

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def top_reused_modules(store: NNBOMStore, year: int, k: int = 10) -> List[ReusedModule]:
    """Familles classées par occurrences dans les versions de l'année ; égalités : première année puis empreinte."""
    if k < 1:
        raise ValueError("k doit être >= 1")
    occurrences = Counter(m.module_hash for m in store.modules.values() if m.release_year == year)
    ranked = sorted(
        occurrences.items(),
        key=lambda item: (-item[1], store.families[item[0]].first_year, item[0]),
    )
    result = []
    for rank, (family_hash, count) in enumerate(ranked[:k], start=1):
        family = store.families[family_hash]
        result.append(ReusedModule(
            rank=rank,
            hash=family_hash,
            representative=family.representative,
            occurrences=count,
            first_year=family.first_year,
            repositories=len(family.repositories),
        ))
    return result


def top_modules_series(store: NNBOMStore, k: int = 10) -> Dict[int, List[ReusedModule]]:
    return {year: top_reused_modules(store, year, k) for year in store.years()}
