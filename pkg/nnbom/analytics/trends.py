"""Tendances annuelles de l'écosystème et distribution des tailles de versions."""

import logging
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

from ..database.operations import SIZE_BUCKETS, size_bucket
from ..database.store import NNBOMStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrendRow:
    year: int
    versions: int
    distinct_tpls: int
    ptm_invocations: int
    modules: int
    avg_modules: float
    avg_loc: Optional[float]
    ptm_repo_share: float

    def to_record(self) -> Dict[str, Any]:
        return asdict(self)


def yearly_trends(store: NNBOMStore) -> List[TrendRow]:
    rows = []
    for year, versions in store.versions_by_year().items():
        modules = [m for v in versions for m in store.modules_of(v)]
        repos = {v.repo_id for v in versions}
        repos_with_ptm = {v.repo_id for v in versions if v.ptms}
        rows.append(TrendRow(
            year=year,
            versions=len(versions),
            distinct_tpls=len({t.name for v in versions for t in v.tpls}),
            ptm_invocations=sum(len(v.ptms) for v in versions),
            modules=len(modules),
            avg_modules=len(modules) / len(versions),
            avg_loc=sum(m.loc for m in modules) / len(modules) if modules else None,
            ptm_repo_share=len(repos_with_ptm) / len(repos),
        ))
    return rows


def size_distribution(store: NNBOMStore) -> Dict[int, Tuple[float, ...]]:
    """Part des versions de chaque année dans les quatre intervalles de taille."""
    distribution = {}
    for year, versions in store.versions_by_year().items():
        counts = Counter(size_bucket(len(v.module_ids)) for v in versions)
        distribution[year] = tuple(counts[i] / len(versions) for i in range(len(SIZE_BUCKETS)))
    return distribution


def bucket_label(index: int) -> str:
    low, high = SIZE_BUCKETS[index]
    return f"[{low},{high})" if high is not None else f"[{low},∞)"
