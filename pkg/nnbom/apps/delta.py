"""Analyse différentielle d'un lot de nouveaux dépôts par rapport à la base."""

import logging
from dataclasses import dataclass, field
from datetime import datetime
from itertools import combinations
from typing import Any, Dict, List, Optional, Set, Tuple

from ..database.store import NNBOMStore

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeltaReport:
    window_start: Optional[datetime]
    window_end: Optional[datetime]
    new_tpls: List[str] = field(default_factory=list)
    new_ptms: List[str] = field(default_factory=list)
    new_families: List[str] = field(default_factory=list)
    total_occurrences: int = 0
    original_occurrences: int = 0
    reused_occurrences: int = 0
    new_dependency_edges: int = 0

    @property
    def original_fraction(self) -> float:
        if not self.total_occurrences:
            return 0.0
        return self.original_occurrences / self.total_occurrences

    def to_record(self) -> Dict[str, Any]:
        return {
            "window_start": self.window_start.isoformat() if self.window_start else None,
            "window_end": self.window_end.isoformat() if self.window_end else None,
            "new_tpls": len(self.new_tpls),
            "new_ptms": len(self.new_ptms),
            "new_families": len(self.new_families),
            "total_occurrences": self.total_occurrences,
            "original_occurrences": self.original_occurrences,
            "reused_occurrences": self.reused_occurrences,
            "original_fraction": self.original_fraction,
            "new_dependency_edges": self.new_dependency_edges,
        }


def _repo_pairs(family_repos: Dict[str, Set[str]]) -> Set[Tuple[str, str]]:
    return {pair for repos in family_repos.values() for pair in combinations(sorted(repos), 2)}


def delta_analyze(store: NNBOMStore, batch: NNBOMStore) -> DeltaReport:
    """Composants du lot absents de la base, et part des occurrences de modules originales."""
    versions = list(batch.versions.values())
    if not versions:
        logger.info("Lot vide, rapport nul")
        return DeltaReport(None, None)

    known_tpls = {t.name for v in store.versions.values() for t in v.tpls}
    known_ptms = {p.identity for v in store.versions.values() for p in v.ptms if p.identity}
    known_hashes = {m.module_hash for m in store.modules.values()}

    batch_tpls = {t.name for v in versions for t in v.tpls}
    batch_ptms = {p.identity for v in versions for p in v.ptms if p.identity}
    occurrences = list(batch.modules.values())
    original = sum(1 for m in occurrences if m.module_hash not in known_hashes)

    before: Dict[str, Set[str]] = {}
    for module in store.modules.values():
        before.setdefault(module.module_hash, set()).add(module.repo_id)
    after = {h: set(repos) for h, repos in before.items()}
    for module in occurrences:
        after.setdefault(module.module_hash, set()).add(module.repo_id)
    new_edges = _repo_pairs(after) - _repo_pairs(before)

    report = DeltaReport(
        window_start=min(v.release_time for v in versions),
        window_end=max(v.release_time for v in versions),
        new_tpls=sorted(batch_tpls - known_tpls),
        new_ptms=sorted(batch_ptms - known_ptms),
        new_families=sorted({m.module_hash for m in occurrences} - known_hashes),
        total_occurrences=len(occurrences),
        original_occurrences=original,
        reused_occurrences=len(occurrences) - original,
        new_dependency_edges=len(new_edges),
    )
    logger.info(
        f"Delta: {len(report.new_tpls)} TPL, {len(report.new_ptms)} PTM, "
        f"{len(report.new_families)} famille(s) nouvelles ; {report.original_fraction:.1%} d'occurrences originales"
    )
    return report
