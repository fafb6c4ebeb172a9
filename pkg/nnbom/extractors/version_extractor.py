"""Extraction des composants d'une version : TPL, PTM et modules NN.

L'extraction incrémentale ne réanalyse que les fichiers modifiés depuis la
version précédente ; le point fixe d'héritage et la détection des PTM
sont recalculés sur l'ensemble fusionné, ce qui rend le résultat
identique à une extraction complète.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from ..models import PtmInvocation, TplDependency
from ..parsers.source_parser import SourceUnit, parse_source
from ..parsers.symbol_table import SymbolTable, build_symbol_table
from .module_extractor import FRAMEWORK_ROOT, InheritanceResolver, NNModuleDef
from .ptm_detector import PtmPatternCatalog, detect_ptms
from .tpl_extractor import RepoLayout, external_import_roots, extract_config_tpls, merge_tpls

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VersionExtraction:
    """Résultat d'extraction d'une version, réutilisable par la suivante."""

    units: Dict[str, SourceUnit]
    tables: Dict[str, SymbolTable]
    paths: Tuple[str, ...]
    config_tpls: Tuple[TplDependency, ...]
    tpls: Tuple[TplDependency, ...]
    ptms: Tuple[PtmInvocation, ...]
    modules: Tuple[NNModuleDef, ...]
    trace: Tuple[int, ...] = ()
    diagnostics: Tuple[str, ...] = field(default=())


class VersionExtractor:
    """Extraction complète ou incrémentale d'une version de dépôt."""

    def __init__(
        self,
        catalog: Optional[PtmPatternCatalog] = None,
        root: str = FRAMEWORK_ROOT,
        exclude_stdlib: bool = True,
        num_workers: int = 1,
    ):
        self.catalog = catalog if catalog is not None else PtmPatternCatalog.default()
        self.root = root
        self.exclude_stdlib = exclude_stdlib
        self.num_workers = max(1, num_workers)

    def parse_files(self, files: Mapping[str, bytes]) -> Dict[str, SourceUnit]:
        paths = sorted(p for p in files if p.endswith(".py"))
        if self.num_workers > 1 and len(paths) > 1:
            with ThreadPoolExecutor(max_workers=self.num_workers) as pool:
                units = list(pool.map(lambda p: parse_source(files[p], p), paths))
        else:
            units = [parse_source(files[p], p) for p in paths]
        return {unit.path: unit for unit in units}

    def extract(self, tree: Mapping[str, bytes]) -> VersionExtraction:
        units = self.parse_files(tree)
        config_diagnostics: List[str] = []
        config_tpls = extract_config_tpls(tree, config_diagnostics)
        return self._assemble(units, {}, sorted(tree), config_tpls, config_diagnostics)

    def incremental(
        self,
        previous: Optional[VersionExtraction],
        changed: Iterable[str],
        new_units: Mapping[str, SourceUnit],
        tree: Optional[Mapping[str, bytes]] = None,
    ) -> VersionExtraction:
        if previous is None:
            if tree is not None:
                logger.debug("Pas d'état précédent, extraction complète")
                return self.extract(tree)
            previous = VersionExtraction({}, {}, (), (), (), (), ())

        changed = set(changed)
        units = {p: u for p, u in previous.units.items() if p not in changed}
        units.update(new_units)
        tables = {p: t for p, t in previous.tables.items() if p in units and p not in new_units}

        config_diagnostics: List[str] = []
        if tree is not None:
            paths = sorted(tree)
            config_tpls = extract_config_tpls(tree, config_diagnostics)
        else:
            deleted = changed - set(new_units)
            paths = sorted((set(previous.paths) - deleted) | set(new_units))
            config_tpls = list(previous.config_tpls)

        logger.debug(f"Extraction incrémentale : {len(changed)} fichier(s) modifié(s)")
        return self._assemble(units, tables, paths, config_tpls, config_diagnostics)

    def _assemble(
        self,
        units: Dict[str, SourceUnit],
        tables: Dict[str, SymbolTable],
        paths: List[str],
        config_tpls: List[TplDependency],
        config_diagnostics: List[str],
    ) -> VersionExtraction:
        units = {p: units[p] for p in sorted(units)}
        tables = {p: tables.get(p) or build_symbol_table(u) for p, u in units.items()}

        inheritance = InheritanceResolver(units.values(), tables, self.root).resolve()
        ptms = detect_ptms(units.values(), tables, self.catalog)
        imported = external_import_roots(units.values(), RepoLayout(paths), self.exclude_stdlib)
        tpls = merge_tpls(config_tpls, imported)

        diagnostics = [
            f"{unit.path}:{d.line}: {d.message}" for unit in units.values() for d in unit.diagnostics
        ]
        diagnostics.extend(config_diagnostics)

        return VersionExtraction(
            units=units,
            tables=tables,
            paths=tuple(paths),
            config_tpls=tuple(config_tpls),
            tpls=tuple(tpls),
            ptms=tuple(ptms),
            modules=inheritance.modules,
            trace=inheritance.trace,
            diagnostics=tuple(diagnostics),
        )


def incremental_extract(
    previous: Optional[VersionExtraction],
    changed: Iterable[str],
    new_units: Mapping[str, SourceUnit],
    tree: Optional[Mapping[str, bytes]] = None,
    extractor: Optional[VersionExtractor] = None,
) -> VersionExtraction:
    return (extractor or VersionExtractor()).incremental(previous, changed, new_units, tree)


def changed_units(
    extractor: VersionExtractor,
    tree: Mapping[str, bytes],
    changed: Set[str],
) -> Dict[str, SourceUnit]:
    """Réanalyse des fichiers modifiés encore présents dans la version."""
    present = {p: tree[p] for p in sorted(changed) if p.endswith(".py") and p in tree}
    return extractor.parse_files(present)
