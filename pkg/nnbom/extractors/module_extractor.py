"""Extraction des modules de réseaux de neurones par point fixe d'héritage.

Une classe est un module NN si l'une de ses bases se résout vers la
racine du framework ou vers un module NN déjà connu. La résolution des
bases utilise, dans l'ordre : les alias d'import du fichier, les classes
du même fichier, les imports étoilés, la table d'export des modules
(`from x import y` repris ailleurs) et enfin un suffixe qualifié unique.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from ..parsers.source_parser import OPAQUE, ClassDef, SourceUnit
from ..parsers.symbol_table import SymbolTable, build_symbol_table

logger = logging.getLogger(__name__)

FRAMEWORK_ROOT = "torch.nn.Module"
_MAX_EXPORT_HOPS = 10


@dataclass(frozen=True)
class NNModuleDef:
    qualified_name: str
    source: str
    loc: int
    file: str
    first_line: int
    derivation_chain: Tuple[str, ...]

    @property
    def name(self) -> str:
        return self.qualified_name.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class InheritanceResult:
    modules: Tuple[NNModuleDef, ...]
    # Nombre de modules connus après chaque passe
    trace: Tuple[int, ...]


class InheritanceResolver:
    """Résolution des bases de classes sur l'ensemble des fichiers d'une version."""

    def __init__(
        self,
        units: Iterable[SourceUnit],
        tables: Optional[Mapping[str, SymbolTable]] = None,
        root: str = FRAMEWORK_ROOT,
    ):
        self.units = sorted(units, key=lambda u: u.path)
        tables = dict(tables or {})
        self.tables = {u.path: tables.get(u.path) or build_symbol_table(u) for u in self.units}
        self.root = root

        self.classes: List[Tuple[SourceUnit, ClassDef]] = [
            (unit, cls) for unit in self.units for cls in unit.classes if cls.qualified_name != root
        ]
        self.qualified: Set[str] = {cls.qualified_name for _, cls in self.classes}

        self.exports: Dict[str, str] = {}
        for unit in self.units:
            for alias, target in self.tables[unit.path].aliases.items():
                key = f"{unit.module}.{alias}" if unit.module else alias
                if key not in self.qualified and key != target:
                    self.exports[key] = target

        self._suffixes: Dict[str, Set[str]] = defaultdict(set)
        for name in self.qualified:
            parts = name.split(".")
            for i in range(1, len(parts)):
                self._suffixes[".".join(parts[i:])].add(name)

    def canonical(self, name: str) -> Optional[str]:
        """Nom de classe connu (ou racine) désigné par un chemin pointé."""
        for _ in range(_MAX_EXPORT_HOPS):
            if name == self.root or name in self.qualified:
                return name
            target = self.exports.get(name)
            if target is None:
                break
            name = target
        candidates = self._suffixes.get(name)
        if candidates and len(candidates) == 1:
            return next(iter(candidates))
        return None

    def resolve_base(self, unit: SourceUnit, base: str) -> Optional[str]:
        if base.startswith(OPAQUE):
            return None
        table = self.tables[unit.path]
        head = base.split(".", 1)[0]
        if head in table.aliases:
            candidates = [table.expand(base)]
        else:
            candidates = [f"{unit.module}.{base}" if unit.module else base]
            candidates.extend(f"{star}.{base}" for star in table.star_imports)
            candidates.append(base)
        for candidate in candidates:
            resolved = self.canonical(candidate)
            if resolved is not None:
                return resolved
        return None

    def resolve(self) -> InheritanceResult:
        resolved_bases = [
            [r for r in (self.resolve_base(unit, base) for base in cls.bases) if r is not None]
            for unit, cls in self.classes
        ]

        members: Set[str] = {self.root}
        parent: Dict[int, str] = {}
        trace: List[int] = []
        changed = True
        while changed:
            changed = False
            for index, (_, cls) in enumerate(self.classes):
                if index in parent:
                    continue
                for base in resolved_bases[index]:
                    if base in members:
                        parent[index] = base
                        members.add(cls.qualified_name)
                        changed = True
                        break
            trace.append(len(parent))

        logger.debug(f"Point fixe d'héritage atteint en {len(trace)} passe(s), {len(parent)} module(s)")

        by_name: Dict[str, int] = {}
        for index in sorted(parent):
            by_name.setdefault(self.classes[index][1].qualified_name, index)

        modules = []
        for index in sorted(parent):
            unit, cls = self.classes[index]
            modules.append(NNModuleDef(
                qualified_name=cls.qualified_name,
                source=cls.source,
                loc=cls.loc,
                file=unit.path,
                first_line=cls.first_line,
                derivation_chain=self._chain(index, parent, by_name),
            ))
        return InheritanceResult(tuple(modules), tuple(trace))

    def _chain(self, index: int, parent: Dict[int, str], by_name: Dict[str, int]) -> Tuple[str, ...]:
        chain = []
        seen = {index}
        current = parent[index]
        while current != self.root:
            chain.append(current)
            next_index = by_name.get(current)
            if next_index is None or next_index in seen:
                break
            seen.add(next_index)
            current = parent[next_index]
        chain.append(self.root)
        return tuple(chain)


def resolve_inheritance(
    units: Iterable[SourceUnit],
    tables: Optional[Mapping[str, SymbolTable]] = None,
    root: str = FRAMEWORK_ROOT,
) -> InheritanceResult:
    return InheritanceResolver(units, tables, root).resolve()


def extract_nn_modules(
    units: Iterable[SourceUnit],
    tables: Optional[Mapping[str, SymbolTable]] = None,
    root: str = FRAMEWORK_ROOT,
) -> List[NNModuleDef]:
    """Modules NN d'une version (la racine du framework exclue)."""
    return list(resolve_inheritance(units, tables, root).modules)
