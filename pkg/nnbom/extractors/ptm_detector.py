"""Détection des invocations de modèles pré-entraînés (PTM).

Un appel est comparé, après développement de ses alias d'import, aux
motifs d'un catalogue déclaratif. L'argument désigné par le catalogue
donne le chemin du modèle : littéral direct, ou résolu en un saut par la
table des symboles du fichier.
"""

import fnmatch
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, List, Mapping, Optional, Tuple, Union

from ..exceptions import CatalogError
from ..models import Hub, PtmInvocation, Resolution
from ..parsers.source_parser import ArgValue, CallSite, SourceUnit, ValueKind
from ..parsers.symbol_table import SymbolTable, build_symbol_table

logger = logging.getLogger(__name__)

DEFAULT_CATALOG = "ptm_catalog.tsv"


@dataclass(frozen=True)
class ArgSelector:
    kind: str
    key: Union[int, str]

    @classmethod
    def parse(cls, text: str) -> "ArgSelector":
        kind, sep, key = text.strip().partition(":")
        if not sep or not key:
            raise ValueError(f"sélecteur invalide '{text}'")
        if kind == "pos":
            if not key.isdigit():
                raise ValueError(f"position invalide '{text}'")
            return cls("pos", int(key))
        if kind == "kw":
            if not key.isidentifier():
                raise ValueError(f"nom d'argument invalide '{text}'")
            return cls("kw", key)
        raise ValueError(f"type de sélecteur inconnu '{kind}'")

    def pick(self, call: CallSite) -> Optional[ArgValue]:
        if self.kind == "pos":
            return call.args[self.key] if self.key < len(call.args) else None
        return call.keyword(self.key)

    def __str__(self) -> str:
        return f"{self.kind}:{self.key}"


@dataclass(frozen=True)
class CatalogEntry:
    hub: Hub
    pattern: str
    selectors: Tuple[ArgSelector, ...]
    line: int = 0

    def matches(self, callee: str) -> bool:
        if any(ch in self.pattern for ch in "*?["):
            return fnmatch.fnmatchcase(callee, self.pattern)
        if self.pattern.startswith("."):
            return callee.endswith(self.pattern)
        return callee == self.pattern or callee.endswith("." + self.pattern)

    def pick(self, call: CallSite) -> Optional[ArgValue]:
        for selector in self.selectors:
            value = selector.pick(call)
            if value is not None:
                return value
        return None

    def to_line(self) -> str:
        return "\t".join([self.hub.value, self.pattern, ",".join(str(s) for s in self.selectors)])


class PtmPatternCatalog:
    """Catalogue ordonné des motifs d'appel ; la première entrée qui correspond gagne."""

    def __init__(self, entries: Iterable[CatalogEntry], source: str = "<mémoire>"):
        self.entries: List[CatalogEntry] = list(entries)
        self.source = source

    @classmethod
    def from_text(cls, text: str, source: str = "<texte>") -> "PtmPatternCatalog":
        entries = []
        errors = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f for f in line.split("\t") if f.strip()]
            if len(fields) != 3:
                errors.append(f"{source}:{number}: 3 champs séparés par des tabulations attendus")
                continue
            hub_name, pattern, selector_text = (f.strip() for f in fields)
            try:
                hub = Hub(hub_name)
            except ValueError:
                errors.append(f"{source}:{number}: hub inconnu '{hub_name}'")
                continue
            try:
                selectors = tuple(ArgSelector.parse(s) for s in selector_text.split(","))
            except ValueError as e:
                errors.append(f"{source}:{number}: {e}")
                continue
            entries.append(CatalogEntry(hub, pattern, selectors, number))

        if errors:
            raise CatalogError("catalogue PTM invalide:\n" + "\n".join(errors))
        return cls(entries, source)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PtmPatternCatalog":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise CatalogError(f"lecture du catalogue {path} impossible: {e}") from e
        return cls.from_text(text, str(path))

    @classmethod
    def default(cls) -> "PtmPatternCatalog":
        text = (resources.files("nnbom") / "data" / DEFAULT_CATALOG).read_text(encoding="utf-8")
        return cls.from_text(text, DEFAULT_CATALOG)

    def match(self, callee: str) -> Optional[CatalogEntry]:
        for entry in self.entries:
            if entry.matches(callee):
                return entry
        return None

    def validate(self) -> List[str]:
        """Avertissements non bloquants : motifs dupliqués ou masqués."""
        warnings = []
        seen = {}
        for entry in self.entries:
            if entry.pattern in seen:
                warnings.append(
                    f"ligne {entry.line}: motif '{entry.pattern}' déjà défini ligne {seen[entry.pattern]}"
                )
                continue
            seen[entry.pattern] = entry.line
            probe = ("x" + entry.pattern if entry.pattern.startswith(".") else entry.pattern).replace("*", "x")
            first = self.match(probe)
            if first is not None and first is not entry and first.line < entry.line:
                warnings.append(
                    f"ligne {entry.line}: motif '{entry.pattern}' masqué par '{first.pattern}'"
                )
        return warnings

    def to_text(self) -> str:
        return "".join(entry.to_line() + "\n" for entry in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def ptm_sort_key(ptm: PtmInvocation):
    return (ptm.file, ptm.line, ptm.hub.value, ptm.model_path or "")


def detect_unit_ptms(
    unit: SourceUnit,
    table: SymbolTable,
    catalog: PtmPatternCatalog,
) -> List[PtmInvocation]:
    found = []
    for call in unit.calls:
        entry = catalog.match(table.expand(call.callee))
        if entry is None:
            continue

        value = entry.pick(call)
        model_path, resolution = None, Resolution.UNRESOLVED
        if value is not None and value.kind is ValueKind.STRING:
            model_path, resolution = value.value, Resolution.LITERAL
        elif value is not None and value.kind is ValueKind.NAME:
            resolved = table.resolve_string(value.value)
            if resolved is not None:
                model_path, resolution = resolved, Resolution.SYMBOL_TABLE

        found.append(PtmInvocation(
            hub=entry.hub,
            model_path=model_path,
            file=unit.path,
            line=call.line,
            resolution=resolution,
        ))
    return found


def detect_ptms(
    units: Iterable[SourceUnit],
    tables: Optional[Mapping[str, SymbolTable]] = None,
    catalog: Optional[PtmPatternCatalog] = None,
) -> List[PtmInvocation]:
    """Invocations de PTM de l'ensemble des fichiers d'une version."""
    if catalog is None:
        catalog = PtmPatternCatalog.default()
    tables = tables or {}
    invocations = []
    for unit in units:
        table = tables.get(unit.path) or build_symbol_table(unit)
        invocations.extend(detect_unit_ptms(unit, table, catalog))

    unresolved = sum(1 for p in invocations if p.resolution is Resolution.UNRESOLVED)
    if unresolved:
        logger.debug(f"{unresolved} invocation(s) PTM non résolue(s)")
    return sorted(invocations, key=ptm_sort_key)
