"""Table des symboles par fichier (ordre source, dernière écriture gagnante)."""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .source_parser import SourceUnit, ValueKind


@dataclass(frozen=True)
class SymbolTable:
    module: str
    strings: Dict[str, str] = field(default_factory=dict)
    aliases: Dict[str, str] = field(default_factory=dict)
    class_bases: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    star_imports: Tuple[str, ...] = ()

    def resolve_string(self, name: str) -> Optional[str]:
        """Résolution à un seul saut : nom -> littéral."""
        return self.strings.get(name)

    def expand(self, dotted: str) -> str:
        """Remplace le premier segment par le chemin complet de son alias."""
        head, sep, rest = dotted.partition(".")
        target = self.aliases.get(head)
        if target is None:
            return dotted
        return f"{target}{sep}{rest}" if rest else target


def build_symbol_table(unit: SourceUnit) -> SymbolTable:
    strings: Dict[str, str] = {}
    for assignment in unit.assignments:
        if assignment.value.kind is ValueKind.STRING:
            strings[assignment.target] = assignment.value.value
        else:
            strings.pop(assignment.target, None)

    aliases: Dict[str, str] = {}
    stars = []
    for decl in unit.imports:
        if decl.names is None:
            aliases[decl.alias or decl.path[-1]] = decl.dotted
            continue
        base = unit.absolute_module(decl)
        for imported in decl.names:
            if imported.name == "*":
                if base:
                    stars.append(base)
                continue
            aliases[imported.bound_name] = f"{base}.{imported.name}" if base else imported.name

    return SymbolTable(
        module=unit.module,
        strings=strings,
        aliases=aliases,
        class_bases={c.qualified_name: c.bases for c in unit.classes},
        star_imports=tuple(stars),
    )
