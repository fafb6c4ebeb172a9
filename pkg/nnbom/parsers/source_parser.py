"""Parseur structurel tolérant aux erreurs pour les sources Python.

Le parseur ne retient que les nœuds utiles aux extracteurs : imports,
définitions de classes (avec leurs bases), affectations et appels. Un
fichier bien formé est analysé d'un seul bloc ; sinon il est découpé en
instructions de premier niveau (regroupement par indentation) et chaque
instruction illisible est ignorée avec un diagnostic, sans jamais
interrompre le fichier.
"""

import ast
import logging
import re
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

logger = logging.getLogger(__name__)

OPAQUE = "<opaque>"

# Nombre maximal d'instructions fusionnées pour retrouver une instruction
# multi-lignes dont les lignes de continuation commencent en colonne 0.
_MAX_MERGE = 40
_MAX_PREFIX = 200

_LINE_RE = re.compile(r".*?(?:\r\n|\r|\n)|.+\Z", re.DOTALL)
_CLAUSE_RE = re.compile(r"(else|elif|except|finally)\b")


class ValueKind(str, Enum):
    STRING = "string"
    NAME = "name"
    OPAQUE = "opaque"


@dataclass(frozen=True)
class ArgValue:
    """Valeur d'argument ou d'affectation : littéral, nom ou opaque."""

    kind: ValueKind
    value: Optional[str] = None


OPAQUE_VALUE = ArgValue(ValueKind.OPAQUE)


@dataclass(frozen=True)
class ImportedName:
    name: str
    alias: Optional[str] = None

    @property
    def bound_name(self) -> str:
        return self.alias or self.name


@dataclass(frozen=True)
class ImportDecl:
    """Une instruction `import` ou `from ... import`."""

    path: Tuple[str, ...]
    alias: Optional[str] = None
    level: int = 0
    names: Optional[Tuple[ImportedName, ...]] = None
    line: int = 0

    @property
    def dotted(self) -> str:
        return ".".join(self.path)

    @property
    def root(self) -> Optional[str]:
        return self.path[0] if self.path else None

    @property
    def is_star(self) -> bool:
        return bool(self.names) and any(n.name == "*" for n in self.names)


@dataclass(frozen=True)
class ClassDef:
    name: str
    bases: Tuple[str, ...]
    source: str
    first_line: int
    last_line: int
    qualified_name: str

    @property
    def loc(self) -> int:
        return self.last_line - self.first_line + 1


@dataclass(frozen=True)
class Assignment:
    target: str
    value: ArgValue
    line: int


@dataclass(frozen=True)
class CallSite:
    callee: str
    args: Tuple[ArgValue, ...] = ()
    kwargs: Tuple[Tuple[str, ArgValue], ...] = ()
    line: int = 0

    def keyword(self, name: str) -> Optional[ArgValue]:
        for key, value in self.kwargs:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str


@dataclass(frozen=True)
class SourceUnit:
    """Analyse structurelle d'un fichier source."""

    path: str
    module: str
    is_package: bool = False
    imports: Tuple[ImportDecl, ...] = ()
    classes: Tuple[ClassDef, ...] = ()
    assignments: Tuple[Assignment, ...] = ()
    calls: Tuple[CallSite, ...] = ()
    diagnostics: Tuple[Diagnostic, ...] = ()

    def absolute_module(self, decl: ImportDecl) -> str:
        """Chemin absolu du module importé (résout les imports relatifs)."""
        if decl.level == 0:
            return decl.dotted
        package = self.module.split(".") if self.module else []
        if not self.is_package:
            package = package[:-1]
        drop = decl.level - 1
        base = package[:len(package) - drop] if drop <= len(package) else []
        return ".".join(base + list(decl.path))


def module_path_for(path: str) -> Tuple[str, bool]:
    """Convertit un chemin relatif au dépôt en chemin de module pointé."""
    normalized = path.replace("\\", "/")
    if normalized.endswith(".py"):
        normalized = normalized[:-3]
    parts = [part for part in normalized.split("/") if part and part != "."]
    is_package = bool(parts) and parts[-1] == "__init__"
    if is_package:
        parts = parts[:-1]
    return ".".join(parts), is_package


def split_lines(text: str) -> List[str]:
    """Découpe en lignes (fins de ligne conservées) comme le fait `ast`."""
    return _LINE_RE.findall(text)


def parse_source(text: Union[bytes, str], path: str) -> SourceUnit:
    """Analyse un fichier source et retourne son SourceUnit."""
    module, is_package = module_path_for(path)
    diagnostics: List[Diagnostic] = []

    source, decode_issue = _decode(text)
    if decode_issue:
        diagnostics.append(decode_issue)

    lines = split_lines(source)
    collector = _UnitCollector(module, lines)

    tree, _ = _try_parse(source)
    if tree is not None:
        collector.visit(tree)
    else:
        for chunk_tree in _parse_resilient(lines, diagnostics):
            collector.visit(chunk_tree)

    if diagnostics:
        logger.debug(f"{path}: {len(diagnostics)} diagnostic(s)")

    return SourceUnit(
        path=path,
        module=module,
        is_package=is_package,
        imports=tuple(collector.imports),
        classes=tuple(collector.classes),
        assignments=tuple(a for _, _, a in sorted(collector.assignments, key=lambda x: (x[0], x[1]))),
        calls=tuple(c for _, _, c in sorted(collector.calls, key=lambda x: (x[0], x[1]))),
        diagnostics=tuple(diagnostics),
    )


def _decode(text: Union[bytes, str]) -> Tuple[str, Optional[Diagnostic]]:
    if isinstance(text, str):
        return text, None
    try:
        return text.decode("utf-8-sig"), None
    except UnicodeDecodeError as e:
        line = text[:e.start].count(b"\n") + 1
        return (
            text.decode("utf-8-sig", errors="replace"),
            Diagnostic(line, "contenu non UTF-8, caractères remplacés"),
        )


def _try_parse(source: str) -> Tuple[Optional[ast.Module], Optional[Tuple[int, str]]]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            return ast.parse(source), None
        except SyntaxError as e:
            return None, (e.lineno or 1, e.msg or "erreur de syntaxe")
        except (ValueError, RecursionError, MemoryError) as e:
            return None, (1, str(e))


def _split_chunks(lines: List[str]) -> List[Tuple[int, int]]:
    """Regroupe les lignes en instructions de premier niveau."""
    starts: List[int] = []
    previous_significant = ""
    for index, line in enumerate(lines):
        stripped = line.rstrip("\r\n")
        if not stripped.strip():
            continue
        is_start = (
            stripped[0] not in " \t#)]}"
            and not _CLAUSE_RE.match(stripped)
            and not previous_significant.startswith("@")
        )
        if is_start or not starts:
            starts.append(index)
        if stripped[0] != "#":
            previous_significant = stripped
    if not starts:
        return []
    bounds = starts[1:] + [len(lines)]
    return list(zip(starts, bounds))


def _parse_resilient(lines: List[str], diagnostics: List[Diagnostic]) -> List[ast.Module]:
    trees: List[ast.Module] = []
    chunks = _split_chunks(lines)
    i = 0
    while i < len(chunks):
        start = chunks[i][0]
        recovered = False
        for j in range(i, min(len(chunks), i + _MAX_MERGE)):
            tree, _ = _try_parse("".join(lines[start:chunks[j][1]]))
            if tree is not None:
                ast.increment_lineno(tree, start)
                trees.append(tree)
                i = j + 1
                recovered = True
                break
        if recovered:
            continue

        end = chunks[i][1]
        _, error = _try_parse("".join(lines[start:end]))
        line, message = error or (1, "erreur de syntaxe")
        diagnostics.append(Diagnostic(start + line, f"instruction ignorée: {message}"))

        # Plus long préfixe analysable : une classe suivie de lignes
        # parasites garde ses imports et sa définition.
        for stop in range(end - 1, max(start, end - _MAX_PREFIX), -1):
            tree, _ = _try_parse("".join(lines[start:stop]))
            if tree is not None:
                ast.increment_lineno(tree, start)
                trees.append(tree)
                break
        i += 1
    return trees


def _dotted_name(node: ast.AST) -> str:
    if isinstance(node, ast.Name):
        return node.id
    if isinstance(node, ast.Attribute):
        return f"{_dotted_name(node.value)}.{node.attr}"
    return OPAQUE


def _arg_value(node: ast.AST) -> ArgValue:
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return ArgValue(ValueKind.STRING, node.value)
    if isinstance(node, ast.JoinedStr) and all(
        isinstance(part, ast.Constant) and isinstance(part.value, str) for part in node.values
    ):
        return ArgValue(ValueKind.STRING, "".join(part.value for part in node.values))
    if isinstance(node, ast.Name):
        return ArgValue(ValueKind.NAME, node.id)
    return OPAQUE_VALUE


class _UnitCollector(ast.NodeVisitor):
    """Parcours de l'arbre qui collecte les quatre types de nœuds."""

    def __init__(self, module: str, lines: List[str]):
        self.module = module
        self.lines = lines
        self.imports: List[ImportDecl] = []
        self.classes: List[ClassDef] = []
        self.assignments: List[Tuple[int, int, Assignment]] = []
        self.calls: List[Tuple[int, int, CallSite]] = []
        self._class_stack: List[str] = []

    def visit_Import(self, node: ast.Import):
        for alias in node.names:
            path = tuple(alias.name.split("."))
            self.imports.append(ImportDecl(path=path, alias=alias.asname or path[-1], line=node.lineno))

    def visit_ImportFrom(self, node: ast.ImportFrom):
        path = tuple(node.module.split(".")) if node.module else ()
        names = tuple(ImportedName(a.name, a.asname) for a in node.names)
        self.imports.append(ImportDecl(path=path, level=node.level or 0, names=names, line=node.lineno))

    def visit_ClassDef(self, node: ast.ClassDef):
        first = min([node.lineno] + [d.lineno for d in node.decorator_list])
        last = max(first, node.end_lineno or node.lineno)
        nested = ".".join(self._class_stack + [node.name])
        self.classes.append(ClassDef(
            name=node.name,
            bases=tuple(_dotted_name(base) for base in node.bases),
            source="".join(self.lines[first - 1:last]),
            first_line=first,
            last_line=last,
            qualified_name=f"{self.module}.{nested}" if self.module else nested,
        ))
        self._class_stack.append(node.name)
        self.generic_visit(node)
        self._class_stack.pop()

    def visit_FunctionDef(self, node):
        # Une classe locale à une fonction est qualifiée par son seul module.
        saved, self._class_stack = self._class_stack, []
        self.generic_visit(node)
        self._class_stack = saved

    visit_AsyncFunctionDef = visit_FunctionDef

    def visit_Assign(self, node: ast.Assign):
        for target in node.targets:
            self._record_target(target, node.value, node)
        self.generic_visit(node)

    def visit_AnnAssign(self, node: ast.AnnAssign):
        if node.value is not None:
            self._record_target(node.target, node.value, node)
        self.generic_visit(node)

    def visit_AugAssign(self, node: ast.AugAssign):
        self._record_target(node.target, None, node)
        self.generic_visit(node)

    def visit_NamedExpr(self, node: ast.NamedExpr):
        self._record_target(node.target, node.value, node)
        self.generic_visit(node)

    def visit_For(self, node):
        self._record_target(node.target, None, node)
        self.generic_visit(node)

    visit_AsyncFor = visit_For

    def visit_withitem(self, node: ast.withitem):
        if node.optional_vars is not None:
            self._record_target(node.optional_vars, None, node.context_expr)
        self.generic_visit(node)

    def _record_target(self, target: ast.AST, value: Optional[ast.AST], anchor: ast.AST):
        if isinstance(target, ast.Name):
            resolved = _arg_value(value) if value is not None else OPAQUE_VALUE
            self.assignments.append(
                (anchor.lineno, anchor.col_offset, Assignment(target.id, resolved, anchor.lineno))
            )
        elif isinstance(target, (ast.Tuple, ast.List)):
            paired = (
                isinstance(value, (ast.Tuple, ast.List))
                and len(value.elts) == len(target.elts)
                and not any(isinstance(e, ast.Starred) for e in target.elts)
            )
            for index, element in enumerate(target.elts):
                if isinstance(element, ast.Starred):
                    element = element.value
                self._record_target(element, value.elts[index] if paired else None, anchor)

    def visit_Call(self, node: ast.Call):
        args = tuple(
            OPAQUE_VALUE if isinstance(arg, ast.Starred) else _arg_value(arg) for arg in node.args
        )
        kwargs: Dict[str, ArgValue] = {}
        for keyword in node.keywords:
            if keyword.arg is not None:
                kwargs[keyword.arg] = _arg_value(keyword.value)
        self.calls.append((node.lineno, node.col_offset, CallSite(
            callee=_dotted_name(node.func),
            args=args,
            kwargs=tuple(kwargs.items()),
            line=node.lineno,
        )))
        self.generic_visit(node)
