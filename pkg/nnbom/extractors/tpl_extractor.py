"""Extraction des bibliothèques tierces (TPL).

Deux sources sont combinées : les fichiers de configuration du projet, qui
portent les versions, et les instructions `import`, qui couvrent les
dépendances non déclarées. Les informations de configuration sont
prioritaires.
"""

import ast
import configparser
import logging
import re
import sys
from collections import defaultdict
from enum import Enum
from pathlib import PurePosixPath
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from packaging.requirements import InvalidRequirement, Requirement

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..models import TplDependency, TplSource
from ..parsers.source_parser import ImportDecl, SourceUnit

logger = logging.getLogger(__name__)

STDLIB_MODULES = frozenset(sys.stdlib_module_names) | {"__future__"}

_BARE_VERSION_RE = re.compile(r"^\d[\w.]*$")


class ImportKind(str, Enum):
    LOCAL = "local"
    EXTERNAL = "external"


def normalize_package_name(name: str) -> str:
    return name.strip().lower().replace("_", "-")


class RepoLayout:
    """Entrées d'une version : premier niveau et contenu de chaque répertoire."""

    def __init__(self, paths: Iterable[str]):
        self.top_level: Set[str] = set()
        self._by_directory: Dict[str, Set[str]] = defaultdict(set)
        for path in paths:
            parts = PurePosixPath(path).parts
            for depth, name in enumerate(parts):
                if depth == len(parts) - 1:
                    if not name.endswith(".py"):
                        continue
                    name = name[:-3]
                directory = "/".join(parts[:depth])
                self._by_directory[directory].add(name)
                if depth == 0:
                    self.top_level.add(name)

    def local_names(self, path: str) -> Set[str]:
        """Noms locaux visibles depuis un fichier : premier niveau et voisins."""
        directory = str(PurePosixPath(path).parent)
        if directory == ".":
            directory = ""
        return self.top_level | self._by_directory.get(directory, set())


def classify_import(decl: ImportDecl, layout: Set[str]) -> ImportKind:
    if decl.level > 0 or decl.root is None:
        return ImportKind.LOCAL
    return ImportKind.LOCAL if decl.root in layout else ImportKind.EXTERNAL


def external_import_roots(
    units: Iterable[SourceUnit],
    layout: RepoLayout,
    exclude_stdlib: bool = True,
) -> List[str]:
    """Racines des imports externes, normalisées, sans la bibliothèque standard."""
    roots: Set[str] = set()
    for unit in units:
        local = layout.local_names(unit.path)
        for decl in unit.imports:
            if classify_import(decl, local) is not ImportKind.EXTERNAL:
                continue
            if exclude_stdlib and decl.root in STDLIB_MODULES:
                continue
            roots.add(normalize_package_name(decl.root))
    return sorted(roots)


def merge_tpls(config: Iterable[TplDependency], imported: Iterable[str]) -> List[TplDependency]:
    merged: Dict[str, TplDependency] = {tpl.name: tpl for tpl in config}
    for raw_name in imported:
        name = normalize_package_name(raw_name)
        existing = merged.get(name)
        if existing is None:
            merged[name] = TplDependency(name=name, source=TplSource.IMPORT)
        elif existing.source is TplSource.CONFIG:
            merged[name] = TplDependency(name=name, version=existing.version, source=TplSource.BOTH)
    return [merged[name] for name in sorted(merged)]


def is_config_file(path: str) -> bool:
    pure = PurePosixPath(path)
    name = pure.name
    if name in ("setup.py", "setup.cfg", "pyproject.toml"):
        return True
    if not name.endswith(".txt"):
        return False
    return name.startswith("requirements") or pure.parent.name == "requirements"


def parse_requirement(spec: str) -> Optional[Tuple[str, Optional[str]]]:
    """Nom normalisé et version épinglée (`==`) d'une exigence PEP 508."""
    try:
        requirement = Requirement(spec)
    except InvalidRequirement:
        return None
    version = None
    for specifier in sorted(requirement.specifier, key=str):
        if specifier.operator in ("==", "===") and "*" not in specifier.version:
            version = specifier.version
            break
    return normalize_package_name(requirement.name), version


def extract_config_tpls(
    tree: Mapping[str, bytes],
    diagnostics: Optional[List[str]] = None,
) -> List[TplDependency]:
    """TPL déclarées dans les fichiers de configuration d'une version."""
    if diagnostics is None:
        diagnostics = []
    found: Dict[str, Optional[str]] = {}

    for path in sorted(p for p in tree if is_config_file(p)):
        try:
            text = tree[path].decode("utf-8", errors="replace")
        except Exception as e:
            diagnostics.append(f"{path}: lecture impossible ({e})")
            continue

        name = PurePosixPath(path).name
        if name == "setup.py":
            entries = _setup_py_requirements(text, path, diagnostics)
        elif name == "setup.cfg":
            entries = _setup_cfg_requirements(text, path, diagnostics)
        elif name == "pyproject.toml":
            entries = _pyproject_requirements(text, path, diagnostics)
        else:
            entries = _requirements_txt_lines(text)

        for line, spec in entries:
            parsed = parse_requirement(spec)
            if parsed is None:
                diagnostics.append(f"{path}:{line}: exigence illisible '{spec}'")
                continue
            package, version = parsed
            if package not in found or (found[package] is None and version):
                found[package] = version

    logger.debug(f"{len(found)} TPL déclarées dans la configuration")
    return [
        TplDependency(name=package, version=version, source=TplSource.CONFIG)
        for package, version in sorted(found.items())
    ]


def _requirements_txt_lines(text: str) -> List[Tuple[int, str]]:
    entries = []
    pending = ""
    pending_line = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        if not pending:
            pending_line = number
        line = raw.rstrip()
        if line.endswith("\\"):
            pending += line[:-1] + " "
            continue
        line = pending + line
        pending = ""
        line = re.split(r"(?:^|\s)#", line, maxsplit=1)[0]
        line = re.split(r"\s--?\w", line, maxsplit=1)[0].strip()
        # Options pip (-r, -e, --index-url...) : pas une dépendance
        if not line or line.startswith("-"):
            continue
        entries.append((pending_line, line))
    return entries


def _setup_py_requirements(text: str, path: str, diagnostics: List[str]) -> List[Tuple[int, str]]:
    try:
        tree = ast.parse(text)
    except (SyntaxError, ValueError) as e:
        diagnostics.append(f"{path}: setup.py illisible ({e})")
        return []

    bindings: Dict[str, ast.AST] = {}
    for node in tree.body:
        if isinstance(node, ast.Assign):
            for target in node.targets:
                if isinstance(target, ast.Name):
                    bindings[target.id] = node.value

    entries: List[Tuple[int, str]] = []
    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        func = node.func
        func_name = func.attr if isinstance(func, ast.Attribute) else getattr(func, "id", "")
        if func_name != "setup":
            continue
        for keyword in node.keywords:
            if keyword.arg != "install_requires":
                continue
            value = keyword.value
            if isinstance(value, ast.Name):
                value = bindings.get(value.id, value)
            if not isinstance(value, (ast.List, ast.Tuple)):
                diagnostics.append(f"{path}:{keyword.value.lineno}: install_requires non littéral")
                continue
            for element in value.elts:
                if isinstance(element, ast.Constant) and isinstance(element.value, str):
                    entries.append((element.lineno, element.value.strip()))
    return entries


def _setup_cfg_requirements(text: str, path: str, diagnostics: List[str]) -> List[Tuple[int, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        diagnostics.append(f"{path}: setup.cfg illisible ({e})")
        return []
    raw = parser.get("options", "install_requires", fallback="")
    return [(0, line.strip()) for line in raw.splitlines() if line.strip() and not line.strip().startswith("#")]


def _pyproject_requirements(text: str, path: str, diagnostics: List[str]) -> List[Tuple[int, str]]:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        diagnostics.append(f"{path}: pyproject.toml illisible ({e})")
        return []

    entries = [(0, spec) for spec in data.get("project", {}).get("dependencies", []) if isinstance(spec, str)]

    poetry = data.get("tool", {}).get("poetry", {}).get("dependencies", {})
    for name, constraint in sorted(poetry.items()):
        if name.lower() == "python":
            continue
        if isinstance(constraint, dict):
            constraint = constraint.get("version", "")
        if isinstance(constraint, str) and _BARE_VERSION_RE.match(constraint.strip()):
            entries.append((0, f"{name}=={constraint.strip()}"))
        else:
            entries.append((0, name))
    return entries
