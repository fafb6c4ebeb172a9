"""Extracteurs de composants : TPL, PTM et modules NN."""

from .module_extractor import (
    FRAMEWORK_ROOT,
    InheritanceResolver,
    InheritanceResult,
    NNModuleDef,
    extract_nn_modules,
    resolve_inheritance,
)
from .ptm_detector import CatalogEntry, PtmPatternCatalog, detect_ptms
from .tpl_extractor import (
    ImportKind,
    RepoLayout,
    classify_import,
    external_import_roots,
    extract_config_tpls,
    merge_tpls,
    normalize_package_name,
)
from .version_extractor import VersionExtraction, VersionExtractor, incremental_extract

__all__ = [
    "FRAMEWORK_ROOT", "InheritanceResolver", "InheritanceResult", "NNModuleDef",
    "extract_nn_modules", "resolve_inheritance", "CatalogEntry", "PtmPatternCatalog",
    "detect_ptms", "ImportKind", "RepoLayout", "classify_import", "external_import_roots",
    "extract_config_tpls", "merge_tpls", "normalize_package_name", "VersionExtraction",
    "VersionExtractor", "incremental_extract",
]
