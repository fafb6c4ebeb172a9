"""Parseurs des sources Python analysées."""

from .source_parser import (
    OPAQUE,
    ArgValue,
    Assignment,
    CallSite,
    ClassDef,
    Diagnostic,
    ImportDecl,
    ImportedName,
    SourceUnit,
    ValueKind,
    module_path_for,
    parse_source,
)
from .symbol_table import SymbolTable, build_symbol_table

__all__ = [
    "OPAQUE", "ArgValue", "Assignment", "CallSite", "ClassDef", "Diagnostic",
    "ImportDecl", "ImportedName", "SourceUnit", "ValueKind", "module_path_for",
    "parse_source", "SymbolTable", "build_symbol_table",
]
