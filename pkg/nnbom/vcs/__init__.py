"""Accès aux dépôts Git et à leurs métadonnées."""

from .git_adapter import GitRepository, GitTree, VersionRef, changed_files, enumerate_versions
from .metadata import META_FILE, MetadataResolver

__all__ = [
    "GitRepository", "GitTree", "VersionRef", "changed_files", "enumerate_versions",
    "META_FILE", "MetadataResolver",
]
