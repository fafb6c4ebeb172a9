"""Stockage de la base NNBOM (répertoire de fichiers JSON Lines)."""

from .connection import StoreManager
from .operations import SIZE_BUCKETS, StagedModule, StagedVersion, StoreOperations, size_bucket
from .store import NNBOMStore

__all__ = [
    "StoreManager", "SIZE_BUCKETS", "StagedModule", "StagedVersion", "StoreOperations",
    "size_bucket", "NNBOMStore",
]
