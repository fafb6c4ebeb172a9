"""Exceptions de la boîte à outils NNBOM."""


class NNBOMError(Exception):
    """Erreur de données NNBOM (code de sortie 2 côté CLI)."""


class NotARepositoryError(NNBOMError):
    """Le chemin fourni n'est pas un dépôt Git."""


class StoreError(NNBOMError):
    """Base NNBOM absente, illisible ou incohérente."""


class CatalogError(NNBOMError):
    """Ligne invalide dans le catalogue des invocations PTM."""


class TaxonomyError(NNBOMError):
    """Fichier de mots-clés de domaines invalide."""


class MetadataError(NNBOMError):
    """Métadonnées de dépôt invalides."""
