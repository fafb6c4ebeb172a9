"""NNBOM - Nomenclature des composants de réseaux de neurones (TPL, PTM, modules NN)."""

__version__ = "1.0.0"
__author__ = "NNBOM Team"

from .main import NNBOMImporter
from .config import Config

__all__ = ["NNBOMImporter", "Config"]
