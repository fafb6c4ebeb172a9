#!/usr/bin/env python3
"""Script de lancement direct pour l'outil NNBOM."""

import sys
import os

# Ajouter le répertoire courant au PYTHONPATH
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# Import et lancement
from nnbom.main import main

if __name__ == '__main__':
    sys.exit(main())
