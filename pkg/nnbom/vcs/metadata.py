"""Métadonnées des dépôts : fichier `.nnbom-meta.json` ou manifeste de corpus."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError

from ..exceptions import MetadataError
from ..models import RepoMeta
from .git_adapter import GitRepository

logger = logging.getLogger(__name__)

META_FILE = ".nnbom-meta.json"


def _parse_meta(data: Dict[str, Any], source: str) -> RepoMeta:
    fields = {k: v for k, v in data.items() if k != "path"}
    try:
        return RepoMeta(**fields)
    except ValidationError as e:
        raise MetadataError(f"{source}: métadonnées invalides ({e.error_count()} erreur(s)): {e}") from e


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise MetadataError(f"{path}: lecture impossible ({e})") from e


class MetadataResolver:
    """Retrouve les métadonnées d'un dépôt : fichier local, puis manifeste, puis repli."""

    def __init__(self, manifest: Optional[Union[str, Path]] = None):
        self.by_path: Dict[Path, Dict[str, Any]] = {}
        self.by_name: Dict[str, Dict[str, Any]] = {}
        self.manifest = Path(manifest) if manifest else None
        if self.manifest is not None:
            self._load_manifest(self.manifest)

    def _load_manifest(self, manifest: Path):
        data = _read_json(manifest)
        entries = data.get("repositories", []) if isinstance(data, dict) else data
        if not isinstance(entries, list):
            raise MetadataError(f"{manifest}: liste de dépôts attendue")

        for entry in entries:
            if not isinstance(entry, dict) or "repo_id" not in entry:
                raise MetadataError(f"{manifest}: entrée sans repo_id: {entry!r}")
            if entry.get("path"):
                self.by_path[(manifest.parent / entry["path"]).resolve()] = entry
            self.by_name[entry["repo_id"]] = entry
            self.by_name.setdefault(entry.get("name", entry["repo_id"]), entry)
        logger.info(f"Manifeste {manifest}: {len(entries)} dépôt(s)")

    def resolve(self, repo_path: Union[str, Path], repository: Optional[GitRepository] = None) -> RepoMeta:
        repo_path = Path(repo_path)
        sidecar = repo_path / META_FILE
        if sidecar.is_file():
            return _parse_meta(_read_json(sidecar), str(sidecar))

        entry = self.by_path.get(repo_path.resolve()) or self.by_name.get(repo_path.name)
        if entry is not None:
            return _parse_meta(entry, str(self.manifest))

        repository = repository or GitRepository(repo_path)
        logger.warning(f"{repo_path}: pas de métadonnées, repli sur le nom du répertoire")
        return RepoMeta(
            repo_id=repo_path.name,
            name=repo_path.name,
            created_at=repository.first_commit_time(),
        )

