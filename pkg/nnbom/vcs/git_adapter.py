"""Accès aux versions d'un dépôt Git local (tags, arbres, différences)."""

import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from functools import partial
from pathlib import Path
from typing import Callable, Iterator, List, Mapping, Optional, Set, Tuple, Union

from git import Repo
from git.exc import BadName, GitCommandError, InvalidGitRepositoryError, NoSuchPathError

from ..exceptions import NotARepositoryError

logger = logging.getLogger(__name__)

HEAD = "HEAD"


@dataclass(frozen=True)
class VersionRef:
    tag: str
    commit: str
    time: datetime


class GitTree(Mapping[str, bytes]):
    """Fichiers d'un commit ; le contenu des blobs est lu à la demande."""

    def __init__(self, commit):
        self._blobs = {item.path: item for item in commit.tree.traverse() if item.type == "blob"}

    def __getitem__(self, path: str) -> bytes:
        return self._blobs[path].data_stream.read()

    def __contains__(self, path) -> bool:
        return path in self._blobs

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._blobs))

    def __len__(self) -> int:
        return len(self._blobs)


def _commit_time(commit) -> datetime:
    return commit.authored_datetime.astimezone(timezone.utc)


class GitRepository:
    """Adaptateur GitPython pour un dépôt local."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        try:
            self.repo = Repo(self.path)
        except (InvalidGitRepositoryError, NoSuchPathError) as e:
            raise NotARepositoryError(f"{self.path} n'est pas un dépôt Git") from e

    def head_version(self) -> VersionRef:
        try:
            commit = self.repo.head.commit
        except ValueError as e:
            raise NotARepositoryError(f"{self.path}: dépôt sans commit") from e
        return VersionRef(HEAD, commit.hexsha, _commit_time(commit))

    def enumerate_versions(self, diagnostics: Optional[List[str]] = None) -> List[VersionRef]:
        """Une version par tag, triées par date ; HEAD seul si aucun tag."""
        refs = []
        for tag in self.repo.tags:
            try:
                commit = tag.commit
                refs.append(VersionRef(tag.name, commit.hexsha, _commit_time(commit)))
            except (ValueError, BadName, GitCommandError) as e:
                message = f"tag {tag.name} illisible: {e}"
                logger.warning(f"{self.path}: {message}")
                if diagnostics is not None:
                    diagnostics.append(message)

        if not refs:
            return [self.head_version()]
        refs.sort(key=lambda ref: (ref.time, ref.tag))
        logger.debug(f"{self.path}: {len(refs)} version(s)")
        return refs

    def tree(self, ref: VersionRef) -> GitTree:
        return GitTree(self.repo.commit(ref.commit))

    def changed_files(self, previous: VersionRef, current: VersionRef) -> Set[str]:
        """Fichiers .py ajoutés, modifiés ou supprimés ; les renommages donnent les deux chemins."""
        try:
            diffs = self.repo.commit(previous.commit).diff(self.repo.commit(current.commit))
            return {
                path
                for diff in diffs
                for path in (diff.a_path, diff.b_path)
                if path and path.endswith(".py")
            }
        except (GitCommandError, ValueError, BadName) as e:
            logger.warning(f"{self.path}: diff {previous.tag}..{current.tag} impossible ({e}), réextraction complète")
            paths = set(self.tree(previous)) | set(self.tree(current))
            return {p for p in paths if p.endswith(".py")}

    def first_commit_time(self) -> datetime:
        roots = list(self.repo.iter_commits(HEAD, max_parents=0))
        return min(_commit_time(c) for c in roots)


def enumerate_versions(path: Union[str, Path]) -> List[Tuple[str, datetime, Callable[[], GitTree]]]:
    """(tag, date, accès à l'arbre) pour chaque version d'un dépôt."""
    repository = GitRepository(path)
    return [(ref.tag, ref.time, partial(repository.tree, ref)) for ref in repository.enumerate_versions()]


def changed_files(repository: GitRepository, previous: VersionRef, current: VersionRef) -> Set[str]:
    return repository.changed_files(previous, current)

