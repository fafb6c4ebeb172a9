"""Lecture et écriture atomique du répertoire de stockage NNBOM.

Format : `meta.json` plus un fichier JSON Lines par type d'enregistrement,
clés triées, une ligne par enregistrement. Les listes de TPL et de PTM des
versions sont stockées à part (`tpls.jsonl`, `ptms.jsonl`), chaque ligne
portant le `version_index` de sa version.
"""

import json
import logging
import os
import tempfile
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, Iterable, List, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from ..exceptions import StoreError
from ..models import (
    CloneFamily,
    DependencyEdge,
    ModuleRecord,
    PtmInvocation,
    RepoRecord,
    StoreMeta,
    TplDependency,
    VersionRecord,
)
from ..extractors.ptm_detector import ptm_sort_key
from .store import NNBOMStore

logger = logging.getLogger(__name__)

META_FILE = "meta.json"
RECORD_FILES = (
    "repos.jsonl", "versions.jsonl", "modules.jsonl", "families.jsonl",
    "tpls.jsonl", "ptms.jsonl", "edges.jsonl",
)

M = TypeVar("M", bound=BaseModel)


def _dumps(record: Dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False)


class StoreManager:
    """Gestionnaire du répertoire de stockage (un seul écrivain)."""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)

    def exists(self) -> bool:
        return (self.directory / META_FILE).is_file()

    def load(self, create: bool = False) -> NNBOMStore:
        if not self.exists():
            if create:
                logger.info(f"Nouvelle base NNBOM dans {self.directory}")
                return NNBOMStore()
            raise StoreError(f"{self.directory}: base NNBOM introuvable ({META_FILE} absent)")

        try:
            meta = StoreMeta.model_validate_json((self.directory / META_FILE).read_text(encoding="utf-8"))
        except (OSError, ValidationError) as e:
            raise StoreError(f"{self.directory / META_FILE}: illisible ({e})") from e

        tpls: Dict[int, List[TplDependency]] = defaultdict(list)
        for row in self._read_rows("tpls.jsonl"):
            index = self._version_index(row, "tpls.jsonl", pop=True)
            tpls[index].append(self._validate(TplDependency, row, "tpls.jsonl"))
        ptms: Dict[int, List[PtmInvocation]] = defaultdict(list)
        for row in self._read_rows("ptms.jsonl"):
            index = self._version_index(row, "ptms.jsonl", pop=True)
            ptms[index].append(self._validate(PtmInvocation, row, "ptms.jsonl"))

        versions = []
        for row in self._read_rows("versions.jsonl"):
            index = self._version_index(row, "versions.jsonl")
            row["tpls"] = [t.model_dump() for t in tpls.get(index, [])]
            row["ptms"] = [p.model_dump() for p in ptms.get(index, [])]
            versions.append(self._validate(VersionRecord, row, "versions.jsonl"))

        store = NNBOMStore(
            meta=meta,
            repos=self._read_models(RepoRecord, "repos.jsonl"),
            versions=versions,
            modules=self._read_models(ModuleRecord, "modules.jsonl"),
            families=self._read_models(CloneFamily, "families.jsonl"),
            edges=self._read_models(DependencyEdge, "edges.jsonl"),
        )
        logger.debug(
            f"Base chargée: {len(store.repos)} dépôt(s), {len(store.versions)} version(s), "
            f"{len(store.modules)} module(s)"
        )
        return store

    def save(self, store: NNBOMStore):
        self.directory.mkdir(parents=True, exist_ok=True)

        versions = [store.versions[i] for i in sorted(store.versions)]
        self._write_lines("repos.jsonl", (
            _dumps(store.repos[k].model_dump(mode="json")) for k in sorted(store.repos)
        ))
        self._write_lines("versions.jsonl", (
            _dumps(v.model_dump(mode="json", exclude={"tpls", "ptms"})) for v in versions
        ))
        self._write_lines("tpls.jsonl", (
            _dumps({**t.model_dump(mode="json"), "version_index": v.version_index})
            for v in versions for t in sorted(v.tpls, key=lambda t: t.name)
        ))
        self._write_lines("ptms.jsonl", (
            _dumps({**p.model_dump(mode="json"), "version_index": v.version_index})
            for v in versions for p in sorted(v.ptms, key=ptm_sort_key)
        ))
        self._write_lines("modules.jsonl", (
            _dumps(store.modules[i].model_dump(mode="json")) for i in sorted(store.modules)
        ))
        self._write_lines("families.jsonl", (
            _dumps(store.families[h].model_dump(mode="json")) for h in sorted(store.families)
        ))
        self._write_lines("edges.jsonl", (
            _dumps(e.model_dump(mode="json")) for e in sorted(store.edges, key=lambda e: (e.source, e.target))
        ))
        # meta.json en dernier : sa présence marque une base complète
        self._write_lines(META_FILE, [json.dumps(store.meta.model_dump(mode="json"), sort_keys=True, indent=2)])
        logger.info(f"Base NNBOM enregistrée dans {self.directory}")

    def _write_lines(self, name: str, lines: Iterable[str]):
        fd, tmp_path = tempfile.mkstemp(prefix=f".{name}.", dir=self.directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                for line in lines:
                    f.write(line)
                    f.write("\n")
            os.replace(tmp_path, self.directory / name)
        except BaseException:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise

    def _read_rows(self, name: str) -> List[Dict[str, Any]]:
        path = self.directory / name
        if not path.exists():
            return []
        rows = []
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as e:
                    raise StoreError(f"{path}:{number}: JSON invalide ({e})") from e
                if not isinstance(row, dict):
                    raise StoreError(f"{path}:{number}: objet JSON attendu")
                rows.append(row)
        return rows

    def _version_index(self, row: Dict[str, Any], name: str, pop: bool = False) -> int:
        index = row.pop("version_index", None) if pop else row.get("version_index")
        if not isinstance(index, int) or isinstance(index, bool):
            raise StoreError(f"{self.directory / name}: version_index absent ou invalide ({index!r})")
        return index

    def _read_models(self, model: Type[M], name: str) -> List[M]:
        return [self._validate(model, row, name) for row in self._read_rows(name)]

    def _validate(self, model: Type[M], row: Dict[str, Any], name: str) -> M:
        try:
            return model.model_validate(row)
        except ValidationError as e:
            raise StoreError(f"{self.directory / name}: enregistrement invalide ({e})") from e
