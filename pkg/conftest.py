"""Fixtures partagées : dépôts Git synthétiques et bases construites en mémoire."""

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pytest
from git import Actor, Repo

from nnbom.config import Config
from nnbom.database.operations import StagedModule, StagedVersion, StoreOperations
from nnbom.database.store import NNBOMStore
from nnbom.models import Domain, RepoMeta
from nnbom.vcs.metadata import META_FILE

AUTHOR = Actor("Fixture", "fixture@example.com")


def utc(year: int, month: int = 1, day: int = 1) -> datetime:
    return datetime(year, month, day, tzinfo=timezone.utc)


def _git_date(moment: datetime) -> str:
    return f"{int(moment.timestamp())} +0000"


class RepoBuilder:
    """Dépôt Git construit version par version (un commit et un tag par version)."""

    def __init__(self, path: Path):
        self.path = path
        path.mkdir(parents=True, exist_ok=True)
        self.repo = Repo.init(path)

    def commit(self, files: Dict[str, Optional[str]], when: datetime, tag: Optional[str] = None,
               message: str = "version"):
        added, removed = [], []
        for name, content in files.items():
            target = self.path / name
            if content is None:
                if target.exists():
                    target.unlink()
                    removed.append(str(target))
                continue
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content, encoding="utf-8")
            added.append(str(target))
        if added:
            self.repo.index.add(added)
        if removed:
            self.repo.index.remove(removed)
        date = _git_date(when)
        commit = self.repo.index.commit(
            message, author=AUTHOR, committer=AUTHOR, author_date=date, commit_date=date,
        )
        if tag:
            self.repo.create_tag(tag, ref=commit)
        return commit

    def write_meta(self, name: str, topics: Sequence[str] = (), created: Optional[datetime] = None,
                   description: str = "", repo_id: Optional[str] = None):
        meta = {
            "repo_id": repo_id or name,
            "name": name,
            "topics": list(topics),
            "created_at": (created or utc(2018)).isoformat(),
            "description": description,
        }
        (self.path / META_FILE).write_text(json.dumps(meta), encoding="utf-8")


@pytest.fixture
def make_repo(tmp_path):
    def factory(name: str) -> RepoBuilder:
        return RepoBuilder(tmp_path / "repos" / name)
    return factory


@pytest.fixture
def config(tmp_path) -> Config:
    cfg = Config()
    cfg.store.directory = str(tmp_path / "db")
    cfg.ingest.show_progress = False
    cfg.extraction.num_workers = 1
    cfg.logging.level = "WARNING"
    return cfg


BLOCK = '''import torch.nn as nn


class ResidualBlock(nn.Module):
    def __init__(self, channels):
        super().__init__()
        self.conv = nn.Conv2d(channels, channels, 3)

    def forward(self, x):
        return x + self.conv(x)
'''

ATTENTION = '''from torch import nn


class SelfAttention(nn.Module):
    def __init__(self, dim, heads=8):
        super().__init__()
        self.heads = heads
        self.proj = nn.Linear(dim, dim * 3)

    def forward(self, x):
        q, k, v = self.proj(x).chunk(3, dim=-1)
        return q @ k.transpose(-2, -1) @ v
'''

CLASSIFIER = '''import torch
from transformers import AutoModel

MODEL = "bert-base-uncased"


class TextClassifier(torch.nn.Module):
    def __init__(self, labels):
        super().__init__()
        self.encoder = AutoModel.from_pretrained(MODEL)
        self.head = torch.nn.Linear(768, labels)

    def forward(self, ids):
        return self.head(self.encoder(ids).pooler_output)
'''


@pytest.fixture
def corpus(make_repo) -> Dict[str, Path]:
    """Trois dépôts : vision (2019-2020), NLP (2020-2021), et un dépôt tutoriel."""
    vision = make_repo("vision-net")
    vision.write_meta("vision-net", topics=["image", "detection"], created=utc(2019))
    vision.commit({
        "requirements.txt": "torch==1.4.0\nnumpy>=1.18\n",
        "vision/__init__.py": "",
        "vision/blocks.py": BLOCK,
        "train.py": "import numpy as np\nimport os\nfrom vision.blocks import ResidualBlock\n",
    }, utc(2019, 3), tag="v0.1")
    vision.commit({
        "vision/attention.py": ATTENTION,
        "hub.py": "import torch\nbackbone = torch.hub.load('pytorch/vision', 'resnet50')\n",
    }, utc(2020, 5), tag="v0.2")

    nlp = make_repo("bert-sentiment")
    nlp.write_meta("bert-sentiment", topics=["nlp", "transformer"], created=utc(2020))
    nlp.commit({
        "model.py": CLASSIFIER,
        "layers.py": BLOCK.replace("channels", "width").replace("# ", ""),
    }, utc(2020, 8), tag="1.0")
    nlp.commit({
        "attention.py": ATTENTION,
        "cli.py": "from transformers import AutoModel\nAutoModel.from_pretrained(input('model? '))\n",
    }, utc(2021, 2), tag="1.1")

    tutorial = make_repo("pytorch-tutorial")
    tutorial.write_meta("pytorch-tutorial", topics=["vision"], description="Beginner tutorial", created=utc(2019))
    tutorial.commit({"net.py": BLOCK}, utc(2019, 6), tag="v1")

    return {"vision": vision.path, "nlp": nlp.path, "tutorial": tutorial.path}


class StoreBuilder:
    """Base construite sans Git, à partir de versions déjà extraites."""

    def __init__(self):
        self.store = NNBOMStore()
        self.operations = StoreOperations(self.store)

    def add(self, repo_id: str, domains: Iterable[Domain], versions: List[Tuple]):
        """versions : (année, [(nom, empreinte)], [tpl], [ptm]) ou (datetime, ...)."""
        staged = []
        for number, spec in enumerate(versions):
            when, modules = spec[0], spec[1]
            tpls = spec[2] if len(spec) > 2 else []
            ptms = spec[3] if len(spec) > 3 else []
            moment = utc(when) if isinstance(when, int) else when
            staged.append(StagedVersion(
                tag=f"v{number}",
                release_time=moment,
                tpls=list(tpls),
                ptms=list(ptms),
                modules=[StagedModule(name, f"{name.lower()}.py", 10, digest) for name, digest in modules],
            ))
        meta = RepoMeta(repo_id=repo_id, name=repo_id, created_at=utc(2015))
        self.operations.add_repository(meta, list(domains), staged)
        return self

    def build(self) -> NNBOMStore:
        self.operations.rebuild_indices()
        return self.store


@pytest.fixture
def store_builder():
    return StoreBuilder
