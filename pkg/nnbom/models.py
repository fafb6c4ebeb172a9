from datetime import datetime, timezone
from enum import Enum
from typing import Annotated, Dict, List, Optional

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator


class Domain(str, Enum):
    UL = "UL"
    RL = "RL"
    CV = "CV"
    MML = "MML"
    NLP = "NLP"
    GM = "GM"
    TRANS = "Trans"


DOMAIN_ORDER = list(Domain)


class TplSource(str, Enum):
    CONFIG = "config"
    IMPORT = "import"
    BOTH = "both"


class Hub(str, Enum):
    HUGGINGFACE = "huggingface"
    TENSORFLOW_HUB = "tensorflow-hub"
    PYTORCH_HUB = "pytorch-hub"
    MODELHUB = "modelhub"
    NVIDIA_NGC = "nvidia-ngc"
    MATLAB_HUB = "matlab-hub"
    VLLM = "vllm"
    DEEPSPEED_MII = "deepspeed-mii"
    CTRANSLATE2 = "ctranslate2"


class Resolution(str, Enum):
    LITERAL = "literal"
    SYMBOL_TABLE = "symbol-table"
    UNRESOLVED = "unresolved"


class RepoStatus(str, Enum):
    INGESTED = "ingested"
    SKIPPED = "skipped"


def _as_utc(value: datetime) -> datetime:
    if value.tzinfo is None:
        return value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


UtcDatetime = Annotated[datetime, AfterValidator(_as_utc)]


class TplDependency(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    version: Optional[str] = None
    source: TplSource

    @model_validator(mode="after")
    def _version_from_config(self):
        if self.version is not None and self.source is TplSource.IMPORT:
            raise ValueError("une version ne peut provenir que d'un fichier de configuration")
        return self


class PtmInvocation(BaseModel):
    model_config = ConfigDict(frozen=True)

    hub: Hub
    model_path: Optional[str] = None
    file: str
    line: int
    resolution: Resolution

    @model_validator(mode="after")
    def _resolution_consistency(self):
        if self.resolution is Resolution.UNRESOLVED and self.model_path is not None:
            raise ValueError("invocation non résolue avec un chemin de modèle")
        if self.resolution is not Resolution.UNRESOLVED and self.model_path is None:
            raise ValueError("invocation résolue sans chemin de modèle")
        return self

    @property
    def identity(self) -> Optional[str]:
        """Identité du PTM (hub + chemin), absente si non résolu."""
        if self.model_path is None:
            return None
        return f"{self.hub.value}:{self.model_path}"


class RepoMeta(BaseModel):
    repo_id: str
    name: str
    topics: List[str] = Field(default_factory=list)
    created_at: UtcDatetime
    description: str = ""


class RepoRecord(RepoMeta):
    domains: List[Domain] = Field(default_factory=list)
    status: RepoStatus = RepoStatus.INGESTED
    skip_reason: Optional[str] = None
    version_indices: List[int] = Field(default_factory=list)


class VersionRecord(BaseModel):
    version_index: int
    repo_id: str
    tag: str
    release_time: UtcDatetime
    tpls: List[TplDependency] = Field(default_factory=list)
    ptms: List[PtmInvocation] = Field(default_factory=list)
    self_developed: List[int] = Field(default_factory=list)
    cloned: List[int] = Field(default_factory=list)
    diagnostics: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _disjoint_module_lists(self):
        if set(self.self_developed) & set(self.cloned):
            raise ValueError("un module ne peut être à la fois développé et cloné")
        return self

    @property
    def release_year(self) -> int:
        return self.release_time.year

    @property
    def module_ids(self) -> List[int]:
        return sorted(self.self_developed + self.cloned)


class ModuleRecord(BaseModel):
    module_index: int
    module_hash: str
    version_index: int
    repo_id: str
    name: str
    file: str
    loc: int = Field(ge=1)
    domains: List[Domain] = Field(default_factory=list)
    release_time: UtcDatetime
    frequency: int = Field(default=1, ge=1)

    @property
    def release_year(self) -> int:
        return self.release_time.year

    @property
    def simple_name(self) -> str:
        return self.name.rsplit(".", 1)[-1]


class CloneFamily(BaseModel):
    hash: str
    members: List[int]
    repositories: List[str]
    first_year: int
    last_year: int
    domains: Dict[Domain, int] = Field(default_factory=dict)
    frequency: int
    representative: str

    @model_validator(mode="after")
    def _consistency(self):
        if self.first_year > self.last_year:
            raise ValueError("première année postérieure à la dernière")
        if self.frequency != len(self.members):
            raise ValueError("fréquence différente du nombre de membres")
        return self

    @property
    def lifespan(self) -> int:
        return self.last_year - self.first_year + 1

    @property
    def domain_range(self) -> int:
        return sum(1 for count in self.domains.values() if count > 0)


class DependencyEdge(BaseModel):
    source: str
    target: str
    weight: int = Field(ge=1)

    @model_validator(mode="after")
    def _no_self_loop(self):
        if self.source == self.target:
            raise ValueError("boucle sur un même dépôt")
        return self


class StoreMeta(BaseModel):
    format_version: int = 1
    next_version_index: int = 0
    next_module_index: int = 0
    framework_root: str = "torch.nn.Module"
