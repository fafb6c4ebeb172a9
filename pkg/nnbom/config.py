from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class StoreConfig(BaseModel):
    directory: str = "nnbom-db"


class ExtractionConfig(BaseModel):
    framework_root: str = "torch.nn.Module"
    ptm_catalog: Optional[str] = None
    exclude_stdlib: bool = True
    num_workers: int = Field(default=4, ge=1)


class IngestConfig(BaseModel):
    filter_tutorials: bool = False
    filter_trivial: bool = False
    tutorial_keywords: List[str] = ["tutorial", "example", "demo"]
    show_progress: bool = True


class TaxonomyConfig(BaseModel):
    keywords_file: Optional[str] = None


class AnalyticsConfig(BaseModel):
    cousage_threshold: int = Field(default=5, ge=1)
    entropy_mode: str = Field(default="cumulative", pattern="^(cumulative|yearly)$")
    entropy_base: Optional[float] = None
    louvain_seed: int = 42
    louvain_resolution: float = 1.0
    top_k: int = Field(default=10, ge=1)
    overlap_top: int = Field(default=5, ge=1)


class AppsConfig(BaseModel):
    staleness_years: int = Field(default=2, ge=0)
    recommend: int = Field(default=10, ge=0)
    similar: int = Field(default=5, ge=0)


class LoggingConfig(BaseModel):
    level: str = "INFO"
    file: Optional[str] = None


class Config(BaseSettings):
    """Configuration de l'outil ; les variables NNBOM_* (ex. NNBOM_STORE__DIRECTORY) priment sur les défauts."""

    model_config = SettingsConfigDict(env_prefix="NNBOM_", env_nested_delimiter="__")

    store: StoreConfig = Field(default_factory=StoreConfig)
    extraction: ExtractionConfig = Field(default_factory=ExtractionConfig)
    ingest: IngestConfig = Field(default_factory=IngestConfig)
    taxonomy: TaxonomyConfig = Field(default_factory=TaxonomyConfig)
    analytics: AnalyticsConfig = Field(default_factory=AnalyticsConfig)
    apps: AppsConfig = Field(default_factory=AppsConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @classmethod
    def from_yaml(cls, config_path: str) -> "Config":
        """Charge la configuration depuis un fichier YAML."""
        path = Path(config_path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
            return cls(**data)
        except FileNotFoundError:
            print(f"Fichier de configuration introuvable: {config_path}")
            print("Création d'un fichier de configuration par défaut...")
            default_config = cls._create_default_config()
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                yaml.safe_dump(default_config, f, default_flow_style=False, sort_keys=False)
            return cls(**default_config)

    @staticmethod
    def _create_default_config() -> Dict[str, Any]:
        """Crée une configuration par défaut."""
        return {
            "store": StoreConfig().model_dump(),
            "extraction": ExtractionConfig().model_dump(),
            "ingest": IngestConfig().model_dump(),
            "taxonomy": TaxonomyConfig().model_dump(),
            "analytics": AnalyticsConfig().model_dump(),
            "apps": AppsConfig().model_dump(),
            "logging": LoggingConfig().model_dump(),
        }
