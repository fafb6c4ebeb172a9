import click
from dataclasses import dataclass, field
from pathlib import Path
import logging
from typing import Dict, List, Optional, Sequence, Tuple
import sys
import time

from .analytics import reports
from .analytics.domains import EntropyMode
from .analytics.networks import ComponentType, build_cousage, build_dependency_graph, write_edge_list
from .apps.assessor import assess_repo
from .apps.delta import delta_analyze
from .config import Config
from .database.connection import StoreManager
from .database.operations import StagedModule, StagedVersion, StoreOperations
from .database.store import NNBOMStore
from .exceptions import NNBOMError
from .extractors.ptm_detector import PtmPatternCatalog
from .extractors.version_extractor import VersionExtraction, VersionExtractor, changed_units
from .models import Domain, RepoMeta
from .processors.domain_classifier import DomainTaxonomy, classify_domains, ordered_domains
from .processors.normalizer import NormalizationError, module_hash, normalize
from .utils.logger import setup_logger
from .utils.progress import ProgressTracker
from .vcs.git_adapter import GitRepository, VersionRef
from .vcs.metadata import MetadataResolver

logger = logging.getLogger(__name__)


@dataclass
class StagedRepository:
    meta: RepoMeta
    domains: List[Domain]
    versions: List[StagedVersion] = field(default_factory=list)
    skip_reason: Optional[str] = None


class NNBOMImporter:
    """Importateur principal : dépôts Git locaux vers la base NNBOM."""

    def __init__(self, config: Config, show_progress: Optional[bool] = None):
        self.config = config
        self.logger = setup_logger(
            level=config.logging.level,
            log_file=config.logging.file
        )
        self.store_manager = StoreManager(config.store.directory)

        if config.extraction.ptm_catalog:
            catalog = PtmPatternCatalog.load(config.extraction.ptm_catalog)
        else:
            catalog = PtmPatternCatalog.default()
        if config.taxonomy.keywords_file:
            self.taxonomy = DomainTaxonomy.load(config.taxonomy.keywords_file)
        else:
            self.taxonomy = DomainTaxonomy.default()

        self.extractor = VersionExtractor(
            catalog=catalog,
            root=config.extraction.framework_root,
            exclude_stdlib=config.extraction.exclude_stdlib,
            num_workers=config.extraction.num_workers,
        )
        self.show_progress = config.ingest.show_progress if show_progress is None else show_progress

    def ingest(self, paths: Sequence[Path], manifest: Optional[Path] = None) -> Dict[str, int]:
        """Ingère une liste de dépôts puis reconstruit les index et écrit la base."""
        start_time = time.time()
        store = self.store_manager.load(create=True)
        if not store.repos:
            store.meta.framework_root = self.config.extraction.framework_root
        elif store.meta.framework_root != self.config.extraction.framework_root:
            self.logger.warning(
                f"Racine de framework {self.config.extraction.framework_root} différente de celle de la base "
                f"({store.meta.framework_root})"
            )

        operations = StoreOperations(store)
        resolver = MetadataResolver(manifest)
        stats = {"ingested": 0, "skipped": 0, "already_present": 0, "failed": 0}

        with ProgressTracker(enabled=self.show_progress) as progress:
            progress.add_task("repos", "Dépôts", len(paths))
            progress.add_task("versions", "Versions", 0)

            # Phase 1: Extraction des dépôts
            self.logger.info(f"Phase 1: Extraction de {len(paths)} dépôt(s)")
            for path in paths:
                try:
                    status = self.ingest_repo(Path(path), resolver, operations, progress)
                    stats[status] += 1
                except NNBOMError as e:
                    self.logger.error(f"Erreur dépôt {path}: {e}")
                    stats["failed"] += 1
                progress.update("repos")

        # Phase 2: Index
        self.logger.info("Phase 2: Reconstruction des index")
        operations.rebuild_indices()

        # Phase 3: Écriture
        self.logger.info("Phase 3: Écriture de la base")
        self.store_manager.save(store)

        elapsed = time.time() - start_time
        self.logger.info(f"Ingestion terminée en {elapsed:.1f}s")
        self.logger.info(
            f"Statistiques: {stats['ingested']} ingéré(s), {stats['skipped']} ignoré(s), "
            f"{stats['already_present']} déjà présent(s), {stats['failed']} en échec"
        )
        return stats

    def ingest_repo(
        self,
        path: Path,
        resolver: MetadataResolver,
        operations: StoreOperations,
        progress: Optional[ProgressTracker] = None,
    ) -> str:
        """Ingère un dépôt ; renvoie ingested, skipped ou already_present."""
        repository = GitRepository(path)
        meta = resolver.resolve(path, repository)
        if operations.has_repository(meta.repo_id):
            self.logger.info(f"Dépôt {meta.repo_id} déjà présent dans la base, ignoré")
            return "already_present"

        staged = self.stage_repository(repository, meta, progress)
        if staged.skip_reason:
            operations.record_skipped(meta, staged.domains, staged.skip_reason)
            return "skipped"
        operations.add_repository(meta, staged.domains, staged.versions)
        return "ingested"

    def _is_tutorial(self, meta: RepoMeta) -> bool:
        text = f"{meta.name} {meta.description}".lower()
        return any(keyword.lower() in text for keyword in self.config.ingest.tutorial_keywords)

    def stage_repository(
        self,
        repository: GitRepository,
        meta: RepoMeta,
        progress: Optional[ProgressTracker] = None,
    ) -> StagedRepository:
        """Extrait toutes les versions d'un dépôt sans rien écrire dans la base."""
        domains = ordered_domains(classify_domains(meta, self.taxonomy))
        if self.config.ingest.filter_tutorials and self._is_tutorial(meta):
            return StagedRepository(meta, domains, skip_reason="projet tutoriel")

        tag_diagnostics: List[str] = []
        refs = repository.enumerate_versions(tag_diagnostics)
        if progress is not None:
            progress.reset("versions", f"Versions ({meta.repo_id})", len(refs))

        versions: List[StagedVersion] = []
        previous: Optional[VersionExtraction] = None
        previous_ref: Optional[VersionRef] = None
        for ref in refs:
            try:
                staged, extraction = self._stage_version(repository, ref, previous, previous_ref)
            except Exception as e:
                # Version ignorée en bloc, la suivante repart de la dernière extraction valide
                self.logger.error(f"Erreur version {meta.repo_id}@{ref.tag}: {e}")
                continue
            if not versions and tag_diagnostics:
                staged.diagnostics = tag_diagnostics + staged.diagnostics
            versions.append(staged)
            previous, previous_ref = extraction, ref
            self.logger.debug(
                f"{meta.repo_id}@{ref.tag}: {len(staged.tpls)} TPL, {len(staged.ptms)} PTM, "
                f"{len(staged.modules)} module(s)"
            )
            if progress is not None:
                progress.update("versions")

        if self.config.ingest.filter_trivial and not any(v.modules for v in versions):
            return StagedRepository(meta, domains, skip_reason="aucun module NN")
        return StagedRepository(meta, domains, versions)

    def _stage_version(
        self,
        repository: GitRepository,
        ref: VersionRef,
        previous: Optional[VersionExtraction],
        previous_ref: Optional[VersionRef],
    ) -> Tuple[StagedVersion, VersionExtraction]:
        tree = repository.tree(ref)
        if previous is None or previous_ref is None:
            extraction = self.extractor.extract(tree)
        else:
            changed = repository.changed_files(previous_ref, ref)
            new_units = changed_units(self.extractor, tree, changed)
            extraction = self.extractor.incremental(previous, changed, new_units, tree)

        diagnostics = list(extraction.diagnostics)
        modules = []
        for module in extraction.modules:
            try:
                digest = module_hash(normalize(module.source))
            except NormalizationError as e:
                diagnostics.append(f"{module.file}:{module.first_line}: module {module.qualified_name} exclu ({e})")
                self.logger.warning(f"Module {module.qualified_name} exclu de l'analyse des clones: {e}")
                continue
            modules.append(StagedModule(module.qualified_name, module.file, module.loc, digest))

        staged = StagedVersion(
            tag=ref.tag,
            release_time=ref.time,
            tpls=list(extraction.tpls),
            ptms=list(extraction.ptms),
            modules=modules,
            diagnostics=diagnostics,
        )
        return staged, extraction

    def stage_batch(self, paths: Sequence[Path], manifest: Optional[Path] = None) -> NNBOMStore:
        """Vue de préparation : le lot extrait dans une base en mémoire."""
        batch = NNBOMStore()
        operations = StoreOperations(batch)
        resolver = MetadataResolver(manifest)
        for path in paths:
            repository = GitRepository(path)
            meta = resolver.resolve(path, repository)
            staged = self.stage_repository(repository, meta)
            if staged.skip_reason:
                operations.record_skipped(meta, staged.domains, staged.skip_reason)
            else:
                operations.add_repository(meta, staged.domains, staged.versions)
        operations.rebuild_indices()
        return batch

    def snapshot_repository(
        self, path: Path, manifest: Optional[Path] = None
    ) -> Tuple[RepoMeta, StagedVersion]:
        """Instantané HEAD d'un dépôt cible, sans filtre."""
        repository = GitRepository(path)
        meta = MetadataResolver(manifest).resolve(path, repository)
        try:
            staged, _ = self._stage_version(repository, repository.head_version(), None, None)
        except NNBOMError:
            raise
        except Exception as e:
            self.logger.error(f"Erreur extraction {meta.repo_id}@HEAD: {e}")
            raise NNBOMError(f"extraction de {meta.repo_id}@HEAD impossible: {e}") from e
        return meta, staged


# --- Interface en ligne de commande ---

db_option = click.option('--db', type=click.Path(file_okay=False, path_type=Path),
                         help='Répertoire de la base NNBOM (surcharge la config)')
format_option = click.option('--format', 'fmt', type=click.Choice(reports.FORMATS), default='table',
                             show_default=True, help='Tableau lisible ou enregistrements JSON Lines')
meta_option = click.option('--meta', 'manifest', type=click.Path(exists=True, dir_okay=False, path_type=Path),
                           help='Manifeste JSON des métadonnées de dépôts')
repos_argument = click.argument('paths', nargs=-1, required=True,
                                type=click.Path(exists=True, file_okay=False, path_type=Path))


def _open_store(config: Config, db: Optional[Path]) -> NNBOMStore:
    return StoreManager(db or config.store.directory).load()


@click.group()
@click.option('--config', '-c', 'config_file', type=click.Path(dir_okay=False, path_type=Path),
              default=None, help='Fichier de configuration YAML')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help='Niveau de log (surcharge la config)')
@click.pass_context
def cli(ctx, config_file: Optional[Path], log_level: Optional[str]):
    """Nomenclature des composants de réseaux de neurones (NNBOM) : construction et analyses."""
    config = Config.from_yaml(config_file) if config_file else Config()
    if log_level:
        config.logging.level = log_level.upper()
    setup_logger(level=config.logging.level, log_file=config.logging.file)
    ctx.obj = config


@cli.command()
@repos_argument
@db_option
@click.option('--filter-tutorials', is_flag=True, help='Ignore les projets tutoriels/exemples/démos')
@click.option('--filter-trivial', is_flag=True, help='Ignore les dépôts sans module NN')
@meta_option
@click.option('--workers', '-w', type=click.IntRange(min=1), help='Nombre de workers (surcharge la config)')
@click.option('--no-progress', is_flag=True, help='Désactive les barres de progression')
@click.pass_obj
def ingest(config: Config, paths, db, filter_tutorials, filter_trivial, manifest, workers, no_progress):
    """Ingère des dépôts Git locaux dans la base."""
    if db:
        config.store.directory = str(db)
    if filter_tutorials:
        config.ingest.filter_tutorials = True
    if filter_trivial:
        config.ingest.filter_trivial = True
    if workers:
        config.extraction.num_workers = workers
    if no_progress:
        config.ingest.show_progress = False

    stats = NNBOMImporter(config).ingest(list(paths), manifest)
    click.echo(
        f"{stats['ingested']} dépôt(s) ingéré(s), {stats['skipped']} ignoré(s), "
        f"{stats['already_present']} déjà présent(s)"
    )
    if stats["failed"]:
        raise NNBOMError(f"{stats['failed']} dépôt(s) en échec")


@cli.group()
def analyze():
    """Analyses de l'évolution à partir d'une base fermée."""


@analyze.command()
@db_option
@format_option
@click.pass_obj
def summary(config: Config, db, fmt):
    """Vue d'ensemble de la base."""
    store = _open_store(config, db)
    reports.ReportWriter(fmt).emit("Base NNBOM", [StoreOperations(store).get_stats()])


@analyze.command()
@db_option
@format_option
@click.pass_obj
def trends(config: Config, db, fmt):
    """Tendances annuelles (versions, TPL, PTM, modules)."""
    store = _open_store(config, db)
    reports.ReportWriter(fmt).emit("Tendances annuelles", reports.trends_rows(store))


@analyze.command()
@db_option
@format_option
@click.pass_obj
def sizes(config: Config, db, fmt):
    """Répartition des versions par taille (nombre de modules)."""
    store = _open_store(config, db)
    reports.ReportWriter(fmt).emit("Tailles des versions", reports.sizes_rows(store))


@analyze.command()
@db_option
@format_option
@click.option('--edges', 'edges_file', type=click.Path(dir_okay=False, path_type=Path),
              help='Exporte la liste d\'arêtes (source<TAB>cible<TAB>poids)')
@click.pass_obj
def depgraph(config: Config, db, fmt, edges_file):
    """Graphe des dépendances entre dépôts (familles partagées)."""
    store = _open_store(config, db)
    graph = build_dependency_graph(store)
    if edges_file:
        with open(edges_file, 'w', encoding='utf-8') as f:
            write_edge_list(graph, f)
    rows = [
        {"source": u, "target": v, "weight": w}
        for u, v, w in sorted((min(a, b), max(a, b), d["weight"]) for a, b, d in graph.edges(data=True))
    ]
    reports.ReportWriter(fmt).emit("Graphe de dépendances", rows, ["source", "target", "weight"])


@analyze.command()
@db_option
@format_option
@click.option('--type', 'component_type', type=click.Choice([t.value for t in ComponentType]), required=True)
@click.option('--year', type=int, required=True)
@click.option('--threshold', type=click.IntRange(min=1), help='Seuil de co-usage (surcharge la config)')
@click.option('--edges', 'edges_file', type=click.Path(dir_okay=False, path_type=Path))
@click.pass_obj
def cousage(config: Config, db, fmt, component_type, year, threshold, edges_file):
    """Réseau de co-usage d'un type de composant pour une année."""
    store = _open_store(config, db)
    graph = build_cousage(store, ComponentType(component_type), year, threshold or config.analytics.cousage_threshold)
    if edges_file:
        with open(edges_file, 'w', encoding='utf-8') as f:
            write_edge_list(graph, f)
    rows = [{"source": u, "target": v, "weight": d["weight"]} for u, v, d in sorted(graph.edges(data=True))]
    reports.ReportWriter(fmt).emit(f"Co-usage {component_type} {year}", rows, ["source", "target", "weight"])


@analyze.command()
@db_option
@format_option
@click.option('--threshold', type=click.IntRange(min=1), help='Seuil de co-usage (surcharge la config)')
@click.option('--seed', type=int, help='Graine Louvain (surcharge la config)')
@click.pass_obj
def communities(config: Config, db, fmt, threshold, seed):
    """Nombre et taille moyenne des communautés de co-usage par année."""
    store = _open_store(config, db)
    rows = reports.communities_rows(
        store,
        threshold or config.analytics.cousage_threshold,
        config.analytics.louvain_resolution,
        config.analytics.louvain_seed if seed is None else seed,
    )
    reports.ReportWriter(fmt).emit("Communautés de co-usage", rows)


@analyze.command()
@db_option
@format_option
@click.option('--mode', type=click.Choice([m.value for m in EntropyMode]), help='cumulative ou yearly')
@click.pass_obj
def entropy(config: Config, db, fmt, mode):
    """Entropie moyenne des domaines des familles de clones."""
    store = _open_store(config, db)
    mode = EntropyMode(mode or config.analytics.entropy_mode)
    rows = reports.entropy_rows(store, mode, config.analytics.entropy_base)
    reports.ReportWriter(fmt).emit("Entropie moyenne", rows)


@analyze.command()
@db_option
@format_option
@click.option('--year', type=int, help='Année analysée (toutes par défaut)')
@click.option('--top', type=click.IntRange(min=1), help='Nombre de paires par année')
@click.pass_obj
def overlap(config: Config, db, fmt, year, top):
    """Recouvrement des domaines (pourcentage de familles partagées)."""
    store = _open_store(config, db)
    years = [year] if year is not None else store.years()
    rows = reports.overlap_rows(store, years, top or config.analytics.overlap_top)
    reports.ReportWriter(fmt).emit("Recouvrement des domaines", rows)


@analyze.command('top-modules')
@db_option
@format_option
@click.option('--year', type=int, help='Année analysée (toutes par défaut)')
@click.option('--k', 'k', type=click.IntRange(min=1), help='Nombre de familles par année')
@click.pass_obj
def top_modules(config: Config, db, fmt, year, k):
    """Modules les plus réutilisés par année."""
    store = _open_store(config, db)
    rows = reports.top_modules_rows(store, year, k or config.analytics.top_k)
    reports.ReportWriter(fmt).emit("Modules les plus réutilisés", rows)


@analyze.command()
@db_option
@format_option
@click.pass_obj
def lifespan(config: Config, db, fmt):
    """Familles par durée de vie et nombre de domaines."""
    store = _open_store(config, db)
    reports.ReportWriter(fmt).emit("Durée de vie x domaines", reports.lifespan_rows(store))


@cli.command()
@repos_argument
@db_option
@meta_option
@format_option
@click.pass_obj
def delta(config: Config, paths, db, manifest, fmt):
    """Nouveaux TPL, PTM et modules d'un lot de dépôts par rapport à la base."""
    if db:
        config.store.directory = str(db)
    importer = NNBOMImporter(config, show_progress=False)
    store = importer.store_manager.load()
    batch = importer.stage_batch(list(paths), manifest)
    report = delta_analyze(store, batch)
    reports.ReportWriter(fmt).emit("Analyse différentielle", [report.to_record()])


@cli.command()
@click.argument('repo', type=click.Path(exists=True, file_okay=False, path_type=Path))
@db_option
@meta_option
@click.option('--staleness-years', type=click.IntRange(min=0), help='Seuil d\'obsolescence en années')
@click.option('--recommend', type=click.IntRange(min=0), help='Nombre de recommandations par type')
@click.option('--similar', type=click.IntRange(min=0), help='Nombre de dépôts similaires')
@format_option
@click.pass_obj
def assess(config: Config, repo, db, manifest, staleness_years, recommend, similar, fmt):
    """Évalue un dépôt : modules originaux, réutilisés, obsolètes ; recommandations."""
    if db:
        config.store.directory = str(db)
    importer = NNBOMImporter(config, show_progress=False)
    store = importer.store_manager.load()
    meta, target = importer.snapshot_repository(repo, manifest)
    report = assess_repo(
        store,
        meta.repo_id,
        target,
        staleness_years=config.apps.staleness_years if staleness_years is None else staleness_years,
        recommend=config.apps.recommend if recommend is None else recommend,
        similar=config.apps.similar if similar is None else similar,
        threshold=config.analytics.cousage_threshold,
    )

    writer = reports.ReportWriter(fmt)
    records = report.to_records()
    if fmt == 'records':
        writer.emit("Évaluation", records)
        return
    for kind, title in (("summary", f"Évaluation de {meta.repo_id}"), ("module", "Modules"),
                        ("recommendation", "Recommandations"), ("similar", "Dépôts similaires")):
        rows = [{k: v for k, v in r.items() if k != "kind"} for r in records if r["kind"] == kind]
        if rows:
            writer.emit(title, rows)


@cli.group()
def catalog():
    """Catalogue des motifs d'invocation de PTM."""


@catalog.command()
@click.option('--catalog', 'catalog_file', type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help='Catalogue à afficher (défaut : catalogue embarqué ou config)')
@format_option
@click.pass_obj
def show(config: Config, catalog_file, fmt):
    """Affiche les entrées du catalogue, dans l'ordre de priorité."""
    path = catalog_file or config.extraction.ptm_catalog
    patterns = PtmPatternCatalog.load(path) if path else PtmPatternCatalog.default()
    rows = [
        {"hub": e.hub.value, "pattern": e.pattern, "selectors": ",".join(str(s) for s in e.selectors)}
        for e in patterns.entries
    ]
    reports.ReportWriter(fmt).emit(f"Catalogue PTM ({patterns.source})", rows, ["hub", "pattern", "selectors"])


@catalog.command()
@click.argument('catalog_file', required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_obj
def validate(config: Config, catalog_file):
    """Vérifie un fichier de catalogue (erreurs bloquantes et avertissements)."""
    path = catalog_file or config.extraction.ptm_catalog
    patterns = PtmPatternCatalog.load(path) if path else PtmPatternCatalog.default()
    for warning in patterns.validate():
        click.echo(f"Avertissement: {warning}", err=True)
    click.echo(f"Catalogue valide: {len(patterns)} entrée(s)")


def main(argv: Optional[List[str]] = None) -> int:
    """Point d'entrée : 0 succès, 1 erreur d'usage, 2 erreur de données."""
    try:
        result = cli.main(args=argv, prog_name="nnbom", standalone_mode=False)
        return result if isinstance(result, int) else 0
    except click.UsageError as e:
        e.show()
        return 1
    except NNBOMError as e:
        click.echo(f"Erreur: {e}", err=True)
        return 2
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        click.echo("Interrompu.", err=True)
        return 1


if __name__ == '__main__':
    sys.exit(main())
