"""Classification des dépôts dans les sept domaines d'IA par mots-clés."""

import logging
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Union

from ..exceptions import TaxonomyError
from ..models import DOMAIN_ORDER, Domain, RepoMeta

logger = logging.getLogger(__name__)

DEFAULT_KEYWORDS = "domains.txt"


class DomainTaxonomy:
    """Listes de mots-clés (en minuscules) par domaine."""

    def __init__(self, keywords: Dict[Domain, Iterable[str]]):
        self.keywords: Dict[Domain, List[str]] = {}
        for domain in DOMAIN_ORDER:
            unique: List[str] = []
            for word in keywords.get(domain, ()):
                word = word.strip().lower()
                if word and word not in unique:
                    unique.append(word)
            self.keywords[domain] = unique

    @classmethod
    def from_text(cls, text: str, source: str = "<texte>") -> "DomainTaxonomy":
        keywords: Dict[Domain, List[str]] = {d: [] for d in DOMAIN_ORDER}
        current: Optional[Domain] = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                label = line[1:-1].strip()
                try:
                    current = Domain(label)
                except ValueError:
                    raise TaxonomyError(f"{source}:{number}: domaine inconnu '{label}'")
                continue
            if current is None:
                raise TaxonomyError(f"{source}:{number}: mot-clé hors de toute section [DOMAINE]")
            if line.lower() in keywords[current]:
                logger.warning(f"{source}:{number}: mot-clé '{line}' en double dans {current.value}")
                continue
            keywords[current].append(line.lower())
        return cls(keywords)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DomainTaxonomy":
        path = Path(path)
        try:
            return cls.from_text(path.read_text(encoding="utf-8"), str(path))
        except OSError as e:
            raise TaxonomyError(f"lecture de {path} impossible: {e}") from e

    @classmethod
    def default(cls) -> "DomainTaxonomy":
        text = (resources.files("nnbom") / "data" / DEFAULT_KEYWORDS).read_text(encoding="utf-8")
        return cls.from_text(text, DEFAULT_KEYWORDS)

    def classify(self, name: str, topics: Iterable[str] = ()) -> Set[Domain]:
        fields = [name.lower()] + [t.lower() for t in topics]
        return {
            domain for domain, words in self.keywords.items()
            if any(word in field for word in words for field in fields)
        }


def classify_domains(meta: RepoMeta, taxonomy: DomainTaxonomy) -> Set[Domain]:
    return taxonomy.classify(meta.name, meta.topics)


def ordered_domains(domains: Iterable[Domain]) -> List[Domain]:
    present = set(domains)
    return [d for d in DOMAIN_ORDER if d in present]
