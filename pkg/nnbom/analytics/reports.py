"""Mise en forme des rapports : tableau Rich ou enregistrements JSON Lines."""

import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

import click
from rich.console import Console
from rich.table import Table

from ..database.store import NNBOMStore
from ..models import DOMAIN_ORDER
from .domains import EntropyMode, domain_overlap, entropy_report, lifespan_matrix
from .networks import ComponentType, community_dynamics
from .reuse import top_modules_series, top_reused_modules
from .trends import bucket_label, size_distribution, yearly_trends

FORMATS = ("table", "records")


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


class ReportWriter:
    """Écrit un rapport sur la sortie standard au format demandé."""

    def __init__(self, fmt: str = "table"):
        if fmt not in FORMATS:
            raise ValueError(f"format inconnu '{fmt}'")
        self.fmt = fmt

    def emit(self, title: str, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None):
        if self.fmt == "records":
            for row in rows:
                click.echo(json.dumps(row, sort_keys=True, ensure_ascii=False))
            return

        columns = columns or (list(rows[0]) if rows else [])
        table = Table(title=title)
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*(_cell(row.get(c)) for c in columns))
        Console(soft_wrap=True).print(table)


def trends_rows(store: NNBOMStore) -> List[Dict[str, Any]]:
    return [row.to_record() for row in yearly_trends(store)]


def sizes_rows(store: NNBOMStore) -> List[Dict[str, Any]]:
    rows = []
    for year, shares in size_distribution(store).items():
        row: Dict[str, Any] = {"year": year}
        row.update({bucket_label(i): share for i, share in enumerate(shares)})
        rows.append(row)
    return rows


def communities_rows(store: NNBOMStore, threshold: int, resolution: float, seed: int) -> List[Dict[str, Any]]:
    return [
        {"year": year, "type": ctype.value, "communities": count, "average_size": size}
        for (year, ctype), (count, size) in sorted(
            community_dynamics(store, threshold, resolution, seed).items(),
            key=lambda item: (item[0][0], list(ComponentType).index(item[0][1])),
        )
    ]


def entropy_rows(store: NNBOMStore, mode: EntropyMode, base: Optional[float]) -> List[Dict[str, Any]]:
    return [
        {"year": year, "families": count, "average_entropy": value, "mode": mode.value}
        for year, (count, value) in entropy_report(store, mode, base).items()
    ]


def overlap_rows(store: NNBOMStore, years: Iterable[int], top: Optional[int]) -> List[Dict[str, Any]]:
    rows = []
    for year in years:
        for rank, ((a, b), value) in enumerate(domain_overlap(store, year, top), start=1):
            rows.append({"year": year, "rank": rank, "domain_a": a.value, "domain_b": b.value, "overlap_pct": value})
    return rows


def top_modules_rows(store: NNBOMStore, year: Optional[int], k: int) -> List[Dict[str, Any]]:
    if year is not None:
        series = {year: top_reused_modules(store, year, k)}
    else:
        series = top_modules_series(store, k)
    return [{"year": y, **entry.to_record()} for y, entries in series.items() for entry in entries]


def lifespan_rows(store: NNBOMStore) -> List[Dict[str, Any]]:
    rows = []
    for lifespan, counts in enumerate(lifespan_matrix(store), start=1):
        row: Dict[str, Any] = {"lifespan": lifespan}
        row.update({f"d{d}": counts[d - 1] for d in range(1, len(DOMAIN_ORDER) + 1)})
        rows.append(row)
    return rows
