"""Tests des analyses : tendances, réseaux, communautés, entropie et recouvrement."""

import io
import math
import random
from collections import Counter, defaultdict
from itertools import combinations

import networkx as nx
import pytest

from conftest import utc
from nnbom.analytics.domains import (
    EntropyMode,
    average_entropy,
    domain_overlap,
    entropy_report,
    lifespan_matrix,
)
from nnbom.analytics.networks import (
    ComponentType,
    build_cousage,
    build_dependency_graph,
    community_dynamics,
    louvain,
    write_edge_list,
)
from nnbom.analytics.reuse import top_reused_modules
from nnbom.analytics.trends import size_distribution, yearly_trends
from nnbom.models import Domain, Hub, PtmInvocation, Resolution, TplDependency, TplSource

YEARS = range(2018, 2023)


def _tpl(name):
    return TplDependency(name=name, source=TplSource.IMPORT)


def _random_store(store_builder, seed):
    rng = random.Random(seed)
    builder = store_builder()
    for index in range(6):
        domains = rng.sample(list(Domain), rng.randint(0, 3))
        versions = []
        for year in sorted(rng.sample(list(YEARS), rng.randint(1, 3))):
            modules = [(f"M{h}", f"h{h}") for h in rng.sample(range(10), rng.randint(0, 4))]
            tpls = [_tpl(f"lib{n}") for n in sorted(rng.sample(range(6), rng.randint(0, 4)))]
            versions.append((year, modules, tpls))
        builder.add(f"repo{index}", domains, versions)
    return builder.build()


# --- Entropie et recouvrement : oracles par force brute ---

def _brute_entropy(store, year, cumulative=True):
    values = []
    by_family = defaultdict(Counter)
    for module in store.modules.values():
        if (module.release_year <= year) if cumulative else (module.release_year == year):
            by_family[module.module_hash].update(module.domains)
    for counts in by_family.values():
        total = sum(counts.values())
        if total:
            values.append(-sum(c / total * math.log(c / total) for c in counts.values() if c))
    return (len(values), sum(values) / len(values)) if values else (0, None)


def _brute_overlap(store, year):
    sets = defaultdict(set)
    for module in store.modules.values():
        if module.release_year == year:
            for domain in module.domains:
                sets[domain].add(module.module_hash)
    result = {}
    for a, b in combinations(list(Domain), 2):
        union = sets[a] | sets[b]
        if union:
            result[(a, b)] = 100.0 * len(sets[a] & sets[b]) / len(union)
    return result


@pytest.mark.parametrize("seed", range(10))
def test_average_entropy_matches_brute_force(store_builder, seed):
    store = _random_store(store_builder, seed)
    for year in YEARS:
        for mode, cumulative in ((EntropyMode.CUMULATIVE, True), (EntropyMode.YEARLY, False)):
            count, value = average_entropy(store, year, mode)
            expected_count, expected = _brute_entropy(store, year, cumulative)
            assert count == expected_count
            if expected is None:
                assert value is None
            else:
                assert value == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_domain_overlap_matches_brute_force(store_builder, seed):
    store = _random_store(store_builder, seed)
    for year in YEARS:
        ranked = domain_overlap(store, year)
        expected = _brute_overlap(store, year)
        assert {pair: value for pair, value in ranked} == pytest.approx(expected, abs=1e-9)
        values = [value for _, value in ranked]
        assert values == sorted(values, reverse=True)


def test_entropy_by_hand(store_builder):
    store = (
        store_builder()
        .add("A", [Domain.CV], [(2019, [("Block", "h")])])
        .add("B", [Domain.CV, Domain.NLP], [(2020, [("Block", "h")])])
        .build()
    )
    assert average_entropy(store, 2019) == (1, 0.0)
    _, cumulative = average_entropy(store, 2020)
    assert cumulative == pytest.approx(-(2 / 3 * math.log(2 / 3) + 1 / 3 * math.log(1 / 3)), abs=1e-12)
    assert average_entropy(store, 2020, EntropyMode.YEARLY)[1] == pytest.approx(math.log(2))
    assert average_entropy(store, 2020, EntropyMode.YEARLY, base=2)[1] == pytest.approx(1.0)
    assert set(entropy_report(store)) == {2019, 2020}


def test_families_without_domains_are_not_eligible(store_builder):
    store = store_builder().add("A", [], [(2019, [("Block", "h")])]).build()
    assert average_entropy(store, 2019) == (0, None)
    assert domain_overlap(store, 2019) == []


def test_overlap_top_and_tie_order(store_builder):
    store = (
        store_builder()
        .add("A", [Domain.CV, Domain.NLP], [(2020, [("X", "h1")])])
        .add("B", [Domain.GM, Domain.TRANS], [(2020, [("Y", "h2")])])
        .build()
    )
    ranked = domain_overlap(store, 2020, top=2)
    assert ranked == [((Domain.CV, Domain.NLP), 100.0), ((Domain.GM, Domain.TRANS), 100.0)]


# --- Tendances et réutilisation ---

@pytest.fixture
def small_store(store_builder):
    ptm = PtmInvocation(hub=Hub.HUGGINGFACE, model_path="bert", file="a.py", line=1, resolution=Resolution.LITERAL)
    return (
        store_builder()
        .add("A", [Domain.CV], [
            (2019, [("X", "h1"), ("Y", "h2")], [_tpl("torch"), _tpl("numpy")], [ptm]),
            (2020, [("X", "h1")], [_tpl("torch")]),
        ])
        .add("B", [Domain.NLP], [(2020, [], [_tpl("transformers")])])
        .build()
    )


def test_yearly_trends(small_store):
    rows = {row.year: row for row in yearly_trends(small_store)}
    assert rows[2019].versions == 1
    assert rows[2019].distinct_tpls == 2
    assert rows[2019].ptm_invocations == 1
    assert rows[2019].modules == 2
    assert rows[2019].avg_loc == 10.0
    assert rows[2019].ptm_repo_share == 1.0
    assert rows[2020].versions == 2
    assert rows[2020].distinct_tpls == 2
    assert rows[2020].avg_modules == 0.5
    assert rows[2020].ptm_repo_share == 0.0


def test_size_distribution(small_store):
    assert size_distribution(small_store) == {2019: (1.0, 0.0, 0.0, 0.0), 2020: (1.0, 0.0, 0.0, 0.0)}


@pytest.fixture
def reuse_store(store_builder):
    return (
        store_builder()
        .add("A", [Domain.CV], [(2019, [("Old", "h2")]), (2020, [("Old", "h2"), ("New", "h1")])])
        .add("B", [Domain.NLP], [(2020, [("New", "h1"), ("Old", "h2"), ("Rare", "h3")])])
        .add("C", [Domain.CV], [(2020, [("New", "h1"), ("Old", "h2")])])
        .build()
    )


def test_top_reused_modules_ties_break_on_first_year(reuse_store):
    top = top_reused_modules(reuse_store, 2020, k=3)
    assert [(m.rank, m.hash, m.occurrences, m.first_year) for m in top] == [
        (1, "h2", 3, 2019), (2, "h1", 3, 2020), (3, "h3", 1, 2020),
    ]
    assert top[0].representative == "Old"
    assert top[0].repositories == 3
    assert len(top_reused_modules(reuse_store, 2020, k=2)) == 2
    with pytest.raises(ValueError):
        top_reused_modules(reuse_store, 2020, k=0)


def test_lifespan_matrix(reuse_store):
    assert lifespan_matrix(reuse_store) == [
        [1, 1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0],
    ]


def test_dependency_graph_and_edge_export(reuse_store):
    graph = build_dependency_graph(reuse_store)
    assert sorted(graph.nodes) == ["A", "B", "C"]
    assert graph["A"]["B"]["weight"] == 2
    assert graph["B"]["C"]["weight"] == 2
    stream = io.StringIO()
    write_edge_list(graph, stream)
    assert stream.getvalue() == "A\tB\t2\nA\tC\t2\nB\tC\t2\n"


# --- Réseaux de co-usage ---

def _brute_cousage(store, year, threshold):
    per_version = defaultdict(list)
    for version in store.versions.values():
        if version.release_year == year:
            per_version[version.repo_id].append({t.name for t in version.tpls})
    edges = {}
    components = sorted(set().union(*(s for sets in per_version.values() for s in sets)))
    for a, b in combinations(components, 2):
        count = sum(1 for sets in per_version.values() if any(a in s and b in s for s in sets))
        if count >= threshold:
            edges[(a, b)] = count
    return edges


@pytest.mark.parametrize("seed", range(10))
def test_cousage_weights_and_threshold_monotonicity(store_builder, seed):
    store = _random_store(store_builder, seed)
    for year in YEARS:
        previous = None
        for threshold in range(1, 6):
            graph = build_cousage(store, ComponentType.TPL, year, threshold)
            edges = {tuple(sorted((u, v))): d["weight"] for u, v, d in graph.edges(data=True)}
            assert edges == _brute_cousage(store, year, threshold)
            if previous is not None:
                assert set(graph.nodes) <= set(previous.nodes)
                assert set(edges) <= {tuple(sorted(e)) for e in previous.edges}
            previous = graph


def test_cousage_threshold_must_be_positive(small_store):
    with pytest.raises(ValueError):
        build_cousage(small_store, ComponentType.TPL, 2020, 0)


def test_cousage_pair_needs_a_single_version(store_builder):
    builder = store_builder()
    for index in range(5):
        builder.add(f"repo{index}", [Domain.CV], [(utc(2020, 1), [], [_tpl("a")]), (utc(2020, 6), [], [_tpl("b")])])
    graph = build_cousage(builder.build(), ComponentType.TPL, 2020, 5)
    assert sorted(graph.nodes) == ["a", "b"]
    assert graph.number_of_edges() == 0


@pytest.mark.parametrize("seed", range(10))
def test_cousage_with_several_versions_per_year(store_builder, seed):
    rng = random.Random(seed)
    builder = store_builder()
    for index in range(6):
        versions = [
            (utc(2020, month), [], [_tpl(f"lib{n}") for n in sorted(rng.sample(range(5), rng.randint(0, 3)))])
            for month in sorted(rng.sample(range(1, 13), rng.randint(1, 3)))
        ]
        builder.add(f"repo{index}", [Domain.CV], versions)
    store = builder.build()
    for threshold in (1, 2, 3):
        graph = build_cousage(store, ComponentType.TPL, 2020, threshold)
        edges = {tuple(sorted((u, v))): d["weight"] for u, v, d in graph.edges(data=True)}
        assert edges == _brute_cousage(store, 2020, threshold)


def test_module_family_cousage(reuse_store):
    graph = build_cousage(reuse_store, ComponentType.MODULE, 2020, threshold=2)
    assert sorted(graph.nodes) == ["h1", "h2"]
    assert graph["h1"]["h2"]["weight"] == 3


def test_community_dynamics_covers_every_year_and_type(reuse_store):
    dynamics = community_dynamics(reuse_store, threshold=2)
    assert set(dynamics) == {(y, t) for y in (2019, 2020) for t in ComponentType}
    assert dynamics[(2020, ComponentType.MODULE)] == (1, 2.0)
    assert dynamics[(2019, ComponentType.TPL)] == (0, 0.0)


# --- Louvain ---

def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in _set_partitions(rest):
        for index in range(len(partition)):
            yield partition[:index] + [{first} | partition[index]] + partition[index + 1:]
        yield [{first}] + partition


def _optimal_modularity(graph):
    return max(
        nx.community.modularity(graph, partition, weight="weight")
        for partition in _set_partitions(list(graph.nodes))
    )


def _two_cliques(size):
    graph = nx.Graph()
    graph.add_edges_from(combinations(range(size), 2), weight=1)
    graph.add_edges_from(combinations(range(size, 2 * size), 2), weight=1)
    graph.add_edge(size - 1, size, weight=1)
    return graph


SMALL_GRAPHS = {
    "two-4-cliques": _two_cliques(4),
    "two-triangles": _two_cliques(3),
    "three-edges": nx.Graph([(0, 1, {"weight": 1}), (2, 3, {"weight": 1}), (4, 5, {"weight": 1})]),
    "k4": nx.complete_graph(4),
    "star": nx.star_graph(4),
    "weighted-pairs": nx.Graph([(0, 1, {"weight": 5}), (1, 2, {"weight": 1}), (2, 3, {"weight": 5})]),
}


@pytest.mark.parametrize("name", sorted(SMALL_GRAPHS))
def test_louvain_is_near_optimal_on_small_graphs(name):
    graph = SMALL_GRAPHS[name]
    partition = louvain(graph, seed=0)
    optimum = _optimal_modularity(graph)
    if optimum > 0:
        assert partition.modularity >= 0.99 * optimum
    else:
        assert partition.modularity >= optimum - 1e-9


def test_two_clique_bridge_recovers_the_cliques():
    partition = louvain(_two_cliques(4), seed=0)
    assert partition.communities == [{0, 1, 2, 3}, {4, 5, 6, 7}]
    assert partition.average_size == 4.0


@pytest.mark.parametrize("seed", range(100))
def test_louvain_levels_never_decrease_modularity(seed):
    rng = random.Random(seed)
    graph = nx.gnp_random_graph(rng.randint(2, 50), rng.uniform(0.05, 0.5), seed=seed)
    for u, v in graph.edges:
        graph[u][v]["weight"] = rng.randint(1, 5)
    partition = louvain(graph, seed=seed)
    levels = partition.level_modularities
    assert all(b >= a - 1e-9 for a, b in zip(levels, levels[1:]))
    assert sorted(partition.assignment) == sorted(graph.nodes)


def test_louvain_degenerate_graphs():
    assert louvain(nx.Graph()).communities == []
    edgeless = nx.Graph()
    edgeless.add_nodes_from(["b", "a"])
    partition = louvain(edgeless)
    assert partition.communities == [{"a"}, {"b"}]
    assert partition.modularity == 0.0


def test_louvain_is_deterministic_for_a_seed():
    graph = nx.gnp_random_graph(30, 0.2, seed=7)
    assert louvain(graph, seed=3).assignment == louvain(graph, seed=3).assignment
