import math
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from facihub.hypergraph import (CentralityTable, Hyperedge, Hypergraph,
                                HypergraphNode, build_hypergraph, s_closeness,
                                select_top_targets)

from conftest import LogBuilder, ts

WINDOW = (ts("2025-12-01T00:00:00Z"), ts("2025-12-03T00:00:00Z"))


def graph_from_edges(edge_sets, node_types=None):
    h = Hypergraph()
    for i, members in enumerate(edge_sets):
        h.hyperedges.append(Hyperedge(members=frozenset(members),
                                      source_record_id=f"e{i}"))
        for m in members:
            kind = (node_types or {}).get(m, "U")
            h.nodes.setdefault(m, HypergraphNode(node_id=m, node_type=kind))
    return h


def brute_force_closeness(h: Hypergraph, s: int) -> dict[str, float]:
    """Independent oracle: dense co-occurrence matrix + Floyd-Warshall."""
    ids = sorted(h.nodes)
    index = {node_id: i for i, node_id in enumerate(ids)}
    n = len(ids)
    co = np.zeros((n, n), dtype=int)
    for edge in h.hyperedges:
        members = [index[m] for m in edge.members]
        for a in members:
            for b in members:
                if a != b:
                    co[a, b] += 1
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    dist[co >= s] = 1.0
    for k in range(n):
        dist = np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :])
    scores = {}
    for node_id, i in index.items():
        reachable = np.isfinite(dist[i])
        size = int(reachable.sum())  # component size incl. self
        if size <= 1:
            scores[node_id] = 0.0
        else:
            scores[node_id] = (size - 1) / float(dist[i][reachable].sum())
    return scores


# -- construction -------------------------------------------------------------


def test_posted_hyperedge_actor_post_author_dedup():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-01T10:00:00Z")
    h = build_hypergraph(b.store().records, WINDOW)
    assert len(h.hyperedges) == 1
    assert h.hyperedges[0].members == frozenset({"u1", "p1"})


def test_commented_hyperedge_members():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-01T10:00:00Z")
    b.comment("c1", "p1", "u2", "2025-12-01T11:00:00Z")
    h = build_hypergraph(b.store().records, WINDOW)
    assert h.hyperedges[1].members == frozenset({"u2", "p1", "u1", "c1"})


def test_replied_hyperedge_members():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-01T10:00:00Z")
    b.comment("c1", "p1", "u2", "2025-12-01T11:00:00Z")
    b.reply("r1", "c1", "u3", "2025-12-01T12:00:00Z")
    h = build_hypergraph(b.store().records, WINDOW)
    assert h.hyperedges[2].members == frozenset({"u3", "p1", "u1", "c1", "u2", "r1"})


def test_like_edges_match_their_create_edges():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-01T10:00:00Z")
    b.comment("c1", "p1", "u2", "2025-12-01T11:00:00Z")
    b.reply("r1", "c1", "u3", "2025-12-01T12:00:00Z")
    b.like_comment("c1", "u4", "2025-12-01T13:00:00Z")
    b.like_reply("r1", "u5", "2025-12-01T14:00:00Z")
    h = build_hypergraph(b.store().records, WINDOW)
    assert h.hyperedges[3].members == frozenset({"u4", "p1", "u1", "c1", "u2"})
    assert h.hyperedges[4].members == frozenset({"u5", "p1", "u1", "c1", "u2", "r1", "u3"})


def test_window_is_half_open():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-01T00:00:00Z")   # at start: included
    b.post("p2", "u2", "2025-12-03T00:00:00Z")   # at end: excluded
    h = build_hypergraph(b.store().records, WINDOW)
    assert len(h.hyperedges) == 1
    assert "p2" not in h.nodes


def test_empty_window_yields_empty_hypergraph():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-05T00:00:00Z")
    h = build_hypergraph(b.store().records, WINDOW)
    assert h.nodes == {} and h.hyperedges == []


def test_node_types():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-01T10:00:00Z")
    b.comment("c1", "p1", "u2", "2025-12-01T11:00:00Z")
    b.reply("r1", "c1", "u3", "2025-12-01T12:00:00Z")
    h = build_hypergraph(b.store().records, WINDOW)
    types = {node_id: n.node_type for node_id, n in h.nodes.items()}
    assert types == {"u1": "U", "u2": "U", "u3": "U",
                     "p1": "P", "c1": "C", "r1": "C"}


def test_every_hyperedge_round_trips_to_one_record():
    b = LogBuilder()
    b.post("p1", "u1", "2025-12-01T10:00:00Z")
    b.comment("c1", "p1", "u2", "2025-12-01T11:00:00Z")
    b.like_comment("c1", "u3", "2025-12-01T12:00:00Z")
    store = b.store()
    h = build_hypergraph(store.records, WINDOW)
    sources = [e.source_record_id for e in h.hyperedges]
    assert len(sources) == len(set(sources))
    for source in sources:
        assert store.get(source) is not None


# -- centrality ----------------------------------------------------------------


def test_path_graph_closeness():
    h = graph_from_edges([{"a", "b"}, {"b", "c"}])
    table = s_closeness(h, s=1)
    assert table.scores["b"] == pytest.approx(1.0)
    assert table.scores["a"] == pytest.approx(2 / 3)
    assert table.scores["c"] == pytest.approx(2 / 3)


def test_disjoint_components_score_within_component():
    h = graph_from_edges([{"a", "b"}, {"c", "d"}])
    table = s_closeness(h, s=1)
    assert all(score == pytest.approx(1.0) for score in table.scores.values())


def test_isolated_node_scores_zero():
    # d shares no pair of hyperedges at s=2.
    h = graph_from_edges([{"a", "b"}, {"a", "b"}, {"a", "d"}])
    table = s_closeness(h, s=2)
    assert table.scores["d"] == 0.0
    assert table.scores["a"] == pytest.approx(1.0)


def test_s_must_be_positive():
    with pytest.raises(ValueError):
        s_closeness(graph_from_edges([{"a", "b"}]), s=0)


def test_scores_in_unit_interval_and_match_oracle_on_random_graphs():
    rng = np.random.default_rng(7)
    for _ in range(60):
        n_nodes = int(rng.integers(2, 13))
        n_edges = int(rng.integers(1, 11))
        names = [f"n{i}" for i in range(n_nodes)]
        edges = []
        for _ in range(n_edges):
            size = int(rng.integers(2, min(5, n_nodes) + 1))
            edges.append(set(rng.choice(names, size=size, replace=False)))
        h = graph_from_edges(edges)
        for s in (1, 2):
            table = s_closeness(h, s=s)
            oracle = brute_force_closeness(h, s=s)
            assert table.scores == oracle
            assert all(0.0 <= v <= 1.0 for v in table.scores.values())


def test_permutation_invariance_of_scores():
    edges = [{"a", "b", "c"}, {"b", "d"}, {"c", "d"}, {"d", "e"}]
    h1 = graph_from_edges(edges)
    mapping = {"a": "z9", "b": "y8", "c": "x7", "d": "w6", "e": "v5"}
    h2 = graph_from_edges([{mapping[m] for m in e} for e in edges])
    t1 = s_closeness(h1, 1)
    t2 = s_closeness(h2, 1)
    for old, new in mapping.items():
        assert t1.scores[old] == pytest.approx(t2.scores[new], abs=0)


# -- selection ------------------------------------------------------------------


def nodes_with_scores(count, node_type, score_fn, base_time=None):
    base_time = base_time or datetime(2025, 12, 1, tzinfo=timezone.utc)
    nodes = []
    scores = {}
    for i in range(count):
        node_id = f"{node_type.lower()}{i:03d}"
        nodes.append(HypergraphNode(node_id=node_id, node_type=node_type,
                                    created_at=base_time + timedelta(minutes=i)))
        scores[node_id] = score_fn(i)
    return nodes, scores


def test_ceiling_rule_forty_posts():
    nodes, scores = nodes_with_scores(40, "P", lambda i: i / 40)
    sel = select_top_targets(CentralityTable(scores=scores, s=1), nodes, 0.05)
    assert len(sel.selected_posts) == 2


def test_ceiling_rule_twenty_one_comments():
    nodes, scores = nodes_with_scores(21, "C", lambda i: i / 21)
    sel = select_top_targets(CentralityTable(scores=scores, s=1), nodes, 0.05)
    assert len(sel.selected_comments) == 2


def test_tie_break_newest_created_at_first():
    nodes, scores = nodes_with_scores(3, "P", lambda i: 0.5)
    sel = select_top_targets(CentralityTable(scores=scores, s=1), nodes, 0.34)
    assert sel.selected_posts == ["p002", "p001"]  # newest first


def test_rank_order_is_score_descending():
    nodes, scores = nodes_with_scores(10, "P", lambda i: i / 10)
    sel = select_top_targets(CentralityTable(scores=scores, s=1), nodes, 0.5)
    got = [scores[p] for p in sel.selected_posts]
    assert got == sorted(got, reverse=True)


def test_empty_type_class_yields_empty_list():
    nodes, scores = nodes_with_scores(5, "P", lambda i: i / 5)
    sel = select_top_targets(CentralityTable(scores=scores, s=1), nodes, 0.2)
    assert sel.selected_comments == []


def test_fraction_bounds():
    nodes, scores = nodes_with_scores(5, "P", lambda i: i / 5)
    table = CentralityTable(scores=scores, s=1)
    with pytest.raises(ValueError):
        select_top_targets(table, nodes, 0.0)
    with pytest.raises(ValueError):
        select_top_targets(table, nodes, 1.2)


def test_monotone_selection_in_fraction():
    rng = np.random.default_rng(3)
    nodes, scores = nodes_with_scores(23, "P", lambda i: float(rng.random()))
    cnodes, cscores = nodes_with_scores(17, "C", lambda i: float(rng.random()))
    scores.update(cscores)
    table = CentralityTable(scores=scores, s=1)
    pool = nodes + cnodes
    previous_posts, previous_comments = set(), set()
    for fraction in (0.05, 0.1, 0.3, 0.6, 1.0):
        sel = select_top_targets(table, pool, fraction)
        assert previous_posts <= set(sel.selected_posts)
        assert previous_comments <= set(sel.selected_comments)
        previous_posts = set(sel.selected_posts)
        previous_comments = set(sel.selected_comments)
        assert len(sel.selected_posts) == math.ceil(fraction * 23)
        assert len(sel.selected_comments) == math.ceil(fraction * 17)
