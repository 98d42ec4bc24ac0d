"""Interaction hypergraph over a window of activity: construction,
s-closeness centrality, and top-fraction target selection.

Each in-window record becomes one hyperedge joining actor, artifacts, and
authors. Two nodes are s-adjacent when they co-occur in at least s
hyperedges; closeness is computed within each connected component as
(|C|-1) / sum of shortest-path distances, with isolated nodes scored 0
(no component-size rescaling).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime
from itertools import combinations
from pathlib import Path
from typing import Iterable

from .records import ActionRecord

CLOSENESS_CONVENTION = "component-restricted, isolated=0, unscaled"


@dataclass(frozen=True)
class HypergraphNode:
    node_id: str
    node_type: str  # U | P | C
    created_at: datetime | None = None


@dataclass(frozen=True)
class Hyperedge:
    members: frozenset[str]
    source_record_id: str


@dataclass
class Hypergraph:
    nodes: dict[str, HypergraphNode] = field(default_factory=dict)
    hyperedges: list[Hyperedge] = field(default_factory=list)

    def nodes_of_type(self, node_type: str) -> list[HypergraphNode]:
        return [n for n in self.nodes.values() if n.node_type == node_type]


@dataclass(frozen=True)
class CentralityTable:
    scores: dict[str, float]
    s: int
    convention: str = CLOSENESS_CONVENTION


@dataclass(frozen=True)
class TargetSelection:
    selected_posts: list[str]
    selected_comments: list[str]
    fraction: float


def _edge_members(rec: ActionRecord) -> dict[str, str]:
    """Map node_id -> node_type for one record's hyperedge.

    posted joins {actor, post, post_author}; comment actions additionally
    join the comment and its author; reply actions further join the reply
    and its author. Coincident roles collapse (sets, not multisets).
    """
    members = {rec.actor_id: "U", rec.post_id: "P", rec.post_author_id: "U"}
    if rec.action_type in ("commented", "replied", "liked_comment", "liked_reply"):
        members[rec.comment_id] = "C"
        members[rec.comment_author_id] = "U"
    if rec.action_type in ("replied", "liked_reply"):
        members[rec.reply_id] = "C"
        members[rec.reply_author_id] = "U"
    return members


def build_hypergraph(records: Iterable[ActionRecord],
                     window: tuple[datetime, datetime]) -> Hypergraph:
    """One hyperedge per record inside the half-open window [start, end)."""
    start, end = window
    h = Hypergraph()
    created: dict[str, datetime] = {}
    for rec in records:
        if not (start <= rec.timestamp < end):
            continue
        # Track artifact creation times for tie-breaking at selection.
        if rec.action_type == "posted":
            created.setdefault(rec.post_id, rec.timestamp)
        elif rec.action_type == "commented":
            created.setdefault(rec.comment_id, rec.timestamp)
        elif rec.action_type == "replied":
            created.setdefault(rec.reply_id, rec.timestamp)
        members = _edge_members(rec)
        if len(members) < 2:
            continue  # degenerate edge after role collapse; cannot occur with distinct artifact ids
        h.hyperedges.append(Hyperedge(members=frozenset(members),
                                      source_record_id=rec.record_id))
        for node_id, node_type in members.items():
            if node_id not in h.nodes:
                h.nodes[node_id] = HypergraphNode(node_id=node_id, node_type=node_type,
                                                  created_at=created.get(node_id))
            elif node_type != "U" and h.nodes[node_id].created_at is None:
                if created.get(node_id) is not None:
                    h.nodes[node_id] = HypergraphNode(node_id=node_id, node_type=node_type,
                                                      created_at=created[node_id])
    # Backfill creation times learned after a node was first seen.
    for node_id, ts in created.items():
        node = h.nodes.get(node_id)
        if node is not None and node.created_at is None:
            h.nodes[node_id] = HypergraphNode(node_id=node.node_id,
                                              node_type=node.node_type, created_at=ts)
    return h


def _s_adjacency(h: Hypergraph, s: int) -> dict[str, set[str]]:
    counts: dict[tuple[str, str], int] = {}
    for edge in h.hyperedges:
        for a, b in combinations(sorted(edge.members), 2):
            counts[(a, b)] = counts.get((a, b), 0) + 1
    adj: dict[str, set[str]] = {node_id: set() for node_id in h.nodes}
    for (a, b), c in counts.items():
        if c >= s:
            adj[a].add(b)
            adj[b].add(a)
    return adj


def s_closeness(h: Hypergraph, s: int = 1) -> CentralityTable:
    """Closeness centrality on the s-shared-hyperedge adjacency graph.

    closeness(v) = (|C_v| - 1) / sum of BFS distances to the rest of v's
    component; isolated nodes score 0. Deterministic for a fixed hypergraph.
    """
    if s < 1:
        raise ValueError(f"adjacency level s must be >= 1, got {s}")
    adj = _s_adjacency(h, s)
    scores: dict[str, float] = {}
    for node_id in h.nodes:
        if not adj[node_id]:
            scores[node_id] = 0.0
            continue
        dist = {node_id: 0}
        queue = deque([node_id])
        total = 0
        while queue:
            cur = queue.popleft()
            for nxt in adj[cur]:
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    total += dist[nxt]
                    queue.append(nxt)
        scores[node_id] = (len(dist) - 1) / total
    return CentralityTable(scores=scores, s=s)


def _rank_key(node: HypergraphNode, score: float):
    # Score descending, then newer created_at first, then lexicographic id.
    created = node.created_at.timestamp() if node.created_at is not None else float("-inf")
    return (-score, -created, node.node_id)


def select_top_targets(table: CentralityTable, nodes: Iterable[HypergraphNode],
                       fraction: float = 0.05) -> TargetSelection:
    """Top ceil(fraction * type-count) P-type and C-type nodes by score."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    selected: dict[str, list[str]] = {}
    for node_type in ("P", "C"):
        pool = [n for n in nodes if n.node_type == node_type]
        if not pool:
            selected[node_type] = []
            continue
        k = math.ceil(fraction * len(pool))
        ranked = sorted(pool, key=lambda n: _rank_key(n, table.scores.get(n.node_id, 0.0)))
        selected[node_type] = [n.node_id for n in ranked[:k]]
    return TargetSelection(selected_posts=selected["P"],
                           selected_comments=selected["C"], fraction=fraction)


def export_centrality_ndjson(h: Hypergraph, table: CentralityTable,
                             path: str | Path) -> None:
    """Write (node_id, node_type, score) lines for offline inspection."""
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"meta": {"s": table.s, "convention": table.convention}}) + "\n")
        for node_id in sorted(h.nodes):
            node = h.nodes[node_id]
            fh.write(json.dumps({"node_id": node_id, "node_type": node.node_type,
                                 "score": table.scores.get(node_id, 0.0)}) + "\n")
