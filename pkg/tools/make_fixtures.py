#!/usr/bin/env python3
"""Regenerate the bundled graph fixtures and their oracle statistics.

Builds two committed fixtures under src/siotrust/data/:
  - synthetic_50: small default topology so every CLI subcommand runs fast
  - facebook_like: 347 nodes / 5038 edges, the scale of the Facebook
    subnetwork used for the acceptance checks

Both are Watts-Strogatz-style small worlds (ring lattice, partial rewiring,
extra chords to hit the exact edge count) and are connected by construction,
checked here. Reference diameter / path length / clustering values are
computed with networkx (only needed when regenerating) and frozen into
fixture_stats.json; the test suite asserts the package's own BFS statistics
against those frozen numbers.

Run from the repository root: python tools/make_fixtures.py
"""

from __future__ import annotations

import json
import random
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "siotrust" / "data"


def small_world_edges(n: int, k: int, rewire_p: float, target_edges: int, seed: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    edges = set()
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            edges.add((min(u, v), max(u, v)))
    # rewire one endpoint of a fraction of lattice edges
    for edge in sorted(edges):
        if rng.random() >= rewire_p:
            continue
        u, _ = edge
        for _ in range(20):
            w = rng.randrange(n)
            cand = (min(u, w), max(u, w))
            if w != u and cand not in edges:
                edges.discard(edge)
                edges.add(cand)
                break
    while len(edges) < target_edges:
        u = rng.randrange(n)
        w = rng.randrange(n)
        if u == w:
            continue
        edges.add((min(u, w), max(u, w)))
    if len(edges) != target_edges:
        raise RuntimeError(f"edge count {len(edges)} != target {target_edges}")
    return sorted(edges)


def is_connected(n: int, edges: list[tuple[int, int]]) -> bool:
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        node = stack.pop()
        for nbr in adj[node]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    return len(seen) == n


def feature_lines(n: int, cols: int, seed: int) -> str:
    rng = random.Random(seed)
    densities = [0.25 + 0.5 * rng.random() for _ in range(cols)]
    lines = []
    for node in range(n):
        bits = " ".join("1" if rng.random() < densities[c] else "0" for c in range(cols))
        lines.append(f"{node} {bits}")
    return "\n".join(lines) + "\n"


def oracle_stats(n: int, edges: list[tuple[int, int]]) -> dict:
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    components = list(nx.connected_components(g))
    largest = g.subgraph(max(components, key=len))
    return {
        "nodes": g.number_of_nodes(),
        "edges": g.number_of_edges(),
        "avg_degree": 2.0 * g.number_of_edges() / g.number_of_nodes(),
        "diameter": nx.diameter(largest),
        "avg_path_length": nx.average_shortest_path_length(largest),
        "avg_clustering": nx.average_clustering(g),
        "components": len(components),
    }


def write_fixture(name: str, n: int, k: int, rewire_p: float, target_edges: int,
                  feat_cols: int, seed: int) -> dict:
    edges = small_world_edges(n, k, rewire_p, target_edges, seed)
    if not is_connected(n, edges):
        raise RuntimeError(f"{name}: fixture is not connected, pick another seed")
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    edge_text = "# %s fixture: %d nodes, %d edges\n" % (name, n, len(edges))
    edge_text += "\n".join(f"{u} {v}" for u, v in edges) + "\n"
    (DATA_DIR / f"{name}.edges").write_text(edge_text, encoding="utf-8")
    (DATA_DIR / f"{name}.feat").write_text(feature_lines(n, feat_cols, seed + 1), encoding="utf-8")
    stats = oracle_stats(n, edges)
    print(f"{name}: {stats}")
    return stats


def main():
    all_stats = {
        "synthetic_50": write_fixture("synthetic_50", n=50, k=8, rewire_p=0.15,
                                      target_edges=220, feat_cols=8, seed=20240312),
        "facebook_like": write_fixture("facebook_like", n=347, k=28, rewire_p=0.12,
                                       target_edges=5038, feat_cols=12, seed=20240311),
    }
    (DATA_DIR / "fixture_stats.json").write_text(
        json.dumps(all_stats, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote fixtures to {DATA_DIR}")


if __name__ == "__main__":
    main()
