"""Social-network topology loading, connectivity statistics, and role sampling.

Edge lists follow the SNAP convention: one "u v" pair per line, lines
starting with `#` ignored. Node ids are remapped to a dense 0..N-1 range on
load; the original ids are retained for reporting and serialization.
Self-loops are dropped and duplicate edges collapse to one undirected edge.
"""

from __future__ import annotations

import random
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Union


class GraphFormatError(ValueError):
    """Malformed edge-list or feature input."""


@dataclass(frozen=True)
class SocialGraph:
    """Undirected social topology with optional per-node feature bit-vectors.

    Immutable after construction and safe to share across concurrent runs.
    `adjacency[n]` is the sorted tuple of n's neighbors (dense ids);
    `original_ids[n]` maps a dense id back to the source file's id.
    """

    adjacency: tuple[tuple[int, ...], ...]
    original_ids: tuple[int, ...]
    features: Optional[tuple[tuple[int, ...], ...]] = None

    @property
    def node_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def nodes(self) -> range:
        return range(self.node_count)

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self.adjacency[node]

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def edges(self) -> Iterable[tuple[int, int]]:
        for u in self.nodes():
            for v in self.adjacency[u]:
                if u < v:
                    yield (u, v)


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    avg_degree: float
    diameter: int
    avg_path_length: float
    avg_clustering: float
    components: int


@dataclass(frozen=True)
class RoleAssignment:
    """Sampled trustor and trustee node sets (dense ids, sorted)."""

    trustors: tuple[int, ...]
    trustees: tuple[int, ...]


STATS_HEADER = "nodes,edges,avg_degree,diameter,avg_path_length,avg_clustering,components"


def build_graph(edge_pairs: Iterable[tuple[int, int]]) -> SocialGraph:
    """Build a graph from original-id edge pairs, remapping to dense ids."""
    edges = set()
    nodes = set()
    for u, v in edge_pairs:
        nodes.add(u)
        nodes.add(v)
        if u == v:
            continue
        edges.add((u, v) if u < v else (v, u))
    if not nodes:
        raise GraphFormatError("empty edge list")
    original = tuple(sorted(nodes))
    dense = {orig: i for i, orig in enumerate(original)}
    adj: list[list[int]] = [[] for _ in original]
    for u, v in edges:
        adj[dense[u]].append(dense[v])
        adj[dense[v]].append(dense[u])
    return SocialGraph(
        adjacency=tuple(tuple(sorted(nbrs)) for nbrs in adj),
        original_ids=original,
    )


def _lines(source: Union[str, bytes]) -> list[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return source.splitlines()


def load_edge_list(source) -> SocialGraph:
    """Parse a SNAP-style edge list from a string, bytes, or readable stream.

    Each non-empty, non-comment line must hold exactly two non-negative
    integers. Malformed lines raise GraphFormatError naming the line number.
    """
    if hasattr(source, "read"):
        source = source.read()
    pairs = []
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"line {lineno}: expected two node ids, got {len(tokens)} tokens")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: node ids must be integers: {line!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: node ids must be non-negative")
        pairs.append((u, v))
    if not pairs:
        raise GraphFormatError("empty edge list")
    return build_graph(pairs)


def serialize_edge_list(graph: SocialGraph) -> str:
    """Emit the graph as edge-list text using original node ids."""
    lines = []
    for u, v in graph.edges():
        lines.append(f"{graph.original_ids[u]} {graph.original_ids[v]}")
    return "\n".join(lines) + "\n"


def load_features(source, graph: SocialGraph) -> SocialGraph:
    """Attach per-node 0/1 feature vectors ("nodeId f1 ... fk" per line).

    Node ids refer to the original ids of the edge list. Nodes absent from
    the file get all-zero vectors; unknown ids and ragged rows are errors.
    """
    if hasattr(source, "read"):
        source = source.read()
    dense = {orig: i for i, orig in enumerate(graph.original_ids)}
    rows: dict[int, tuple[int, ...]] = {}
    width: Optional[int] = None
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            node = int(tokens[0])
            flags = tuple(int(t) for t in tokens[1:])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: feature rows must be integers") from None
        if node not in dense:
            raise GraphFormatError(f"line {lineno}: node {node} not in graph")
        if any(f not in (0, 1) for f in flags):
            raise GraphFormatError(f"line {lineno}: feature flags must be 0 or 1")
        if width is None:
            width = len(flags)
        elif len(flags) != width:
            raise GraphFormatError(f"line {lineno}: ragged row, expected {width} flags, got {len(flags)}")
        rows[dense[node]] = flags
    width = width or 0
    zero = tuple([0] * width)
    features = tuple(rows.get(n, zero) for n in graph.nodes())
    return SocialGraph(adjacency=graph.adjacency, original_ids=graph.original_ids, features=features)


def connected_components(graph: SocialGraph) -> list[list[int]]:
    """Components as sorted node lists, largest first (ties by smallest node)."""
    seen = [False] * graph.node_count
    components = []
    for start in graph.nodes():
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nbr in graph.neighbors(node):
                if not seen[nbr]:
                    seen[nbr] = True
                    comp.append(nbr)
                    queue.append(nbr)
        comp.sort()
        components.append(comp)
    components.sort(key=lambda c: (-len(c), c[0]))
    return components


def compute_stats(graph: SocialGraph) -> GraphStats:
    """Connectivity statistics: BFS all-pairs paths, local clustering average.

    Diameter and average path length are measured on the largest connected
    component; the component count flags disconnected inputs. Clustering
    averages over all nodes, with degree < 2 nodes contributing zero.
    """
    n = graph.node_count
    if n == 0:
        raise GraphFormatError("cannot compute stats of an empty graph")
    comps = connected_components(graph)
    largest = comps[0]
    in_largest = [False] * n
    for node in largest:
        in_largest[node] = True

    diameter = 0
    total_dist = 0
    pair_count = 0
    if len(largest) > 1:
        for source in largest:
            dist = {source: 0}
            queue = deque([source])
            while queue:
                node = queue.popleft()
                d = dist[node]
                for nbr in graph.neighbors(node):
                    if nbr not in dist:
                        dist[nbr] = d + 1
                        queue.append(nbr)
            far = max(dist.values())
            diameter = max(diameter, far)
            total_dist += sum(dist.values())
            pair_count += len(dist) - 1
    avg_path = total_dist / pair_count if pair_count else 0.0

    neighbor_sets = [set(nbrs) for nbrs in graph.adjacency]
    clustering_sum = 0.0
    for node in graph.nodes():
        nbrs = graph.adjacency[node]
        deg = len(nbrs)
        if deg < 2:
            continue
        links = 0
        for i in range(deg):
            s = neighbor_sets[nbrs[i]]
            for j in range(i + 1, deg):
                if nbrs[j] in s:
                    links += 1
        clustering_sum += 2.0 * links / (deg * (deg - 1))

    edge_count = graph.edge_count
    return GraphStats(
        node_count=n,
        edge_count=edge_count,
        avg_degree=2.0 * edge_count / n,
        diameter=diameter,
        avg_path_length=avg_path,
        avg_clustering=clustering_sum / n,
        components=len(comps),
    )


def stats_csv(stats: GraphStats) -> str:
    """Header plus one CSV row for the stats report."""
    row = (
        f"{stats.node_count},{stats.edge_count},{stats.avg_degree:.6g},"
        f"{stats.diameter},{stats.avg_path_length:.6g},{stats.avg_clustering:.6g},"
        f"{stats.components}"
    )
    return STATS_HEADER + "\n" + row + "\n"


def sample_roles(
    graph: SocialGraph,
    fraction: float,
    rng: random.Random,
    disjoint: bool = False,
) -> RoleAssignment:
    """Sample trustor and trustee sets of size round(fraction * N).

    The two samples are independent and may overlap unless `disjoint` is
    set. Deterministic for a given rng state.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    n = graph.node_count
    count = round(fraction * n)
    trustors = sorted(rng.sample(range(n), count))
    if disjoint:
        if 2 * count > n:
            raise ValueError(f"cannot draw disjoint roles: 2 * {count} > {n} nodes")
        remaining = sorted(set(range(n)) - set(trustors))
        trustees = sorted(rng.sample(remaining, count))
    else:
        trustees = sorted(rng.sample(range(n), count))
    return RoleAssignment(trustors=tuple(trustors), trustees=tuple(trustees))
