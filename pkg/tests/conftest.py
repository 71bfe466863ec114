from importlib import resources

import pytest

from siotrust.graph import SocialGraph, load_edge_list


def make_graph(n: int, edges) -> SocialGraph:
    """Graph over nodes 0..n-1 with the given edges; isolated nodes kept."""
    adj = [set() for _ in range(n)]
    for u, v in edges:
        if u == v:
            continue
        adj[u].add(v)
        adj[v].add(u)
    return SocialGraph(
        adjacency=tuple(tuple(sorted(s)) for s in adj),
        original_ids=tuple(range(n)),
    )


def data_text(name: str) -> str:
    return resources.files("siotrust.data").joinpath(name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def fb_graph() -> SocialGraph:
    return load_edge_list(data_text("facebook_like.edges"))


@pytest.fixture(scope="session")
def syn50_graph() -> SocialGraph:
    return load_edge_list(data_text("synthetic_50.edges"))


@pytest.fixture()
def triangle() -> SocialGraph:
    return load_edge_list("0 1\n1 2\n2 0\n")


@pytest.fixture()
def path3() -> SocialGraph:
    return load_edge_list("0 1\n1 2\n")
