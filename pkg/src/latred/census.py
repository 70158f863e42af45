"""Exhaustive census of small negative definite plumbing trees."""

from __future__ import annotations

import itertools
from functools import lru_cache

from .graph import PlumbingGraph, validate_graph


def _prufer_trees(n: int):
    if n == 1:
        yield ()
        return
    if n == 2:
        yield ((0, 1),)
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for v in seq:
            degree[v] += 1
        edges = []
        for v in seq:
            leaf = min(u for u in range(n) if degree[u] == 1)
            edges.append((min(leaf, v), max(leaf, v)))
            degree[leaf] -= 1
            degree[v] -= 1
        u, w = [x for x in range(n) if degree[x] == 1]
        edges.append((u, w))
        yield tuple(sorted(edges))


def canonical_form(euler, edges) -> str:
    """Isomorphism invariant of a decorated tree (AHU strings, min over roots)."""
    n = len(euler)
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)

    def enc(v, parent):
        kids = sorted(enc(u, v) for u in adj[v] if u != parent)
        return f"({euler[v]}{''.join(kids)})"

    return min(enc(r, -1) for r in range(n))


@lru_cache(maxsize=None)
def small_trees(max_vertices: int = 5, decorations: tuple = (-1, -2, -3, -4)) -> tuple:
    """All negative definite trees up to isomorphism, in a deterministic order."""
    seen = set()
    out = []
    for n in range(1, max_vertices + 1):
        shapes = []
        shape_seen = set()
        for edges in _prufer_trees(n):
            key = canonical_form((0,) * n, edges)
            if key not in shape_seen:
                shape_seen.add(key)
                shapes.append(edges)
        for edges in shapes:
            for euler in itertools.product(decorations, repeat=n):
                key = canonical_form(euler, edges)
                if key in seen:
                    continue
                seen.add(key)
                g = PlumbingGraph(tuple(euler), edges)
                if validate_graph(g).ok:
                    out.append(g)
    return tuple(out)
