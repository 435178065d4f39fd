"""Brute-force reference implementations used by the tests.

Nothing here imports the enumeration code under test: cycles, bonds and
cuts are recomputed from scratch over all edge subsets / vertex bipartitions.
"""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np


def edge_subsets(edges):
    edges = list(edges)
    for r in range(len(edges) + 1):
        for combo in itertools.combinations(edges, r):
            yield frozenset(combo)


def degrees(g, s):
    deg = {v: 0 for v in g.vertices}
    for e in s:
        a, b = g.edges[e]
        deg[a] += 1
        deg[b] += 1
    return deg


def is_even(g, s):
    return all(d % 2 == 0 for d in degrees(g, s).values())


def touched(g, s):
    return {v for e in s for v in g.edges[e]}


def edges_connected(g, s):
    """The subgraph formed by the edges of ``s`` is connected (ignoring isolated vertices)."""
    if not s:
        return True
    h = nx.MultiGraph()
    for e in s:
        h.add_edge(*g.edges[e], key=e)
    return nx.is_connected(h)


def minimal(family):
    family = [s for s in set(family) if s]
    return {s for s in family if not any(t < s for t in family)}


def brute_cycles(g):
    """Edge sets of cycles: minimal nonempty even-degree edge sets."""
    return minimal(s for s in edge_subsets(g.edges) if is_even(g, s))


def crossing(g, side):
    return frozenset(e for e, (a, b) in g.edges.items() if (a in side) != (b in side))


def brute_cuts(g):
    vs = sorted(g.vertices, key=repr)
    out = set()
    for r in range(len(vs) + 1):
        for side in itertools.combinations(vs, r):
            out.add(crossing(g, set(side)))
    return out


def brute_bonds(g):
    return minimal(brute_cuts(g))


def mask_bits(masks: np.ndarray, i: int) -> np.ndarray:
    return ((masks >> np.uint64(i)) & np.uint64(1)).astype(bool)


def touched_connected(masks: np.ndarray, ends, n_vertices: int) -> np.ndarray:
    """Vectorised: for each edge-set mask, are the touched vertices connected through it?

    ``ends`` lists ``(bit, a, b)`` with vertex indices.  Label propagation
    along the chosen edges, ``n_vertices`` rounds.
    """
    lab = np.tile(np.arange(n_vertices), (len(masks), 1))
    on = [(mask_bits(masks, i), a, b) for i, a, b in ends]
    for _ in range(n_vertices):
        for sel, a, b in on:
            m = np.minimum(lab[:, a], lab[:, b])
            lab[sel, a] = m[sel]
            lab[sel, b] = m[sel]
    hit = np.zeros((len(masks), n_vertices), bool)
    for sel, a, b in on:
        hit[sel, a] = True
        hit[sel, b] = True
    big = np.where(hit, lab, n_vertices + 1)
    small = np.where(hit, lab, -1)
    return (big.min(1) == small.max(1)) | ~hit.any(1)


def connected_multigraphs(max_vertices: int, max_edges: int):
    """Connected multigraphs on up to ``max_vertices`` vertices and ``max_edges`` edges, up to isomorphism.

    Loops and parallel edges included.  Yields ``(vertex count, pair list)``.
    """
    seen = set()
    for nv in range(1, max_vertices + 1):
        pairs = [(a, b) for a in range(nv) for b in range(a, nv)]
        perms = list(itertools.permutations(range(nv)))
        for m in range(max_edges + 1):
            for combo in itertools.combinations_with_replacement(pairs, m):
                h = nx.MultiGraph()
                h.add_nodes_from(range(nv))
                h.add_edges_from(combo)
                if not nx.is_connected(h):
                    continue
                key = min(tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in combo)) for p in perms)
                if (nv, key) in seen:
                    continue
                seen.add((nv, key))
                yield nv, list(combo)


def multigraph_strategy(max_vertices: int = 6, max_edges: int = 9, connected: bool = True):
    """Hypothesis strategy for small multigraphs with int vertices and edges."""
    from hypothesis import strategies as st

    from topocycles.graph import Multigraph

    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_vertices))
        pairs = []
        if connected:
            for v in range(1, n):
                pairs.append((draw(st.integers(0, v - 1)), v))
        vertex = st.integers(0, n - 1)
        extra = draw(st.lists(st.tuples(vertex, vertex), max_size=max(0, max_edges - len(pairs))))
        return Multigraph(frozenset(range(n)), dict(enumerate(pairs + extra)))

    return build()
