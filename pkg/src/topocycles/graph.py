"""Finite multigraphs: components, cuts, bonds, cycles and the contraction G+[W].

Vertex and edge ids are arbitrary hashable values (strings, ints, tuples).
Edge sets are frozensets of edge ids at the API; the exponential oracles
encode them as int bitsets over a sorted edge order.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Tuple

Vertex = Hashable
EdgeId = Hashable
EdgeSet = FrozenSet[EdgeId]

#: brute-force enumerations refuse inputs larger than this
DEFAULT_EDGE_LIMIT = 16
DEFAULT_VERTEX_LIMIT = 16


class SizeLimitError(ValueError):
    pass


def sort_key(x):
    """Total order on the mixed ids used throughout the package."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    if isinstance(x, frozenset):
        return (3, tuple(sorted(sort_key(y) for y in x)))
    return (4, repr(x))


def ordered(items: Iterable) -> list:
    return sorted(items, key=sort_key)


def edge_set_key(s):
    return (len(s), [sort_key(e) for e in ordered(s)])


@dataclass(frozen=True, eq=True)
class Multigraph:
    vertices: FrozenSet[Vertex]
    edges: Mapping[EdgeId, Tuple[Vertex, Vertex]]
    # branch sets of contracted vertices; real vertices are absent
    labels: Mapping[Vertex, FrozenSet[Vertex]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", dict(self.edges))
        object.__setattr__(self, "labels", {v: frozenset(b) for v, b in self.labels.items()})
        for e, (u, v) in self.edges.items():
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge {e!r} has an undeclared endpoint")
        for v in self.labels:
            if v not in self.vertices:
                raise ValueError(f"label on undeclared vertex {v!r}")

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_edges(cls, edges, vertices=()):
        """Build from ``{eid: (u, v)}`` or an iterable of ``(u, v)`` pairs (ids 0, 1, ...)."""
        if not isinstance(edges, Mapping):
            edges = {i: tuple(uv) for i, uv in enumerate(edges)}
        vs = set(vertices)
        for u, v in edges.values():
            vs.add(u)
            vs.add(v)
        return cls(frozenset(vs), edges)

    # -- basic queries ------------------------------------------------------

    def ends(self, e: EdgeId) -> Tuple[Vertex, Vertex]:
        return self.edges[e]

    def incident(self, v: Vertex) -> List[EdgeId]:
        return [e for e, (a, b) in self.edges.items() if a == v or b == v]

    def adjacency(self) -> Dict[Vertex, List[Tuple[EdgeId, Vertex]]]:
        adj: Dict[Vertex, List[Tuple[EdgeId, Vertex]]] = {v: [] for v in self.vertices}
        for e, (a, b) in self.edges.items():
            adj[a].append((e, b))
            if a != b:
                adj[b].append((e, a))
        return adj

    def degree(self, v: Vertex, edge_set: Optional[Iterable[EdgeId]] = None) -> int:
        """Degree of ``v``; loops count twice."""
        es = self.edges if edge_set is None else edge_set
        d = 0
        for e in es:
            a, b = self.edges[e]
            d += (a == v) + (b == v)
        return d

    def edge_order(self) -> List[EdgeId]:
        return ordered(self.edges)

    def vertex_order(self) -> List[Vertex]:
        return ordered(self.vertices)

    def subgraph(self, vertices: Iterable[Vertex]) -> "Multigraph":
        vs = frozenset(vertices)
        es = {e: uv for e, uv in self.edges.items() if uv[0] in vs and uv[1] in vs}
        return Multigraph(vs, es, {v: b for v, b in self.labels.items() if v in vs})

    def edge_subgraph(self, edge_set: Iterable[EdgeId]) -> "Multigraph":
        es = {e: self.edges[e] for e in edge_set}
        return Multigraph(self.vertices, es, self.labels)

    def vertices_of(self, edge_set: Iterable[EdgeId]) -> FrozenSet[Vertex]:
        out = set()
        for e in edge_set:
            out.update(self.edges[e])
        return frozenset(out)

    def branch_set(self, v: Vertex) -> FrozenSet[Vertex]:
        return self.labels.get(v, frozenset([v]))

    # -- text / DOT ------------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for v in self.vertex_order():
            if v in self.labels:
                lines.append(f"v {encode_token(v)} {encode_token(ordered(self.labels[v]))}")
            else:
                lines.append(f"v {encode_token(v)}")
        for e in self.edge_order():
            a, b = self.edges[e]
            lines.append(f"e {encode_token(e)} {encode_token(a)} {encode_token(b)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Multigraph":
        vs, es, labels = set(), {}, {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "v" and len(parts) in (2, 3):
                v = decode_token(parts[1])
                vs.add(v)
                if len(parts) == 3:
                    labels[v] = frozenset(decode_token(parts[2]))
            elif parts[0] == "e" and len(parts) == 4:
                e = decode_token(parts[1])
                if e in es:
                    raise ValueError(f"line {lineno}: duplicate edge id {parts[1]}")
                es[e] = (decode_token(parts[2]), decode_token(parts[3]))
            else:
                raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        return cls(frozenset(vs), es, labels)

    def to_dot(self, name: str = "G", highlight: Iterable[EdgeId] = ()) -> str:
        hl = set(highlight)
        ids = {v: f"n{i}" for i, v in enumerate(self.vertex_order())}
        out = [f"graph {name} {{"]
        for v, nid in ids.items():
            shape = ",shape=box" if v in self.labels else ""
            out.append(f'  {nid} [label="{_dot_escape(encode_token(v))}"{shape}];')
        for e in self.edge_order():
            a, b = self.edges[e]
            attrs = f'label="{_dot_escape(encode_token(e))}"'
            if e in hl:
                attrs += ",color=gray,penwidth=3"
            out.append(f"  {ids[a]} -- {ids[b]} [{attrs}];")
        out.append("}")
        return "\n".join(out) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(y) for y in x)
    return x


def encode_token(x) -> str:
    """Whitespace-free reversible token for an id (plain names stay bare)."""
    if isinstance(x, str) and x and (x[0].isalpha() or x[0] == "_") and all(
        c.isalnum() or c in "_'." for c in x
    ):
        return x
    if isinstance(x, (frozenset, set)):
        x = ordered(x)
    return json.dumps(x, separators=(",", ":"))


def decode_token(tok: str):
    if tok and (tok[0].isalpha() or tok[0] == "_"):
        return tok
    return _tuplify(json.loads(tok))


# -- separations, cuts --------------------------------------------------------


@dataclass(frozen=True)
class Separation:
    edges: EdgeSet


@dataclass(frozen=True)
class Cut:
    edges: EdgeSet
    side: FrozenSet[Vertex]
    other: FrozenSet[Vertex]


def components(g: Multigraph) -> List[FrozenSet[Vertex]]:
    adj = g.adjacency()
    seen = set()
    out = []
    for s in g.vertex_order():
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            x = stack.pop()
            for _, y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def is_connected(g: Multigraph) -> bool:
    return len(components(g)) <= 1


def induced_cut(g: Multigraph, side: Iterable[Vertex]) -> Cut:
    a = frozenset(side)
    if not a <= g.vertices:
        raise ValueError("side must be a subset of the vertices")
    crossing = frozenset(e for e, (u, v) in g.edges.items() if (u in a) != (v in a))
    return Cut(crossing, a, g.vertices - a)


def boundary(g: Multigraph, x) -> FrozenSet[Vertex]:
    """Vertices incident with an edge of ``x`` and an edge outside ``x``."""
    xs = x.edges if isinstance(x, Separation) else frozenset(x)
    inside, outside = set(), set()
    for e, (u, v) in g.edges.items():
        (inside if e in xs else outside).update((u, v))
    return frozenset(inside & outside)


def edges_touching(g: Multigraph, vertex_set: Iterable[Vertex]) -> EdgeSet:
    """``s_C``: edges with at least one endpoint in the vertex set."""
    c = frozenset(vertex_set)
    return frozenset(e for e, (u, v) in g.edges.items() if u in c or v in c)


def _check_size(g: Multigraph, edge_limit, vertex_limit):
    if edge_limit is not None and len(g.edges) > edge_limit:
        raise SizeLimitError(f"{len(g.edges)} edges exceeds the brute-force limit {edge_limit}")
    if vertex_limit is not None and len(g.vertices) > vertex_limit:
        raise SizeLimitError(
            f"{len(g.vertices)} vertices exceeds the brute-force limit {vertex_limit}"
        )


def all_cuts(g: Multigraph, vertex_limit=DEFAULT_VERTEX_LIMIT) -> List[Cut]:
    """Every cut, one per bipartition up to swapping sides (brute force)."""
    _check_size(g, None, vertex_limit)
    vs = g.vertex_order()
    if not vs:
        return []
    first, rest = vs[0], vs[1:]
    out = []
    for mask in range(1 << len(rest)):
        side = {first} | {rest[i] for i in range(len(rest)) if (mask >> i) & 1}
        out.append(induced_cut(g, side))
    return out


def bonds(
    g: Multigraph, edge_limit=DEFAULT_EDGE_LIMIT, vertex_limit=DEFAULT_VERTEX_LIMIT
) -> List[Cut]:
    """All minimal nonempty cuts, each once (brute force over bipartitions)."""
    _check_size(g, edge_limit, vertex_limit)
    by_edges: Dict[EdgeSet, Cut] = {}
    for c in all_cuts(g, vertex_limit):
        if c.edges and c.edges not in by_edges:
            by_edges[c.edges] = c
    sets = list(by_edges)
    minimal = [s for s in sets if not any(t < s for t in sets)]
    return [by_edges[s] for s in sorted(minimal, key=edge_set_key)]


def cycle_edge_sets(g: Multigraph, edge_limit=DEFAULT_EDGE_LIMIT) -> List[EdgeSet]:
    """Edge sets of all simple cycles, including loops and parallel pairs.

    Depth-first enumeration: each cycle is found from its smallest vertex
    and deduplicated by edge set.
    """
    _check_size(g, edge_limit, None)
    found = set()
    for e, (u, v) in g.edges.items():
        if u == v:
            found.add(frozenset([e]))
    adj = g.adjacency()
    order = {v: i for i, v in enumerate(g.vertex_order())}
    for s in g.vertex_order():
        rank_s = order[s]

        def dfs(x, used_v, used_e):
            for e, y in adj[x]:
                if e in used_e or y == x:
                    continue
                if y == s and len(used_e) >= 1:
                    found.add(frozenset(used_e | {e}))
                elif y not in used_v and order[y] > rank_s:
                    dfs(y, used_v | {y}, used_e | {e})

        dfs(s, {s}, frozenset())
    return sorted(found, key=edge_set_key)


def cycle_space_basis(g: Multigraph) -> List[EdgeSet]:
    """Fundamental cycles of a spanning forest."""
    parent: Dict[Vertex, Tuple[Vertex, EdgeId]] = {}
    depth: Dict[Vertex, int] = {}
    adj = g.adjacency()
    tree_edges = set()
    for s in g.vertex_order():
        if s in depth:
            continue
        depth[s] = 0
        queue = [s]
        for x in queue:
            for e, y in adj[x]:
                if y not in depth:
                    depth[y] = depth[x] + 1
                    parent[y] = (x, e)
                    tree_edges.add(e)
                    queue.append(y)
    basis = []
    for e in g.edge_order():
        if e in tree_edges:
            continue
        a, b = g.edges[e]
        path = {e}
        while a != b:
            if depth[a] < depth[b]:
                a, b = b, a
            pa, pe = parent[a]
            path ^= {pe}
            a = pa
        basis.append(frozenset(path))
    return basis


def is_even_degree(g: Multigraph, edge_set: Iterable[EdgeId]) -> bool:
    deg: Dict[Vertex, int] = {}
    for e in edge_set:
        u, v = g.edges[e]
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return all(d % 2 == 0 for d in deg.values())


# -- contraction G+[W] and the inverse-system maps ----------------------------


def _contracted_id(branch: FrozenSet[Vertex]):
    return ("K", ordered(branch)[0])


def project(g_plus_w: Multigraph, u: Iterable[Vertex]) -> Tuple[Multigraph, Dict[Vertex, Vertex]]:
    """Contract ``g_plus_w`` down to ``G+[U]`` and return it with the vertex map.

    ``U`` must consist of real (unlabelled) vertices of ``g_plus_w``.  Each
    component of ``g_plus_w - U`` becomes one vertex whose branch set is the
    union of the branch sets it absorbs; edges with both ends outside ``U``
    vanish, all other edges are kept with redirected endpoints.
    """
    us = frozenset(u)
    if not us <= g_plus_w.vertices or us & set(g_plus_w.labels):
        raise ValueError("U must be a subset of the real vertices of G+[W]")
    rest = g_plus_w.subgraph(g_plus_w.vertices - us)
    vmap: Dict[Vertex, Vertex] = {v: v for v in us}
    labels = {}
    for comp in components(rest):
        branch = frozenset().union(*(g_plus_w.branch_set(x) for x in comp))
        cid = _contracted_id(branch)
        labels[cid] = branch
        for x in comp:
            vmap[x] = cid
    edges = {}
    for e, (a, b) in g_plus_w.edges.items():
        if a in us or b in us:
            edges[e] = (vmap[a], vmap[b])
    return Multigraph(frozenset(vmap.values()), edges, labels), vmap


def contract_to(g: Multigraph, w: Iterable[Vertex]) -> Multigraph:
    """``G+[W]``: contract every edge not incident with ``W``."""
    return project(g, w)[0]


def compose_maps(outer: Mapping, inner: Mapping) -> Dict:
    """``outer ∘ inner`` as dicts."""
    return {x: outer[y] for x, y in inner.items()}


# -- small named graphs and random multigraphs -----------------------------------


def _from_pairs(pairs) -> Multigraph:
    return Multigraph.from_edges({f"{a}{b}": (a, b) for a, b in pairs})


def cycle_graph(n: int) -> Multigraph:
    """``c<n>`` on vertices a, b, c, ... with edges named by their ends (``ab``, ``bc``, ...)."""
    names = [chr(ord("a") + i) for i in range(n)]
    return _from_pairs([(names[i], names[(i + 1) % n]) for i in range(n)])


def complete_graph(n: int) -> Multigraph:
    names = [chr(ord("a") + i) for i in range(n)]
    return _from_pairs([(names[i], names[j]) for i in range(n) for j in range(i + 1, n)])


def path_graph(n: int) -> Multigraph:
    names = [chr(ord("a") + i) for i in range(n)]
    return _from_pairs([(names[i], names[i + 1]) for i in range(n - 1)])


def named_graph(name: str) -> Multigraph:
    """``k<n>``, ``c<n>``, ``p<n>``, ``loop``, ``theta`` (three parallel edges), ``k23``."""
    name = name.lower()
    if name == "loop":
        return Multigraph.from_edges({"l": ("a", "a")})
    if name == "theta":
        return Multigraph.from_edges({"e1": ("a", "b"), "e2": ("a", "b"), "e3": ("a", "b")})
    if name == "k23":
        return _from_pairs([(x, y) for x in "ab" for y in "cde"])
    kind, num = name[:1], name[1:]
    if num.isdigit():
        n = int(num)
        if kind == "k" and n >= 1:
            return complete_graph(n)
        if kind == "c" and n >= 3:
            return cycle_graph(n)
        if kind == "p" and n >= 1:
            return path_graph(n)
    raise KeyError(f"unknown graph {name!r}; try k4, c4, p3, loop, theta, k23")


def random_multigraph(rng: random.Random, max_vertices: int = 7, max_edges: int = 12, connected: bool = True) -> Multigraph:
    """Random multigraph (loops and parallel edges allowed); a random spanning tree first when ``connected``."""
    n = rng.randint(1, max_vertices)
    vs = list(range(n))
    pairs = []
    if connected:
        for v in vs[1:]:
            pairs.append((rng.randrange(v), v))
    extra = rng.randint(0, max(0, max_edges - len(pairs)))
    for _ in range(extra):
        pairs.append((rng.randrange(n), rng.randrange(n)))
    return Multigraph(frozenset(vs), dict(enumerate(pairs)))
