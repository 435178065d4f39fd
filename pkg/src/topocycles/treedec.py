"""Tree-decompositions with one part per edge, torsos, and a verifier.

A decomposition assigns to every node ``t`` of a rooted tree a part
``P_t = (vertices, edges)``; every edge of the graph lies in exactly one part.
The verifier checks, besides the usual axioms, the two extra properties the
gluing construction relies on: for a tree edge ``tu`` with ``u`` below ``t``
the vertices of parts at or below ``u`` outside ``P_t`` span a connected
subgraph, and the adhesion sets on consecutive tree edges are disjoint.

Infinite built-in families get a hand-made :class:`LazyTreeDecomposition`;
it is verified on the finite windows ``G[column < n]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Hashable, List, Mapping, Optional, Tuple

from .ends import end_approximations
from .families import LazyGraph, double_ray, family as make_family, ray, star
from .graph import Multigraph, decode_token, encode_token, is_connected, ordered, sort_key

Node = Hashable
Vertex = Hashable
EdgeId = Hashable


@dataclass(frozen=True)
class Part:
    vertices: FrozenSet[Vertex] = frozenset()
    edges: FrozenSet[EdgeId] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", frozenset(self.edges))

    def __bool__(self):
        return bool(self.vertices or self.edges)


@dataclass(frozen=True, eq=False)
class TreeDecomposition:
    """Finite rooted tree (``parent[root] is None``) with a part per node."""

    parent: Mapping[Node, Optional[Node]]
    parts: Mapping[Node, Part]

    def __post_init__(self):
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "parts", {t: self.parts.get(t, Part()) for t in self.parent})

    @property
    def nodes(self) -> List[Node]:
        return ordered(self.parent)

    @property
    def root(self) -> Node:
        roots = [t for t, p in self.parent.items() if p is None]
        if len(roots) != 1:
            raise ValueError(f"expected one root, found {len(roots)}")
        return roots[0]

    def children(self, t: Node) -> List[Node]:
        return self._children().get(t, [])

    @lru_cache(maxsize=None)
    def _children(self) -> Dict[Node, List[Node]]:
        out: Dict[Node, List[Node]] = {}
        for t in self.nodes:
            p = self.parent[t]
            if p is not None:
                out.setdefault(p, []).append(t)
        return out

    def neighbors(self, t: Node) -> List[Node]:
        p = self.parent[t]
        return ([p] if p is not None else []) + self.children(t)

    def tree_edges(self) -> List[Tuple[Node, Node]]:
        """``(parent, child)`` pairs."""
        return [(p, t) for t in self.nodes if (p := self.parent[t]) is not None]

    def adhesion(self, t: Node, u: Node) -> FrozenSet[Vertex]:
        return self.parts[t].vertices & self.parts[u].vertices

    def depth(self, t: Node) -> int:
        d = 0
        while self.parent[t] is not None:
            t = self.parent[t]
            d += 1
        return d

    def subtree(self, u: Node) -> List[Node]:
        out, stack = [], [u]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children(x))
        return out

    # -- text -----------------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for t in sorted(self.nodes, key=lambda x: (self.depth(x), sort_key(x))):
            p = self.parent[t]
            part = self.parts[t]
            vs = ", ".join(encode_token(v) for v in ordered(part.vertices))
            es = ", ".join(encode_token(e) for e in ordered(part.edges))
            lines.append(f"node {encode_token(t)} parent {'-' if p is None else encode_token(p)}; part: {vs}; edges: {es}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TreeDecomposition":
        parent, parts = {}, {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                head, vs, es = (x.strip() for x in line.split(";"))
                _, t, _, p = head.split()
                assert vs.startswith("part:") and es.startswith("edges:")
            except (ValueError, AssertionError):
                raise ValueError(f"line {lineno}: cannot parse {raw!r}") from None
            node = decode_token(t)
            parent[node] = None if p == "-" else decode_token(p)
            parts[node] = Part(_tokens(vs[5:]), _tokens(es[6:]))
        return cls(parent, parts)


def _tokens(body: str):
    return [decode_token(x.strip()) for x in body.split(", ") if x.strip()]


def from_bags(g: Multigraph, bags: List, parent: Optional[Mapping[int, Optional[int]]] = None) -> TreeDecomposition:
    """Decomposition with nodes ``0..k-1`` (a path unless ``parent`` is given).

    Each edge goes to the first bag containing both its ends.
    """
    bags = [frozenset(b) for b in bags]
    if parent is None:
        parent = {i: (i - 1 if i else None) for i in range(len(bags))}
    edges: Dict[int, set] = {i: set() for i in range(len(bags))}
    for e in g.edge_order():
        a, b = g.ends(e)
        home = next((i for i, bag in enumerate(bags) if a in bag and b in bag), None)
        if home is None:
            raise ValueError(f"no bag contains both ends of {e!r}")
        edges[home].add(e)
    return TreeDecomposition(parent, {i: Part(bags[i], edges[i]) for i in range(len(bags))})


def single_part(g: Multigraph) -> TreeDecomposition:
    return TreeDecomposition({0: None}, {0: Part(g.vertices, g.edges)})


def two_part(g: Multigraph) -> TreeDecomposition:
    """Split off the last vertex: bags ``V - {x}`` and ``{x} ∪ N(x)``."""
    order = g.vertex_order()
    if len(order) < 2:
        return single_part(g)
    x = order[-1]
    return from_bags(g, [set(order[:-1]), {x} | {w for _, w in g.adjacency()[x]}])


def random_treedec(g: Multigraph, rng: random.Random, max_nodes: int = 5) -> TreeDecomposition:
    """Random valid decomposition: each vertex gets a random subtree, grown until edges are covered."""
    k = rng.randint(1, max_nodes)
    parent = {0: None}
    for i in range(1, k):
        parent[i] = rng.randrange(i)
    adj = {i: set() for i in range(k)}
    for i, p in parent.items():
        if p is not None:
            adj[i].add(p)
            adj[p].add(i)

    def tree_path(a, b):
        prev = {a: None}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in prev:
                    prev[y] = x
                    stack.append(y)
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out

    home = {}
    for v in g.vertex_order():
        s = {rng.randrange(k)}
        for _ in range(rng.randint(0, 2)):
            x = rng.choice(sorted(s))
            s.add(rng.choice(sorted(adj[x] | {x})))
        home[v] = s
    for e in g.edge_order():
        a, b = g.ends(e)
        if not home[a] & home[b]:
            target = rng.choice(sorted(home[b]))
            start = min(home[a], key=lambda x: len(tree_path(x, target)))
            home[a].update(tree_path(start, target))
    parts_v = {i: set() for i in range(k)}
    parts_e = {i: set() for i in range(k)}
    for v, s in home.items():
        for i in s:
            parts_v[i].add(v)
    for e in g.edge_order():
        a, b = g.ends(e)
        parts_e[rng.choice(sorted(home[a] & home[b]))].add(e)
    return TreeDecomposition(parent, {i: Part(parts_v[i], parts_e[i]) for i in range(k)})


# -- torsos ---------------------------------------------------------------------------


def tree_edge_key(t: Node, u: Node) -> Tuple[Node, Node]:
    a, b = ordered([t, u])
    return (a, b)


def virtual_edge(t: Node, u: Node, a: Vertex, b: Vertex) -> tuple:
    """Id of the virtual edge ``ab`` on the adhesion of tree edge ``tu`` (same id from both sides)."""
    x, y = ordered([a, b])
    return ("~",) + tree_edge_key(t, u) + (x, y)


def is_virtual(e) -> bool:
    return isinstance(e, tuple) and len(e) == 5 and e[0] == "~"


def edge_label(e) -> str:
    if is_virtual(e):
        return f"{encode_token(e[3])}{encode_token(e[4])}_v"
    return encode_token(e)


@dataclass(frozen=True, eq=False)
class Torso:
    node: Node
    graph: Multigraph
    # tree neighbour -> virtual edges on that adhesion
    virtual: Dict[Node, FrozenSet[EdgeId]] = field(default_factory=dict)

    @property
    def real_edges(self) -> FrozenSet[EdgeId]:
        return frozenset(e for e in self.graph.edges if not is_virtual(e))

    @property
    def virtual_edges(self) -> FrozenSet[EdgeId]:
        return frozenset().union(*self.virtual.values()) if self.virtual else frozenset()


def torso(td: TreeDecomposition, t: Node, g: Optional[Multigraph] = None) -> Torso:
    """``P_t`` plus a complete graph of virtual edges on each adhesion set.

    Part edges get their ends from ``g``; restrictions of lazy decompositions
    carry them along, so ``g`` may be omitted there.
    """
    part = td.parts[t]
    ends = _edge_ends(td, g)
    edges = {e: ends[e] for e in part.edges}
    virtual = {}
    for u in td.neighbors(t):
        adh = ordered(td.adhesion(t, u))
        vs = set()
        for i, a in enumerate(adh):
            for b in adh[i + 1:]:
                e = virtual_edge(t, u, a, b)
                edges[e] = (a, b)
                vs.add(e)
        virtual[u] = frozenset(vs)
    return Torso(t, Multigraph(part.vertices, edges), virtual)


def _edge_ends(td: TreeDecomposition, g: Optional[Multigraph]) -> Mapping:
    if g is not None:
        return g.edges
    ends = getattr(td, "edge_ends", None)
    if ends is None:
        raise ValueError("pass the graph to look up part edges")
    return ends


# -- verification ---------------------------------------------------------------------

CHECKS = ("tree", "coverage", "edge-unique", "connectivity", "finite-adhesion", "up-set-connected", "adhesion-disjoint")


@dataclass
class TreeDecReport:
    results: List[Tuple[str, bool, object]]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.results)

    def first_violation(self):
        return next(((n, w) for n, ok, w in self.results if not ok), None)

    def passed(self, name: str) -> bool:
        return next(ok for n, ok, _ in self.results if n == name)

    def to_text(self) -> str:
        lines = []
        for name, ok, wit in self.results:
            line = f"{name:18s} {'PASS' if ok else 'FAIL'}"
            if wit is not None:
                line += f"  {wit}"
            lines.append(line)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": [{"name": n, "ok": ok, "witness": None if w is None else str(w)} for n, ok, w in self.results]}


def _check_tree(td: TreeDecomposition):
    roots = [t for t, p in td.parent.items() if p is None]
    if len(roots) != 1:
        return False, f"{len(roots)} roots"
    for t, p in td.parent.items():
        if p is not None and p not in td.parent:
            return False, f"parent {p!r} of {t!r} is not a node"
    for t in td.parent:
        seen = set()
        x = t
        while x is not None:
            if x in seen:
                return False, f"cycle through {t!r}"
            seen.add(x)
            x = td.parent[x]
    return True, None


def verify_treedec(g: Multigraph, td: TreeDecomposition, adhesion_bound: Optional[int] = None) -> TreeDecReport:
    """Check every property in :data:`CHECKS`; each failure carries a witness.

    ``adhesion_bound`` caps the adhesion size (the finite-adhesion check on a
    window of an infinite graph); by default any finite size passes.
    """
    results: List[Tuple[str, bool, object]] = []
    ok, wit = _check_tree(td)
    results.append(("tree", ok, wit))
    if not ok:
        results += [(n, False, "tree check failed") for n in CHECKS[1:]]
        return TreeDecReport(results)

    # coverage and part sanity
    wit = None
    seen_v = set()
    for t in td.nodes:
        p = td.parts[t]
        if not p.vertices <= g.vertices:
            wit = f"part {t!r} has non-vertex {ordered(p.vertices - g.vertices)[0]!r}"
            break
        for e in ordered(p.edges):
            if e not in g.edges:
                wit = f"part {t!r} has non-edge {e!r}"
                break
            if not set(g.ends(e)) <= p.vertices:
                wit = f"edge {e!r} in part {t!r} without its ends"
                break
        if wit:
            break
        seen_v |= p.vertices
    if wit is None:
        missing_v = g.vertices - seen_v
        covered_e = set().union(*(td.parts[t].edges for t in td.nodes)) if td.nodes else set()
        missing_e = set(g.edges) - covered_e
        if missing_v:
            wit = f"vertex {ordered(missing_v)[0]!r} in no part"
        elif missing_e:
            wit = f"edge {ordered(missing_e)[0]!r} in no part"
    results.append(("coverage", wit is None, wit))

    owner: Dict[EdgeId, Node] = {}
    wit = None
    for t in td.nodes:
        for e in ordered(td.parts[t].edges):
            if e in owner:
                wit = f"edge {e!r} in parts {owner[e]!r} and {t!r}"
                break
            owner[e] = t
        if wit:
            break
    results.append(("edge-unique", wit is None, wit))

    # the nodes containing v induce a subtree iff exactly one of them has its parent outside
    wit = None
    holders: Dict[Vertex, List[Node]] = {}
    for t in td.nodes:
        for v in td.parts[t].vertices:
            holders.setdefault(v, []).append(t)
    for v in ordered(holders):
        hs = set(holders[v])
        tops = [t for t in hs if td.parent[t] not in hs]
        if len(tops) > 1:
            wit = f"vertex {v!r} lies in disconnected nodes {ordered(hs)}"
            break
    results.append(("connectivity", wit is None, wit))

    wit = None
    sizes = {(s, t): len(td.adhesion(s, t)) for s, t in td.tree_edges()}
    if adhesion_bound is not None:
        bad = [k for k, n in sizes.items() if n > adhesion_bound]
        if bad:
            wit = f"adhesion on {bad[0]!r} has {sizes[bad[0]]} > {adhesion_bound} vertices"
    results.append(("finite-adhesion", wit is None, wit if wit else f"max size {max(sizes.values(), default=0)}"))

    # vertices at or below u outside P_t must be connected
    below: Dict[Node, FrozenSet[Vertex]] = {}
    for t in sorted(td.nodes, key=td.depth, reverse=True):
        below[t] = td.parts[t].vertices.union(*(below[c] for c in td.children(t)))
    wit = None
    for t, u in td.tree_edges():
        x = below[u] - td.parts[t].vertices
        if x and not is_connected(g.subgraph(x)):
            wit = f"tree edge {t!r}-{u!r}: {len(x)} vertices below not connected"
            break
    results.append(("up-set-connected", wit is None, wit))

    wit = None
    for s, t in td.tree_edges():
        for u in td.children(t):
            both = td.adhesion(s, t) & td.adhesion(t, u)
            if both:
                wit = f"adhesions {s!r}-{t!r} and {t!r}-{u!r} share {ordered(both)[0]!r}"
                break
        if wit:
            break
    results.append(("adhesion-disjoint", wit is None, wit))
    return TreeDecReport(results)


# -- lazy decompositions of the built-in families ---------------------------------------


@dataclass(frozen=True, eq=False)
class LazyTreeDecomposition:
    """Decomposition of an infinite family; ``tree`` is itself a lazy graph on the nodes."""

    family: LazyGraph
    tree: LazyGraph
    parent: Callable[[Node], Optional[Node]]
    # part of a node restricted to the vertices of column < horizon
    part: Callable[[Node, int], Part]
    description: str = ""

    def restrict(self, n: int) -> TreeDecomposition:
        """The decomposition induced on the window ``G[column < n]``."""
        parts = {}
        for t in self.tree.exhaustion(n + 1):
            p = self.part(t, n)
            if p:
                parts[t] = p
        parent = {t: (self.parent(t) if self.parent(t) in parts else None) for t in parts}
        td = TreeDecomposition(parent, parts)
        object.__setattr__(td, "edge_ends", self.family.window(n).edges)
        return td

    def verify(self, n: int) -> TreeDecReport:
        """Verify on the window of columns ``< n``; adhesions must not grow with ``n``."""
        g = self.family.window(n)
        td = self.restrict(n)
        report = verify_treedec(g, td)
        # adhesions of edges well inside the window are final
        far = self.restrict(n + 3)
        grown = [
            (s, t)
            for s, t in td.tree_edges()
            if _inner(self, s, t, n) and td.adhesion(s, t) != far.adhesion(s, t)
        ]
        if grown:
            report.results[4] = ("finite-adhesion", False, f"adhesion on {grown[0]!r} grows with the window")
        return report

    def tree_end_count(self, bound: int) -> int:
        return len(end_approximations(self.tree, bound))


def _inner(ltd: LazyTreeDecomposition, s, t, n) -> bool:
    cols = [ltd.tree.col(x) for x in (s, t) if x not in ltd.tree.hubs]
    return max(cols, default=-1) < n - 2


def _window_vertices(g: LazyGraph, horizon: int, vs) -> FrozenSet[Vertex]:
    return frozenset(v for v in vs if v in g.hubs or g.column(v) < horizon)


def _part_from(g: LazyGraph, horizon: int, vs, es) -> Part:
    keep = _window_vertices(g, horizon, vs)
    return Part(keep, frozenset(e for e in es if set(g.endpoints(e)) <= keep))


def _ray_tree() -> LazyGraph:
    return ray()


def _ladder_td(g: LazyGraph) -> LazyTreeDecomposition:
    def part(i, h):
        vs = [("u", i), ("l", i), ("u", i + 1), ("l", i + 1)]
        return _part_from(g, h, vs, [("R", i), ("U", i), ("L", i)])

    return LazyTreeDecomposition(g, _ray_tree(), lambda i: i - 1 if i > 0 else None, part, "ray of column parts")


def _comb_td(g: LazyGraph) -> LazyTreeDecomposition:
    # the tooth of s_{i+1} sits with the spine edge into it, so the rest below stays connected
    def part(i, h):
        vs = [("s", i), ("s", i + 1), ("t", i + 1)]
        es = [("S", i), ("T", i + 1)]
        if i == 0:
            vs.append(("t", 0))
            es.append(("T", 0))
        return _part_from(g, h, vs, es)

    return LazyTreeDecomposition(g, _ray_tree(), lambda i: i - 1 if i > 0 else None, part, "ray of spine segments")


def _ray_td(g: LazyGraph) -> LazyTreeDecomposition:
    def part(i, h):
        return _part_from(g, h, [i, i + 1], [("e", i)])

    return LazyTreeDecomposition(g, _ray_tree(), lambda i: i - 1 if i > 0 else None, part, "ray of edges")


def _double_ray_td(g: LazyGraph) -> LazyTreeDecomposition:
    def part(i, h):
        return _part_from(g, h, [i, i + 1], [("e", i)])

    def parent(i):
        return None if i == 0 else i - 1 if i > 0 else i + 1

    return LazyTreeDecomposition(g, double_ray(), parent, part, "double ray of edges")


def _grid_layer_edges(g: LazyGraph, k: int) -> List[EdgeId]:
    """Edges between layers k and k+1 and inside layer k+1."""
    w = g.window(k + 3)
    out = []
    for e, (a, b) in w.edges.items():
        if a in g.hubs or b in g.hubs:
            continue
        cols = sorted((g.column(a), g.column(b)))
        if cols in ([k, k + 1], [k + 1, k + 1]):
            out.append(e)
    return out


def _grid_td(g: LazyGraph) -> LazyTreeDecomposition:
    cache: Dict[int, List[EdgeId]] = {}

    def part(k, h):
        if k not in cache:
            cache[k] = _grid_layer_edges(g, k)
        return _part_from(g, h, list(g.layer(k)) + list(g.layer(k + 1)), cache[k])

    return LazyTreeDecomposition(g, _ray_tree(), lambda k: k - 1 if k > 0 else None, part, "ray of layer pairs")


def _binary_tree_td(g: LazyGraph) -> LazyTreeDecomposition:
    def part(x, h):
        if len(x) == 1:
            return _part_from(g, h, [x], [])
        return _part_from(g, h, [x[:-1], x], [("T",) + x[1:]])

    return LazyTreeDecomposition(g, g, lambda x: x[:-1] if len(x) > 1 else None, part, "the tree itself, one edge per part")


def _star_td(g: LazyGraph) -> LazyTreeDecomposition:
    def part(x, h):
        if x == "c":
            return _part_from(g, h, ["c"], [])
        return _part_from(g, h, ["c", x], [("s", x[1])])

    return LazyTreeDecomposition(g, g, lambda x: None if x == "c" else "c", part, "star of edges")


def _dominated_ladder_td(g: LazyGraph, subdivided: bool) -> LazyTreeDecomposition:
    """Rayless: a centre holding every vertex of degree > 2 in the parts, with one finite leaf per column."""

    def part(x, h):
        if x == "c":
            vs = ["d"] + [v for c in range(h) for v in g.layer(c) if v[0] != "m"]
            return _part_from(g, h, vs, [])
        i = x[1]
        vs = ["d", ("u", i), ("l", i), ("u", i + 1), ("l", i + 1)]
        es = [("U", i), ("L", i), ("D", i)]
        if subdivided:
            vs.append(("m", i))
            es += [("Ra", i), ("Rb", i)]
        else:
            es.append(("R", i))
        return _part_from(g, h, vs, es)

    return LazyTreeDecomposition(g, star(), lambda x: None if x == "c" else "c", part, "star of finite column parts")


def _edge_star_td(g: LazyGraph) -> LazyTreeDecomposition:
    """Centre with every vertex and no edge; one leaf per edge."""
    cache: Dict[int, List[EdgeId]] = {}

    def edges_of_column(c):
        if c not in cache:
            w = g.window(c + 2)
            cache[c] = ordered(e for e in w.edges if g.edge_column(e) == c)
        return cache[c]

    def incident(v, width):
        if v == "C":
            return [(("P", e), e) for c in range(width) for e in edges_of_column(c)]
        return [(("P", v), "C")]

    tree = LazyGraph(
        name=f"edge-star({g.name})",
        root="C",
        hubs=frozenset(["C"]),
        column=lambda e: g.edge_column(e),
        layer=edges_of_column,
        _incident=incident,
        endpoints=lambda te: ("C", te[1]),
    )

    def part(x, h):
        if x == "C":
            return _part_from(g, h, g.exhaustion(h), [])
        return _part_from(g, h, g.endpoints(x), [x])

    return LazyTreeDecomposition(g, tree, lambda x: None if x == "C" else "C", part, "star of single edges")


_BUILDERS: Dict[str, Callable[[LazyGraph], LazyTreeDecomposition]] = {
    "ladder": _ladder_td,
    "comb": _comb_td,
    "ray": _ray_td,
    "double-ray": _double_ray_td,
    "grid": _grid_td,
    "binary-tree": _binary_tree_td,
    "star": _star_td,
    "dominated-ladder": lambda g: _dominated_ladder_td(g, False),
    "subdivided-dominated-ladder": lambda g: _dominated_ladder_td(g, True),
    "apex-grid": _edge_star_td,
}


def canonical_treedec(g) -> LazyTreeDecomposition:
    """Registered decomposition of a built-in family (by object or name)."""
    if isinstance(g, str):
        g = make_family(g)
    try:
        return _BUILDERS[g.name](g)
    except KeyError:
        raise KeyError(f"no registered decomposition for {g.name!r}") from None
