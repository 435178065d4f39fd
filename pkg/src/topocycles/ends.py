"""Ends of lazily presented graphs: truncations, end chains, domination, combs.

Ends are approximated through the inverse system of contractions
``G+[W_1] <- G+[W_2] <- ...`` over the family's column exhaustion.  An end
at bound ``b`` is a chain of infinite components, one per level, each
mapping into the previous one.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from .families import InfiniteDegreeError, LazyGraph
from .graph import Multigraph, components, contract_to, ordered, project
from .matroid import Unknown

Vertex = Hashable
Path = Tuple[Vertex, ...]


# -- balls and truncations -----------------------------------------------------------


def ball(g: Union[LazyGraph, Multigraph], r: Vertex, k: int, width: Optional[int] = None) -> Multigraph:
    """Induced subgraph on ``B_k(r)``.

    A hub reached at distance ``< k`` has infinitely many neighbours; ``width``
    caps its enumeration to vertices of column ``< width``.
    """
    if k < 0:
        raise ValueError("radius must be non-negative")
    lazy = isinstance(g, LazyGraph)
    adj = None if lazy else g.adjacency()

    def nbrs(v):
        if not lazy:
            return adj[v]
        if v in g.hubs:
            if width is None:
                raise InfiniteDegreeError(f"{v!r} has infinite degree inside the ball; pass width")
            return g.incident(v, width)
        return g.incident(v)

    dist = {r: 0}
    queue = deque([r])
    while queue:
        x = queue.popleft()
        if dist[x] == k:
            continue
        for _, y in nbrs(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    inside = frozenset(dist)
    if not lazy:
        return g.subgraph(inside)
    edges = {}
    for v in inside:
        if v in g.hubs and dist[v] == k and width is None:
            continue  # its edges into the ball are found from the other side
        for e, w in nbrs(v):
            if w in inside:
                edges[e] = g.endpoints(e)
    return Multigraph(inside, edges)


@functools.lru_cache(maxsize=256)
def _window(g: LazyGraph, horizon: int) -> Multigraph:
    return g.window(horizon)


@functools.lru_cache(maxsize=512)
def _truncation(g: LazyGraph, n: int, horizon: int) -> Multigraph:
    return contract_to(_window(g, horizon), g.exhaustion(n))


def truncate(g: LazyGraph, n: int, horizon: Optional[int] = None) -> Multigraph:
    """``G+[W_n]`` computed inside the window of columns ``< horizon``.

    Contracted vertices are ``("K", v)`` for the least vertex ``v`` of the
    component; their labels are the component's vertices inside the window.
    Edges from a hub are materialised only up to the horizon.
    """
    if n < 1:
        raise ValueError("truncation level must be >= 1")
    h = g.default_horizon(n) if horizon is None else horizon
    if h <= n:
        raise ValueError("horizon must exceed the level")
    return _truncation(g, n, h)


def infinite_parts(g: LazyGraph, n: int, horizon: int) -> List[Vertex]:
    """Contracted vertices of ``truncate(g, n, horizon)`` whose component is infinite."""
    t = truncate(g, n, horizon)
    return [c for c in ordered(t.labels) if any(g.escapes(x, horizon) for x in t.labels[c])]


def part_containing(t: Multigraph, v: Vertex) -> Vertex:
    if v in t.vertices and v not in t.labels:
        return v
    for c, branch in t.labels.items():
        if v in branch:
            return c
    raise KeyError(f"{v!r} is outside the truncation window")


# -- end chains ------------------------------------------------------------------------


@dataclass(frozen=True)
class EndApprox:
    family: LazyGraph
    horizon: int
    chain: Tuple[Vertex, ...]  # contracted id at levels 1..len(chain)

    @property
    def bound(self) -> int:
        return len(self.chain)

    def component(self, level: int) -> FrozenSet[Vertex]:
        return truncate(self.family, level, self.horizon).labels[self.chain[level - 1]]

    def is_compatible(self) -> bool:
        for k in range(1, self.bound):
            t = truncate(self.family, k + 1, self.horizon)
            _, vmap = project(t, self.family.exhaustion(k))
            if vmap[self.chain[k]] != self.chain[k - 1]:
                return False
        return True

    def name(self) -> str:
        from .families import format_item

        last = self.chain[-1][1]
        try:
            return "end@" + format_item(last)
        except ValueError:
            return f"end@{last!r}"


def end_approximations(g: LazyGraph, bound: int, max_chains: Optional[int] = None) -> List[EndApprox]:
    """All compatible chains of infinite components up to ``bound``."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    h = g.default_horizon(bound)
    chains: List[Tuple[Vertex, ...]] = [(c,) for c in infinite_parts(g, 1, h)]
    for k in range(2, bound + 1):
        _, vmap = project(truncate(g, k, h), g.exhaustion(k - 1))
        level = infinite_parts(g, k, h)
        chains = [ch + (c,) for ch in chains for c in level if vmap[c] == ch[-1]]
        if max_chains is not None and len(chains) > max_chains:
            chains = chains[:max_chains]
    return [EndApprox(g, h, ch) for ch in chains]


# -- rays ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class RaySpec:
    """``prefix`` followed by iterating ``step`` from its last vertex."""

    prefix: Tuple[Vertex, ...]
    step: Callable[[Vertex], Vertex]

    def take(self, m: int) -> List[Vertex]:
        out = list(self.prefix[:m])
        while len(out) < m:
            out.append(self.step(out[-1]))
        return out

    def tail(self, i: int) -> "RaySpec":
        return RaySpec(tuple(self.take(i + 1)[i:]) if i >= len(self.prefix) else self.prefix[i:], self.step)

    def within(self, g: LazyGraph, horizon: int, limit: int = 100000) -> List[Vertex]:
        """Initial segment up to the first vertex of column ``>= horizon``."""
        out = []
        for v in self.take(limit):
            if v not in g.hubs and g.column(v) >= horizon:
                break
            out.append(v)
        return out

    def index(self, v: Vertex, limit: int = 10000) -> Optional[int]:
        for i, x in enumerate(self.take(limit)):
            if x == v:
                return i
        return None

    def check(self, g: LazyGraph, m: int, width: Optional[int] = None) -> bool:
        vs = self.take(m)
        if len(set(vs)) != len(vs):
            return False
        w = width or (max(g.col(v) for v in vs) + 2)
        return all(vs[i + 1] in g.neighbors(vs[i], w) for i in range(m - 1))


def _depth(parent, x) -> int:
    d = 0
    while parent[x] is not None:
        x = parent[x]
        d += 1
    return d


def outward_ray(g: LazyGraph, start: Vertex) -> RaySpec:
    if g.outward is None:
        raise ValueError(f"{g.name} has no outward step")
    return RaySpec((start,), g.outward)


def ray_for_end(g: LazyGraph, end: EndApprox) -> RaySpec:
    """Shortest path from the root into the last chain component, then outward."""
    target = end.component(end.bound)
    win = _window(g, end.horizon)
    adj = win.adjacency()
    parent = {g.root: None}
    queue = deque([g.root])
    hit = None
    while queue:
        x = queue.popleft()
        if x in target:
            # among the closest entry points prefer the lowest column
            same = [y for y in queue if y in target and _depth(parent, y) == _depth(parent, x)]
            hit = min([x] + same, key=lambda y: (g.col(y), repr(y)))
            break
        for _, y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    if hit is None:
        raise ValueError("end component unreachable from the root inside the window")
    path = []
    while hit is not None:
        path.append(hit)
        hit = parent[hit]
    return RaySpec(tuple(reversed(path)), g.outward)


# -- domination ---------------------------------------------------------------------------


@dataclass
class Dominates:
    vertex: Vertex
    fan: List[Path]
    periodic: bool = False
    seed: Optional[Path] = None
    step: int = 0
    kind: str = "Dominates"

    def describe(self) -> str:
        cert = f"periodic fan seed {list(self.seed)} shifted by multiples of {self.step}" if self.periodic else "finite fan"
        return f"DOMINATED by {self.vertex!r}: {len(self.fan)} disjoint paths; {cert}"


@dataclass
class Separated:
    vertex: Vertex
    separator: FrozenSet[Vertex]
    level: int
    checked_to: int
    periodic: bool = True
    kind: str = "Separated"

    def describe(self) -> str:
        return (
            f"{self.vertex!r} separated from the ray tail by {ordered(self.separator)} "
            f"(exact in G+[W_{self.level}], rechecked to level {self.checked_to})"
        )


DominationVerdict = Union[Dominates, Separated, Unknown]


def _simple(g: Multigraph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(g.vertices)
    out.add_edges_from((a, b) for a, b in g.edges.values() if a != b)
    return out


def _ray_anchor(g: LazyGraph, ray: RaySpec, n: int) -> Vertex:
    """A tail vertex of the ray outside ``W_n`` (past the prefix, so the tail stays outside)."""
    for i, x in enumerate(ray.take(len(ray.prefix) + 10 * n + 20)):
        if i >= len(ray.prefix) - 1 and x not in g.hubs and g.column(x) >= n:
            return x
    raise ValueError("ray does not leave W_n")


def _level_setup(g: LazyGraph, ray: RaySpec, n: int, horizon: Optional[int] = None):
    x = _ray_anchor(g, ray, n)
    h = max(horizon or g.default_horizon(n), g.column(x) + 2)
    t = truncate(g, n, h)
    return t, part_containing(t, x)


def separator_at(g: LazyGraph, v: Vertex, ray: RaySpec, n: int, horizon: Optional[int] = None):
    """Minimum vertex set inside ``W_n`` separating ``v`` from the ray's tail, or ``None``.

    Exact for ``G``: a ``v``-tail path avoiding ``S ⊆ W_n`` exists in ``G`` iff
    one exists from ``v`` to the tail's contracted vertex in ``G+[W_n] - S``.
    """
    t, k = _level_setup(g, ray, n, horizon)
    if v not in t.vertices or v in t.labels:
        return None
    sg = _simple(t)
    if sg.has_edge(v, k):
        return None
    if not nx.has_path(sg, v, k):
        return frozenset()
    return frozenset(nx.minimum_node_cut(sg, v, k))


def separates(g: LazyGraph, v: Vertex, ray: RaySpec, sep: FrozenSet, n: int) -> bool:
    t, k = _level_setup(g, ray, n)
    if not sep <= t.vertices - set(t.labels):
        return False
    sg = _simple(t)
    sg.remove_nodes_from(sep)
    return v in sg and not nx.has_path(sg, v, k)


def fan(g: LazyGraph, v: Vertex, targets: Sequence[Vertex], horizon: int, avoid=frozenset()) -> List[Path]:
    """Maximum family of ``v``-``targets`` paths, disjoint except at ``v``, in the window.

    Each path stops at its first target vertex.
    """
    win = _window(g, horizon)
    sg = _simple(win)
    sg.remove_nodes_from(set(avoid) - {v})
    tset = set(targets) & set(sg.nodes)
    if not tset:
        return []
    sink = ("__sink__",)
    sg.add_edges_from((x, sink) for x in tset)
    paths = []
    for p in nx.node_disjoint_paths(sg, v, sink):
        p = p[:-1]
        cut = next(i for i, x in enumerate(p) if x in tset)
        paths.append(tuple(p[: cut + 1]))
    return sorted(paths, key=lambda p: (len(p), [repr(x) for x in p]))


def _on_ray(ray_vertices, x) -> bool:
    return x in ray_vertices


def _periodic_fan(g: LazyGraph, v: Vertex, ray: RaySpec, paths: List[Path], k_bound: int, horizon: int):
    """Find a path whose shifted copies form an infinite fan; verify ``k_bound`` copies."""
    if g.fan_shift is None or g.fan_coord is None:
        return None
    if not (v in g.hubs or g.fan_shift(v, 1) == v):
        return None
    ray_vs = set(ray.take(20 * (horizon + k_bound) + 50))
    for p in paths:
        body = [x for x in p[1:] if x not in g.hubs]
        if not body:
            continue
        coords = [g.fan_coord(x) for x in body]
        step = max(coords) - min(coords) + 1
        copies = [tuple(g.fan_shift(x, j * step) if x != v else x for x in p) for j in range(k_bound)]
        if _valid_fan(g, v, copies, ray_vs):
            return p, step, copies
    return None


def _valid_fan(g: LazyGraph, v: Vertex, paths: List[Path], ray_vs) -> bool:
    seen = set()
    ends = set()
    for p in paths:
        if p[0] != v or len(p) < 2:
            return False
        if p[-1] not in ray_vs or any(x in ray_vs for x in p[:-1]):
            return False
        width = max(g.col(x) for x in p) + 2
        for a, b in zip(p, p[1:]):
            if b not in g.neighbors(a, width):
                return False
        inner = set(p[1:])
        if inner & seen or len(inner) != len(p) - 1:
            return False
        seen |= inner
        ends.add(p[-1])
    return len(ends) == len(paths)


def verify_fan(g: LazyGraph, v: Vertex, ray: RaySpec, paths: List[Path]) -> bool:
    ray = _trim(ray, v)
    horizon = max((g.col(x) for p in paths for x in p), default=0) + 2
    return _valid_fan(g, v, paths, set(ray.take(20 * horizon + 50)))


def _trim(ray: RaySpec, v: Vertex) -> RaySpec:
    i = ray.index(v, limit=len(ray.prefix) + 50)
    return ray if i is None else ray.tail(i + 1)


def dominates(g: LazyGraph, v: Vertex, ray: RaySpec, k_bound: int = 5, bound: int = 12) -> DominationVerdict:
    """Decide whether ``v`` dominates the end of ``ray``.

    First looks for a separator inside some ``W_n`` (exact, see
    :func:`separator_at`); failing that, builds a fan by max-flow in the
    window and tries to certify an infinite fan by the family's shift.
    """
    ray = _trim(ray, v)
    first = g.col(v) + 1
    for n in range(max(first, 1), bound + 1):
        sep = separator_at(g, v, ray, n)
        if sep is not None:
            checked = all(separates(g, v, ray, sep, m) for m in range(n, bound + 1))
            if checked:
                return Separated(v, sep, n, bound, periodic=True)
    # the window must hold k_bound ray vertices past the prefix
    reach = ray.take(len(ray.prefix) + 2 * k_bound)
    horizon = max(g.default_horizon(bound), max(g.col(x) for x in reach) + 2)
    targets = ray.within(g, horizon)
    paths = fan(g, v, targets, horizon)
    if len(paths) < k_bound:
        return Unknown(bound, f"no separator and only {len(paths)} disjoint paths")
    cert = _periodic_fan(g, v, ray, paths, k_bound, horizon)
    if cert is not None:
        seed, step, copies = cert
        return Dominates(v, copies, periodic=True, seed=seed, step=step)
    return Dominates(v, paths[:k_bound], periodic=False)


@dataclass
class EndVerdict:
    end: EndApprox
    ray: RaySpec
    dominated: Optional[bool]
    certificates: Dict[Vertex, object] = field(default_factory=dict)

    def describe(self) -> str:
        if self.dominated:
            v, cert = next((v, c) for v, c in self.certificates.items() if isinstance(c, Dominates))
            return f"{self.end.name()}: {cert.describe()}"
        if self.dominated is False:
            return f"{self.end.name()}: UNDOMINATED ({len(self.certificates)} candidates separated)"
        return f"{self.end.name()}: UNKNOWN"


def classify_ends(
    g: LazyGraph,
    bound: int = 12,
    k: int = 2,
    k_bound: int = 5,
    max_chains: Optional[int] = 64,
) -> List[EndVerdict]:
    """Dominated/undominated verdict for every end chain, testing the candidates in ``W_k``."""
    out = []
    for end in end_approximations(g, bound, max_chains=max_chains):
        ray = ray_for_end(g, end)
        certs = {}
        dominated: Optional[bool] = False
        for v in ordered(g.exhaustion(k)):
            verdict = dominates(g, v, ray, k_bound=k_bound, bound=bound)
            certs[v] = verdict
            if isinstance(verdict, Dominates):
                dominated = True
                break
            if isinstance(verdict, Unknown):
                dominated = None
        out.append(EndVerdict(end, ray, dominated, certs))
    return out


# -- bounded-diameter spanning trees ---------------------------------------------------------


def spanning_tree_bounded_diameter(
    g: Union[LazyGraph, Multigraph], r: Vertex, k: int, width: Optional[int] = None
) -> Multigraph:
    """Spanning tree of ``G[B_k(r)]`` grown layer by layer from ``r``.

    Each vertex at distance ``i+1`` is attached to one neighbour at distance
    ``i``, so every vertex is within ``k`` of ``r`` in the tree.
    """
    b = ball(g, r, k, width)
    adj = b.adjacency()
    dist = {r: 0}
    layer = [r]
    tree_edges = {}
    while layer:
        nxt = []
        for x in layer:
            for e, y in sorted(adj[x], key=lambda ey: repr(ey[0])):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    tree_edges[e] = b.edges[e]
                    nxt.append(y)
        layer = nxt
    return Multigraph(b.vertices, tree_edges)


def diameter(t: Multigraph) -> int:
    sg = _simple(t)
    if sg.number_of_nodes() <= 1:
        return 0
    return nx.diameter(sg)


def is_tree(t: Multigraph) -> bool:
    return len(t.edges) == len(t.vertices) - 1 and len(components(t)) == 1


# -- star-comb -----------------------------------------------------------------------------------


@dataclass
class Star:
    center: Vertex
    legs: List[Path]

    def check(self, g: Multigraph, u, threshold: int) -> bool:
        if len(self.legs) < threshold:
            return False
        return _paths_ok(g, self.legs) and _disjoint_except(self.legs, {self.center}) and all(
            p[0] == self.center and p[-1] in u for p in self.legs
        ) and len({p[-1] for p in self.legs}) == len(self.legs)


@dataclass
class Comb:
    spine: Path
    teeth: List[Path]  # each starts on the spine and ends in U; may be a single vertex

    def check(self, g: Multigraph, u, threshold: int) -> bool:
        if len(self.teeth) < threshold or not _paths_ok(g, [self.spine] + self.teeth):
            return False
        spine = set(self.spine)
        if len(spine) != len(self.spine):
            return False
        starts = [p[0] for p in self.teeth]
        if len(set(starts)) != len(starts) or not set(starts) <= spine:
            return False
        if not all(p[-1] in u for p in self.teeth):
            return False
        legs = [p[1:] for p in self.teeth]
        used = set()
        for leg in legs:
            if set(leg) & spine or set(leg) & used or len(set(leg)) != len(leg):
                return False
            used |= set(leg)
        return True


def _paths_ok(g: Multigraph, paths) -> bool:
    adj = {v: {w for _, w in nb} for v, nb in g.adjacency().items()}
    for p in paths:
        if any(x not in g.vertices for x in p):
            return False
        if any(b not in adj[a] for a, b in zip(p, p[1:])):
            return False
    return True


def _disjoint_except(paths, allowed) -> bool:
    seen = set()
    for p in paths:
        s = set(p) - allowed
        if s & seen or len(set(p)) != len(p):
            return False
        seen |= s
    return True


class StarCombError(ValueError):
    pass


def star_comb(g: Multigraph, u, threshold: int) -> Union[Star, Comb]:
    """A star with ``threshold`` leaves in ``u`` or a comb with ``threshold`` teeth in ``u``.

    Works in the minimal subtree of a BFS spanning tree that contains ``u``.
    Unlike the infinite statement, a finite tree can avoid both (a spider of
    bounded degree whose legs fork once), so :class:`StarCombError` is raised
    when neither exists in that subtree; ``|u| > (threshold-1)**threshold``
    rules this out.
    """
    u = frozenset(u)
    if len(u) < threshold:
        raise StarCombError(f"|u| = {len(u)} is below the threshold {threshold}")
    if not u <= g.vertices or len(components(g)) != 1:
        raise StarCombError("g must be connected and contain u")
    root = ordered(u)[0]
    parent = {root: None}
    order = [root]
    adj = g.adjacency()
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for _, y in sorted(adj[x], key=lambda ey: repr(ey[0])):
            if y not in parent:
                parent[y] = x
                order.append(y)
                queue.append(y)
    keep = set()
    for x in u:
        while x is not None and x not in keep:
            keep.add(x)
            x = parent[x]
    tadj: Dict[Vertex, List[Vertex]] = {x: [] for x in keep}
    for x in keep:
        p = parent[x]
        if p is not None:
            tadj[x].append(p)
            tadj[p].append(x)

    def reach_u(start, banned):
        # path from start to the nearest u-vertex, never entering banned
        prev = {start: None}
        q = deque([start])
        while q:
            x = q.popleft()
            if x in u:
                out = []
                while x is not None:
                    out.append(x)
                    x = prev[x]
                return tuple(reversed(out))
            for y in tadj[x]:
                if y not in prev and y not in banned:
                    prev[y] = x
                    q.append(y)
        return None

    best = max(ordered(keep), key=lambda x: len(tadj[x]))
    if len(tadj[best]) >= threshold:
        legs = [(best,) + reach_u(y, {best}) for y in tadj[best]]
        return Star(best, legs[:threshold] if len(legs) > threshold else legs)

    leaves = [x for x in ordered(keep) if len(tadj[x]) <= 1]
    best_comb = None
    for a in leaves:
        prev = {a: None}
        q = deque([a])
        while q:
            x = q.popleft()
            for y in tadj[x]:
                if y not in prev:
                    prev[y] = x
                    q.append(y)
        for b in leaves:
            if b == a:
                continue
            path = []
            x = b
            while x is not None:
                path.append(x)
                x = prev[x]
            path.reverse()
            count = sum(1 for x in path if x in u or len(tadj[x]) > 2 or (len(tadj[x]) == 2 and x in (a, b)))
            if best_comb is None or count > best_comb[0]:
                best_comb = (count, path)
    if best_comb is None:
        # a single vertex tree
        only = next(iter(keep))
        best_comb = (1 if only in u else 0, [only])
    _, path = best_comb
    spine = set(path)
    teeth = []
    for x in path:
        if x in u:
            teeth.append((x,))
            continue
        for y in tadj[x]:
            if y not in spine:
                teeth.append((x,) + reach_u(y, spine))
                break
    if len(teeth) >= threshold:
        return Comb(tuple(path), teeth)
    raise StarCombError(
        f"no star with {threshold} leaves or comb with {threshold} teeth in the spanning subtree"
    )


# -- dominated-ladder subdivisions -------------------------------------------------------------


@dataclass
class LadderWitness:
    """Rails, rungs ``P_i`` and spokes ``Q_j`` of a dominated-ladder subdivision prefix."""

    vertex: Vertex
    upper: List[Vertex]
    lower: List[Vertex]
    rungs: List[Path]
    spokes: List[Path]

    def edges(self, g: LazyGraph) -> Dict:
        width = max(g.col(x) for x in self.vertices()) + 2
        out = {}
        for p in [self.upper, self.lower] + list(self.rungs) + list(self.spokes):
            for a, b in zip(p, p[1:]):
                e = next(e for e, w in g.incident(a, width) if w == b)
                out[e] = g.endpoints(e)
        return out

    def vertices(self) -> set:
        out = set(self.upper) | set(self.lower)
        for p in list(self.rungs) + list(self.spokes):
            out |= set(p)
        return out

    def check(self, g: LazyGraph) -> bool:
        """Rails are paths, rungs join them in order, spokes reach the upper rail, all disjoint."""
        width = max(g.col(x) for x in self.vertices()) + 2
        for p in [self.upper, self.lower] + list(self.rungs) + list(self.spokes):
            if len(set(p)) != len(p):
                return False
            if any(b not in g.neighbors(a, width) for a, b in zip(p, p[1:])):
                return False
        upper, lower = set(self.upper), set(self.lower)
        if upper & lower or self.vertex in upper | lower:
            return False
        ui = {x: i for i, x in enumerate(self.upper)}
        li = {x: i for i, x in enumerate(self.lower)}
        used = set()
        last = (-1, -1)
        for p in self.rungs:
            if p[0] not in upper or p[-1] not in lower:
                return False
            inner = set(p[1:-1])
            if inner & (upper | lower | used) or self.vertex in p:
                return False
            pos = (ui[p[0]], li[p[-1]])
            if pos[0] <= last[0] or pos[1] <= last[1]:
                return False
            last = pos
            used |= set(p)
        ends = set()
        for q in self.spokes:
            if q[0] != self.vertex or q[-1] not in upper:
                return False
            inner = set(q[1:])
            if set(q[1:-1]) & (upper | lower) or inner & used or q[-1] in ends:
                return False
            used |= inner
            ends.add(q[-1])
        return True


class SubdivisionError(ValueError):
    pass


def _rays_linkage(g: LazyGraph, r1: RaySpec, r2: RaySpec, v: Vertex, horizon: int) -> List[Path]:
    a = r1.within(g, horizon)
    b = r2.within(g, horizon)
    sg = _simple(_window(g, horizon))
    if v in sg:
        sg.remove_node(v)
    src, snk = ("__src__",), ("__snk__",)
    sg.add_edges_from((src, x) for x in a if x in sg)
    sg.add_edges_from((x, snk) for x in b if x in sg)
    aset, bset = set(a), set(b)
    out = []
    for p in nx.node_disjoint_paths(sg, src, snk):
        p = p[1:-1]
        # keep the segment from its last vertex on r1 to the next vertex on r2
        i = max(j for j, x in enumerate(p) if x in aset)
        j = next(j for j in range(i, len(p)) if p[j] in bset)
        out.append(tuple(p[i: j + 1]))
    ai = {x: i for i, x in enumerate(a)}
    bi = {x: i for i, x in enumerate(b)}
    out.sort(key=lambda p: ai[p[0]])
    # longest chain increasing on both rays
    best: List[List[Path]] = []
    for p in out:
        cands = [c for c in best if bi[c[-1][-1]] < bi[p[-1]]]
        chain = (max(cands, key=len) if cands else []) + [p]
        best.append(chain)
    return max(best, key=len) if best else []


def build_H_subdivision(
    g: LazyGraph,
    v: Vertex,
    r1: RaySpec,
    r2: RaySpec,
    n: int,
    k_bound: int = 5,
    bound: int = 12,
    max_horizon: int = 60,
) -> LadderWitness:
    """First ``n`` rungs of a dominated-ladder subdivision, following the construction
    through ``R``-``S`` paths, a fan avoiding one ray, and an alternating greedy choice
    of pairwise disjoint rungs and spokes.
    """
    verdict = dominates(g, v, r1, k_bound=k_bound, bound=bound)
    if not isinstance(verdict, Dominates):
        raise SubdivisionError(f"domination of the end by {v!r} is not certified: {verdict}")
    r1, r2 = _trim(r1, v), _trim(r2, v)
    horizon = max(g.default_horizon(bound), 2 * n + 4)
    while horizon <= max_horizon:
        rungs = _rays_linkage(g, r1, r2, v, horizon)
        upper_ray, lower_ray = r1, r2
        spokes = fan(g, v, r1.within(g, horizon), horizon, avoid=set(r2.within(g, horizon)))
        if len(spokes) < n:
            # the fan may only reach the other ray
            alt = fan(g, v, r2.within(g, horizon), horizon, avoid=set(r1.within(g, horizon)))
            if len(alt) > len(spokes):
                spokes = alt
                upper_ray, lower_ray = r2, r1
                rungs = [tuple(reversed(p)) for p in rungs]
        spokes = sorted(spokes, key=lambda q: upper_ray.index(q[-1], limit=10 * horizon))
        chosen_p, chosen_q = [], []
        used_p, used_q = set(), set()
        pi = qi = 0
        while len(chosen_p) < n or len(chosen_q) < n:
            progress = False
            if len(chosen_p) < n:
                while pi < len(rungs) and set(rungs[pi]) & used_q:
                    pi += 1
                if pi < len(rungs):
                    chosen_p.append(rungs[pi])
                    used_p |= set(rungs[pi])
                    pi += 1
                    progress = True
            if len(chosen_q) < n:
                while qi < len(spokes) and set(spokes[qi]) & used_p:
                    qi += 1
                if qi < len(spokes):
                    chosen_q.append(spokes[qi])
                    used_q |= set(spokes[qi][1:])
                    qi += 1
                    progress = True
            if not progress:
                break
        if len(chosen_p) >= n and len(chosen_q) >= n:
            chosen_p.sort(key=lambda p: upper_ray.index(p[0], limit=10 * horizon))
            ends = [upper_ray.index(x[-1], limit=10 * horizon) for x in chosen_q] + [
                upper_ray.index(p[0], limit=10 * horizon) for p in chosen_p
            ]
            lends = [lower_ray.index(p[-1], limit=10 * horizon) for p in chosen_p]
            w = LadderWitness(
                v,
                upper_ray.take(max(ends) + 1),
                lower_ray.take(max(lends) + 1),
                chosen_p,
                chosen_q,
            )
            if w.check(g):
                return w
        horizon *= 2
    raise SubdivisionError("could not assemble the requested number of rungs within the search window")


# -- double rays inside an edge set -------------------------------------------------------------


@dataclass
class DoubleRay:
    middle: Path
    step_left: Callable[[Vertex], Vertex]
    step_right: Callable[[Vertex], Vertex]

    def take(self, m: int) -> List[Vertex]:
        """The middle path extended by ``m`` vertices on each side."""
        left = [self.middle[0]]
        right = [self.middle[-1]]
        for _ in range(m):
            left.append(self.step_left(left[-1]))
            right.append(self.step_right(right[-1]))
        return list(reversed(left[1:])) + list(self.middle) + right[1:]


def double_ray_through_end(circuit, end: EndApprox, bound: int = 12):
    """A double ray on edges of ``circuit`` whose two tails lie in the end's components.

    ``circuit`` is an :class:`~topocycles.edgesets.EdgeSetExpr`.  Bounded
    search: the middle path joins two escaping vertices of the deepest
    component through circuit edges inside the window, and each tail follows
    the circuit edge that leads to a larger column.
    """
    from .psi import end_in_closure

    g = circuit.family
    verdict = end_in_closure(circuit, end, bound)
    if not verdict.holds:
        raise ValueError("the end is not in the closure of the edge set")
    if circuit.is_finite:
        return Unknown(bound, "finite edge set has no tails")
    horizon = max(end.horizon, circuit.stable_level() + circuit.period + 2)
    win = _window(g, horizon)
    o_edges = circuit.restrict(win)
    osub = win.edge_subgraph(o_edges)
    deep = end.component(end.bound)

    def step(x):
        for e, y in g.incident(x, g.col(x) + 2):
            if y not in g.hubs and g.column(y) > g.column(x) and circuit.contains(e):
                return y
        raise ValueError(f"circuit does not continue outward from {x!r}")

    starts = [x for x in ordered(osub.vertices) if x in deep and g.col(x) == horizon - 1]
    adj = osub.adjacency()
    for i, a in enumerate(starts):
        prev = {a: None}
        q = deque([a])
        while q:
            x = q.popleft()
            for _, y in adj[x]:
                if y not in prev:
                    prev[y] = x
                    q.append(y)
        for b in starts[i + 1:]:
            if b in prev:
                path = []
                x = b
                while x is not None:
                    path.append(x)
                    x = prev[x]
                dr = DoubleRay(tuple(path), step, step)
                vs = dr.take(2 * horizon)
                if len(set(vs)) == len(vs):
                    return dr
    return Unknown(bound, "no pair of escaping circuit vertices joined inside the window")
