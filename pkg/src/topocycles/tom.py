"""Trees of binary presentations glued along dummy edges.

Each node of a tree carries a binary presentation: a finite ground set with
a space of vectors and an orthogonal space of covectors, both GF(2) spaces
stored by bases of int bitsets.  Tree edges share *dummy* elements (the
virtual edges of torsos).  A pre-vector is a compatible choice of local
vectors along a subtree; its real edges form an underlying vector.

On a finite tree the span of all underlying vectors equals the image of
the space of compatible assignments (a compatible assignment splits into
pre-vectors along the tree edges where its restriction vanishes), so the
glued spaces are computed exactly by solving one linear system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from . import gf2
from .edgesets import EdgeSetExpr
from .ends import EndApprox, end_approximations
from .graph import Multigraph, ordered
from .matroid import CircuitSystem, is_tame_and_binary, minimal_nonempty
from .psi import _same_end
from .treedec import LazyTreeDecomposition, Part, TreeDecomposition, is_virtual, torso, virtual_edge

Node = Hashable
EdgeId = Hashable

#: spans larger than ``2**MAX_SPAN_DIM`` are never listed element by element
MAX_SPAN_DIM = 20

VECTOR, COVECTOR = "vector", "covector"


class NotBinaryError(ValueError):
    pass


class InfiniteTorsoError(ValueError):
    pass


class BoundsExhausted(RuntimeError):
    pass


# -- presentations -----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BinaryPresentation:
    ground: Tuple[EdgeId, ...]
    vector_basis: Tuple[int, ...]
    covector_basis: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(ordered(self.ground)))
        object.__setattr__(self, "vector_basis", tuple(gf2.reduce_basis(self.vector_basis)))
        object.__setattr__(self, "covector_basis", tuple(gf2.reduce_basis(self.covector_basis)))
        object.__setattr__(self, "index", {e: i for i, e in enumerate(self.ground)})

    def basis(self, kind: str) -> Tuple[int, ...]:
        return self.vector_basis if kind == VECTOR else self.covector_basis

    def mask(self, edges: Iterable[EdgeId]) -> int:
        return gf2.mask_of(edges, self.index)

    def items(self, mask: int) -> FrozenSet[EdgeId]:
        return gf2.items_of(mask, self.ground)

    def contains(self, edges: Iterable[EdgeId], kind: str = VECTOR) -> bool:
        return gf2.in_span(self.mask(edges), self.basis(kind))

    def family(self, kind: str = VECTOR) -> List[FrozenSet[EdgeId]]:
        b = self.basis(kind)
        if len(b) > MAX_SPAN_DIM:
            raise BoundsExhausted(f"span of dimension {len(b)} is too large to list")
        return [self.items(m) for m in gf2.span(b)]

    def vectors(self) -> List[FrozenSet[EdgeId]]:
        return self.family(VECTOR)

    def covectors(self) -> List[FrozenSet[EdgeId]]:
        return self.family(COVECTOR)

    def is_orthogonal(self) -> bool:
        return all(gf2.popcount(v & w) % 2 == 0 for v in self.vector_basis for w in self.covector_basis)

    def is_complementary(self) -> bool:
        """Covectors are exactly the sets orthogonal to all vectors; this gives (O2)."""
        return len(self.vector_basis) + len(self.covector_basis) == len(self.ground) and self.is_orthogonal()

    def circuit_system(self) -> CircuitSystem:
        return CircuitSystem(frozenset(self.ground), minimal_nonempty(self.vectors()), minimal_nonempty(self.covectors()))

    def to_json(self) -> dict:
        from .matroid import _jsonable

        return {
            "ground": [_jsonable(e) for e in self.ground],
            "vectors": [[_jsonable(e) for e in ordered(self.items(m))] for m in self.vector_basis],
            "covectors": [[_jsonable(e) for e in ordered(self.items(m))] for m in self.covector_basis],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BinaryPresentation":
        from .matroid import _unjson

        ground = [_unjson(e) for e in data["ground"]]
        idx = {e: i for i, e in enumerate(ordered(ground))}
        vb = [gf2.mask_of((_unjson(e) for e in s), idx) for s in data["vectors"]]
        wb = [gf2.mask_of((_unjson(e) for e in s), idx) for s in data["covectors"]]
        return cls(tuple(ground), tuple(vb), tuple(wb))


def canonical_presentation(m: CircuitSystem) -> BinaryPresentation:
    """Vectors meet every cocircuit evenly; covectors meet every circuit evenly."""
    if not is_tame_and_binary(m):
        raise NotBinaryError("some circuit meets some cocircuit oddly")
    ground = ordered(m.ground)
    idx = {e: i for i, e in enumerate(ground)}
    n = len(ground)
    vb = gf2.orthogonal_complement((gf2.mask_of(d, idx) for d in m.cocircuits), n)
    wb = gf2.orthogonal_complement((gf2.mask_of(c, idx) for c in m.circuits), n)
    p = BinaryPresentation(tuple(ground), tuple(vb), tuple(wb))
    # a binary matroid is determined by its circuit space
    if len(vb) <= MAX_SPAN_DIM and set(minimal_nonempty(p.vectors())) != set(m.circuits):
        raise NotBinaryError("circuits are not the minimal sets of their cocircuit-orthogonal space")
    return p


def graph_presentation(h: Multigraph) -> BinaryPresentation:
    """Cycle space and cut space of a finite multigraph, straight from vertex stars."""
    ground = h.edge_order()
    idx = {e: i for i, e in enumerate(ground)}
    stars = []
    for v in h.vertex_order():
        m = 0
        for e in h.incident(v):
            a, b = h.ends(e)
            if a != b:
                m ^= 1 << idx[e]
        stars.append(m)
    wb = gf2.reduce_basis(stars)
    vb = gf2.orthogonal_complement(wb, len(ground))
    return BinaryPresentation(tuple(ground), tuple(vb), tuple(wb))


# -- trees of presentations ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TreeOfPresentations:
    """Presentations on the nodes of a finite forest.

    ``boundary[t]`` lists dummy elements shared with nodes outside the forest
    (windows of infinite trees); pre-vectors must vanish on them.
    """

    parent: Dict[Node, Optional[Node]]
    presentations: Dict[Node, BinaryPresentation]
    boundary: Dict[Node, FrozenSet[EdgeId]] = field(default_factory=dict)
    decomposition: Optional[TreeDecomposition] = None
    graph: Optional[Multigraph] = None

    def __post_init__(self):
        dummies: Dict[Tuple[Node, Node], FrozenSet[EdgeId]] = {}
        for t, p in self.parent.items():
            if p is not None:
                shared = frozenset(self.presentations[t].ground) & frozenset(self.presentations[p].ground)
                dummies[(p, t)] = shared
        object.__setattr__(self, "dummies", dummies)
        all_dummy = frozenset().union(*dummies.values(), *self.boundary.values()) if (dummies or self.boundary) else frozenset()
        real = set()
        for pres in self.presentations.values():
            real.update(e for e in pres.ground if e not in all_dummy)
        ground = tuple(ordered(real))
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "index", {e: i for i, e in enumerate(ground)})
        object.__setattr__(self, "all_dummies", all_dummy)

    @property
    def nodes(self) -> List[Node]:
        return ordered(self.parent)

    def neighbors(self, t: Node) -> List[Node]:
        out = [p for p in [self.parent[t]] if p is not None]
        return out + [u for u, p in self.parent.items() if p == t]

    def dummy(self, t: Node, u: Node) -> FrozenSet[EdgeId]:
        return self.dummies.get((t, u)) or self.dummies.get((u, t)) or frozenset()

    def check(self) -> Optional[str]:
        """Structural invariants; returns a complaint or ``None``."""
        seen: Dict[EdgeId, List[Node]] = {}
        for t, pres in self.presentations.items():
            for e in pres.ground:
                seen.setdefault(e, []).append(t)
            if not pres.is_orthogonal():
                return f"presentation at {t!r} is not orthogonal"
        for e, where in seen.items():
            if len(where) > 2:
                return f"element {e!r} in {len(where)} presentations"
            if len(where) == 2:
                a, b = where
                if self.parent.get(a) != b and self.parent.get(b) != a:
                    return f"{a!r} and {b!r} share {e!r} but are not adjacent"
        return None

    def mask(self, edges: Iterable[EdgeId]) -> int:
        return gf2.mask_of(edges, self.index)

    def items(self, mask: int) -> FrozenSet[EdgeId]:
        return gf2.items_of(mask, self.ground)

    def real_mask(self, t: Node, local: int) -> int:
        """Real (non-dummy) part of a local vector, as a mask over ``ground``."""
        pres = self.presentations[t]
        out = 0
        for e in pres.items(local):
            if e not in self.all_dummies:
                out |= 1 << self.index[e]
        return out

    def to_json(self) -> dict:
        from .matroid import _jsonable

        return {
            "nodes": [
                {
                    "id": _jsonable(t),
                    "parent": _jsonable(self.parent[t]),
                    "presentation": self.presentations[t].to_json(),
                    "boundary": [_jsonable(e) for e in ordered(self.boundary.get(t, ()))],
                }
                for t in self.nodes
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "TreeOfPresentations":
        from .matroid import _unjson

        parent, pres, boundary = {}, {}, {}
        for row in data["nodes"]:
            t = _unjson(row["id"])
            parent[t] = _unjson(row["parent"])
            pres[t] = BinaryPresentation.from_json(row["presentation"])
            if row.get("boundary"):
                boundary[t] = frozenset(_unjson(e) for e in row["boundary"])
        return cls(parent, pres, boundary)


def build_tree_of_presentations(td: TreeDecomposition, g: Optional[Multigraph] = None) -> TreeOfPresentations:
    """Node presentations are the cycle/cut spaces of the torsos; virtual edges become dummies."""
    pres = {t: graph_presentation(torso(td, t, g).graph) for t in td.nodes}
    return TreeOfPresentations(dict(td.parent), pres, {}, td, g)


def _full_part(ltd: LazyTreeDecomposition, t: Node, horizon: int) -> Optional[Part]:
    """The whole part of ``t``, or ``None`` if it keeps growing with the horizon."""
    p = ltd.part(t, horizon)
    if ltd.part(t, horizon + 3) != p:
        return None
    return p


def window_presentations(ltd: LazyTreeDecomposition, n: int) -> TreeOfPresentations:
    """Presentations for the tree nodes of column ``< n`` whose parts are finite.

    Torsos use full parts and adhesions with *all* tree neighbours; dummies to
    nodes outside the window are boundary elements.
    """
    fam, tree = ltd.family, ltd.tree
    h = n + 3
    nodes = {}
    for t in tree.exhaustion(n):
        p = _full_part(ltd, t, h)
        if p is not None and p:
            nodes[t] = p
    pres, boundary = {}, {}
    parent = {t: (ltd.parent(t) if ltd.parent(t) in nodes else None) for t in nodes}
    for t, p in nodes.items():
        edges = {e: fam.endpoints(e) for e in p.edges}
        bd = set()
        for u in tree.neighbors(t, h):
            adh = ordered(p.vertices & ltd.part(u, h + 2).vertices)
            for i, a in enumerate(adh):
                for b in adh[i + 1:]:
                    e = virtual_edge(t, u, a, b)
                    edges[e] = (a, b)
                    if u not in nodes:
                        bd.add(e)
        pres[t] = graph_presentation(Multigraph(p.vertices, edges))
        if bd:
            boundary[t] = frozenset(bd)
    if not nodes:
        raise InfiniteTorsoError("no node of the window has a finite part")
    return TreeOfPresentations(parent, pres, boundary)


# -- pre-vectors -------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PreVector:
    kind: str
    assignment: Mapping[Node, FrozenSet[EdgeId]]

    @property
    def support(self) -> FrozenSet[Node]:
        return frozenset(self.assignment)

    def check(self, top: TreeOfPresentations) -> Optional[str]:
        """Re-check every defining condition; returns a complaint or ``None``."""
        s = self.support
        if not s:
            return "empty subtree"
        if not s <= set(top.parent):
            return "subtree leaves the tree"
        if not _connected_nodes(top, s):
            return "subtree is not connected"
        if not any(self.assignment.values()):
            return "all-zero assignment"
        for t in s:
            x = self.assignment[t]
            pres = top.presentations[t]
            if not x <= set(pres.ground) or not pres.contains(x, self.kind):
                return f"local set at {t!r} is not a {self.kind} of its presentation"
            if x & top.boundary.get(t, frozenset()):
                return f"nonzero on boundary dummies at {t!r}"
            for u in top.neighbors(t):
                d = top.dummy(t, u)
                r = x & d
                if u in s:
                    if r != self.assignment[u] & d:
                        return f"restrictions to the dummies of {t!r}-{u!r} disagree"
                    if not r:
                        return f"zero restriction on internal tree edge {t!r}-{u!r}"
                elif r:
                    return f"nonzero restriction towards {u!r} outside the subtree"
        return None

    def to_json(self) -> dict:
        from .matroid import _jsonable

        return {
            "kind": self.kind,
            "assignment": [[_jsonable(t), [_jsonable(e) for e in ordered(x)]] for t, x in sorted(self.assignment.items(), key=lambda kv: repr(kv[0]))],
        }


def _connected_nodes(top: TreeOfPresentations, s) -> bool:
    s = set(s)
    start = next(iter(s))
    seen, stack = {start}, [start]
    while stack:
        x = stack.pop()
        for y in top.neighbors(x):
            if y in s and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen == s


def underlying(p: PreVector, top: Optional[TreeOfPresentations] = None) -> FrozenSet[EdgeId]:
    """Real edges of the local sets (dummies appear twice and cancel)."""
    out = set()
    for x in p.assignment.values():
        out ^= set(x)
    if top is not None:
        out -= top.all_dummies
    else:
        out = {e for e in out if not is_virtual(e)}
    return frozenset(out)


def connected_subtrees(top: TreeOfPresentations, max_size: int) -> Iterator[FrozenSet[Node]]:
    seen = set()
    frontier = [frozenset([t]) for t in top.nodes]
    while frontier:
        nxt = []
        for s in frontier:
            if s in seen:
                continue
            seen.add(s)
            yield s
            if len(s) < max_size:
                for t in s:
                    for u in top.neighbors(t):
                        if u not in s:
                            nxt.append(s | {u})
        frontier = nxt


def enumerate_prevectors(top: TreeOfPresentations, max_subtree: int = 4, kind: str = VECTOR) -> List[PreVector]:
    """All pre-vectors (or pre-covectors) on connected subtrees of at most ``max_subtree`` nodes."""
    out = []
    for s in connected_subtrees(top, max_subtree):
        order = _bfs_order(top, s)
        out.extend(_assignments(top, s, order, kind))
    return out


def _bfs_order(top, s) -> List[Tuple[Node, Optional[Node]]]:
    start = ordered(s)[0]
    order, seen = [(start, None)], {start}
    i = 0
    while i < len(order):
        x = order[i][0]
        for y in top.neighbors(x):
            if y in s and y not in seen:
                seen.add(y)
                order.append((y, x))
        i += 1
    return order


def _assignments(top, s, order, kind) -> Iterator[PreVector]:
    local: Dict[Node, List[FrozenSet[EdgeId]]] = {}
    for t, _ in order:
        pres = top.presentations[t]
        outside = set(top.boundary.get(t, ()))
        for u in top.neighbors(t):
            if u not in s:
                outside |= top.dummy(t, u)
        local[t] = [x for x in pres.family(kind) if not x & outside]

    def rec(i, acc):
        if i == len(order):
            if any(acc.values()):
                yield PreVector(kind, dict(acc))
            return
        t, via = order[i]
        for x in local[t]:
            if via is not None:
                d = top.dummy(t, via)
                r = x & d
                if not r or r != acc[via] & d:
                    continue
            acc[t] = x
            yield from rec(i + 1, acc)
            del acc[t]

    yield from rec(0, {})


# -- the glued spaces --------------------------------------------------------------------------


def compatible_basis(top: TreeOfPresentations, kind: str = VECTOR) -> List[int]:
    """Basis (over ``top.ground``) of the underlying sets of all compatible assignments."""
    offsets, cols = {}, []
    for t in top.nodes:
        offsets[t] = len(cols)
        cols.extend((t, b) for b in top.presentations[t].basis(kind))
    k = len(cols)
    rows = []

    def coeff_row(t, e):
        pres = top.presentations[t]
        bit = 1 << pres.index[e]
        r = 0
        for j, b in enumerate(pres.basis(kind)):
            if b & bit:
                r |= 1 << (offsets[t] + j)
        return r

    for (p, t), d in top.dummies.items():
        for e in d:
            rows.append(coeff_row(p, e) ^ coeff_row(t, e))
    for t, d in top.boundary.items():
        for e in d:
            rows.append(coeff_row(t, e))
    real = [top.real_mask(t, b) for t, b in cols]
    images = []
    for sol in gf2.orthogonal_complement(rows, k):
        m = 0
        j = 0
        while sol:
            if sol & 1:
                m ^= real[j]
            sol >>= 1
            j += 1
        images.append(m)
    return gf2.reduce_basis(images)


def _tree_end_of_ray(tree, bound: int) -> Optional[EndApprox]:
    for end in end_approximations(tree, bound):
        if bound - 1 in end.component(bound) or bound in end.component(bound):
            return end
    return None


def psi_vectors(
    top: TreeOfPresentations,
    psi: Sequence[EndApprox] = (),
    max_terms: Optional[int] = None,
    max_subtree: Optional[int] = None,
    kind: str = VECTOR,
) -> List[FrozenSet[EdgeId]]:
    """Finite Ψ-vectors (or Ψ^∁-covectors) of the tree.

    On a finite tree every pre-vector has finite support, so ``psi`` does not
    matter.  Without bounds the exact span is returned; with bounds, the
    symmetric differences of at most ``max_terms`` enumerated underlying sets.
    """
    if max_terms is None and max_subtree is None:
        basis = compatible_basis(top, kind)
        if len(basis) > MAX_SPAN_DIM:
            raise BoundsExhausted(f"glued space of dimension {len(basis)} is too large to list")
        return [top.items(m) for m in gf2.span(basis)]
    pre = enumerate_prevectors(top, max_subtree or len(top.parent), kind)
    under = sorted({underlying(p, top) for p in pre}, key=lambda s: [repr(x) for x in ordered(s)])
    out = {frozenset()}
    for r in range(1, (max_terms or len(under)) + 1):
        for combo in combinations(under, r):
            x = frozenset()
            for c in combo:
                x = x ^ c
            out.add(x)
    return sorted(out, key=lambda s: (len(s), [repr(x) for x in ordered(s)]))


def psi_covectors(top, psi=(), max_terms=None, max_subtree=None):
    return psi_vectors(top, psi, max_terms, max_subtree, COVECTOR)


def glued_matroid(top: TreeOfPresentations, psi: Sequence[EndApprox] = (), max_terms=None, max_subtree=None) -> CircuitSystem:
    """Circuits: minimal nonempty Ψ-vectors; cocircuits: minimal nonempty Ψ^∁-covectors."""
    vs = psi_vectors(top, psi, max_terms, max_subtree, VECTOR)
    ws = psi_vectors(top, psi, max_terms, max_subtree, COVECTOR)
    return CircuitSystem(frozenset(top.ground), minimal_nonempty(vs), minimal_nonempty(ws))


# -- from cycles and bonds to pre-vectors --------------------------------------------------------


def _matching(z: Sequence, policy: str) -> List[Tuple]:
    zs = ordered(z)
    if policy == "reverse":
        zs = zs[::-1]
    elif policy == "nested":
        # pair outermost first: (z0, z_last), (z1, z_last-1), ...
        return [(zs[i], zs[-1 - i]) for i in range(len(zs) // 2)]
    elif policy != "lex":
        raise ValueError(f"unknown matching policy {policy!r}")
    return [(zs[i], zs[i + 1]) for i in range(0, len(zs), 2)]


@dataclass
class Lifted:
    prevector: PreVector
    z_sizes: Dict[Tuple[Node, Node], int]
    complaint: Optional[str]

    @property
    def ok(self) -> bool:
        return self.complaint is None


def cycle_to_prevector(top: TreeOfPresentations, o: Iterable[EdgeId], policy: str = "lex") -> Lifted:
    """Lift a finite cycle to a pre-vector whose underlying set is ``o``.

    ``Z`` on a tree edge is the set of adhesion vertices with odd ``o``-degree
    in the parts on the child's side; with disjoint consecutive adhesions this
    is the odd-degree set of ``o`` inside the child's part alone.
    """
    td, g = top.decomposition, top.graph
    if td is None:
        raise ValueError("the tree of presentations does not carry its decomposition")
    ends = g.edges if g is not None else td.edge_ends
    o = frozenset(o)
    y = {t: o & td.parts[t].edges for t in td.nodes}
    x = {t: set(y[t]) for t in td.nodes}
    z_sizes = {}
    for p, t in td.tree_edges():
        deg: Dict = {}
        for w in td.subtree(t):
            for e in y[w]:
                for v in ends[e]:
                    deg[v] = deg.get(v, 0) + 1
        z = [v for v in td.adhesion(p, t) if deg.get(v, 0) % 2]
        z_sizes[(p, t)] = len(z)
        if len(z) % 2:
            raise ValueError(f"|Z| = {len(z)} is odd on {p!r}-{t!r}: the decomposition or the cycle is broken")
        for a, b in _matching(z, policy):
            e = virtual_edge(p, t, a, b)
            x[p].add(e)
            x[t].add(e)
    pv = PreVector(VECTOR, {t: frozenset(s) for t, s in x.items() if s})
    complaint = pv.check(top)
    if complaint is None and underlying(pv, top) != o:
        complaint = "underlying set differs from the cycle"
    return Lifted(pv, z_sizes, complaint)


def bond_to_precovector(top: TreeOfPresentations, d: Iterable[EdgeId], side: Iterable) -> Lifted:
    """Lift a bond with side ``A`` to a pre-covector: crossing torso edges at every part.

    Raises if either side of the bipartition is disconnected.
    """
    td, g = top.decomposition, top.graph
    if td is None or g is None:
        raise ValueError("need the decomposition and the graph")
    a = frozenset(side)
    b = g.vertices - a
    for s in (a, b):
        if s and len(_vertex_components(g, s)) != 1:
            raise ValueError("both sides of a bond must be connected")
    x = {}
    for t in td.nodes:
        h = torso(td, t, g).graph
        cross = frozenset(e for e, (u, v) in h.edges.items() if (u in a) != (v in a))
        if cross:
            x[t] = cross
    pv = PreVector(COVECTOR, x)
    complaint = pv.check(top)
    if complaint is None and underlying(pv, top) != frozenset(d):
        complaint = "underlying set differs from the bond"
    return Lifted(pv, {}, complaint)


def _vertex_components(g: Multigraph, vs):
    from .graph import components

    return components(g.subgraph(vs))


# -- periodic pre-vectors on ray-shaped trees ------------------------------------------------------


def _shift_torso_edge(fam, e, k: int):
    if is_virtual(e):
        _, t, u, a, b = e
        return virtual_edge(t + k, u + k, fam.shift(a, k), fam.shift(b, k))
    return fam.shift(e, k)


def _ray_torso(ltd: LazyTreeDecomposition, i: int, h: int) -> BinaryPresentation:
    fam = ltd.family
    p = ltd.part(i, h)
    edges = {e: fam.endpoints(e) for e in p.edges}
    for u in ltd.tree.neighbors(i, h):
        adh = ordered(p.vertices & ltd.part(u, h + 2).vertices)
        for j, a in enumerate(adh):
            for b in adh[j + 1:]:
                edges[virtual_edge(i, u, a, b)] = (a, b)
    return graph_presentation(Multigraph(p.vertices, edges))


def _periodic_union(fam, finite: Iterable, pattern_seed: Iterable) -> EdgeSetExpr:
    """``finite ∪ ⋃_{j>=0} shift(seed, j)`` as an expression."""
    seed = frozenset(pattern_seed)
    if not seed:
        return EdgeSetExpr(fam, frozenset(finite))
    s = max(fam.edge_column(e) for e in seed)
    pat = frozenset(fam.shift(e, s - fam.edge_column(e)) for e in seed)
    fin = set(finite)
    for e in seed:
        c = fam.edge_column(e)
        for j in range(s - c):
            fin.add(fam.shift(e, j))
    return EdgeSetExpr(fam, frozenset(fin), s, 1, pat)


@dataclass(frozen=True, eq=False)
class PeriodicPreVector:
    """``v(a) = head`` and ``v(i) = shift(tail, i-a-1)`` for all ``i > a`` on a ray tree."""

    kind: str
    start: int
    head: FrozenSet[EdgeId]
    tail: FrozenSet[EdgeId]
    expr: EdgeSetExpr

    def describe(self) -> str:
        return f"{self.kind} from node {self.start}: {self.expr.to_text()}"


def periodic_prevectors(ltd: LazyTreeDecomposition, kind: str = VECTOR, max_start: int = 2) -> List[PeriodicPreVector]:
    """Period-1 pre-vectors with support ``[a, ∞)`` on ray-shaped decompositions with a shift."""
    fam = ltd.family
    if ltd.tree.name != "ray" or fam.shift is None:
        return []
    out = []
    h = max_start + 6
    for a in range(max_start + 1):
        pa, pb = _ray_torso(ltd, a, h), _ray_torso(ltd, a + 1, h)
        if len(pa.basis(kind)) > MAX_SPAN_DIM or len(pb.basis(kind)) > MAX_SPAN_DIM:
            raise BoundsExhausted("torso too large for periodic enumeration")
        back = frozenset(e for e in pa.ground if is_virtual(e) and a > 0 and set(e[1:3]) == {a - 1, a})
        mid = frozenset(e for e in pb.ground if is_virtual(e) and set(e[1:3]) == {a, a + 1})
        fwd = frozenset(e for e in pb.ground if is_virtual(e) and set(e[1:3]) == {a + 1, a + 2})
        for x in pb.family(kind):
            r_fwd = x & fwd
            if not r_fwd or r_fwd != frozenset(_shift_torso_edge(fam, e, 1) for e in x & mid):
                continue
            for y in pa.family(kind):
                if y & back or (y & mid) != (x & mid):
                    continue
                real_y = frozenset(e for e in y if not is_virtual(e))
                real_x = frozenset(e for e in x if not is_virtual(e))
                out.append(PeriodicPreVector(kind, a, y, x, _periodic_union(fam, real_y, real_x)))
    return out


# -- orthogonality -------------------------------------------------------------------------------


@dataclass
class OrthogonalityVerdict:
    ok: bool
    pairs: int
    violations: List[Tuple[object, object, float]]
    notes: List[str]

    def to_text(self) -> str:
        head = f"orthogonality {'PASS' if self.ok else 'FAIL'}: {self.pairs} pairs checked"
        lines = [head] + [f"  note: {n}" for n in self.notes]
        for v, w, k in self.violations[:10]:
            lines.append(f"  violation: |{v} ∩ {w}| = {k}")
        return "\n".join(lines)


def _fmt(s) -> str:
    if isinstance(s, EdgeSetExpr):
        return s.to_text()
    return "{" + ", ".join(str(e) for e in ordered(s)) + "}"


def orthogonality_check(
    top: TreeOfPresentations,
    psi: Sequence[EndApprox] = (),
    max_terms: Optional[int] = None,
    max_subtree: Optional[int] = None,
    lazy: Optional[LazyTreeDecomposition] = None,
    tree_bound: int = 6,
) -> OrthogonalityVerdict:
    """Every Ψ-vector meets every Ψ^∁-covector in a finite even set.

    Finite vectors and covectors are checked pairwise on bases (parity is
    bilinear, so this covers the whole spans) and, when the spans are small,
    element by element.  With ``lazy`` a ray-shaped tree also contributes its
    periodic pre-vectors: vectors when the tree end is in ``psi``, covectors
    otherwise.
    """
    notes = []
    violations = []
    pairs = 0
    if max_terms is None and max_subtree is None:
        vb = compatible_basis(top, VECTOR)
        wb = compatible_basis(top, COVECTOR)
        for v in vb:
            for w in wb:
                pairs += 1
                k = gf2.popcount(v & w)
                if k % 2:
                    violations.append((_fmt(top.items(v)), _fmt(top.items(w)), k))
        if len(vb) + len(wb) <= 16:
            for v in gf2.span(vb):
                for w in gf2.span(wb):
                    pairs += 1
                    if gf2.popcount(v & w) % 2:
                        violations.append((_fmt(top.items(v)), _fmt(top.items(w)), gf2.popcount(v & w)))
        else:
            notes.append(f"spans of dimension {len(vb)} x {len(wb)} checked on bases")
        vs = [top.items(m) for m in vb]
        ws = [top.items(m) for m in wb]
    else:
        vs = psi_vectors(top, psi, max_terms, max_subtree, VECTOR)
        ws = psi_vectors(top, psi, max_terms, max_subtree, COVECTOR)
        for v in vs:
            for w in ws:
                pairs += 1
                if len(v & w) % 2:
                    violations.append((_fmt(v), _fmt(w), len(v & w)))
        notes.append(f"partial: max_terms={max_terms}, max_subtree={max_subtree}")
    if lazy is not None:
        fam = lazy.family
        end = _tree_end_of_ray(lazy.tree, tree_bound) if lazy.tree.name == "ray" else None
        if end is not None:
            in_psi = any(_same_end(end, p) for p in psi)
            kind = VECTOR if in_psi else COVECTOR
            infinite = periodic_prevectors(lazy, kind)
            partners = ws if in_psi else vs
            notes.append(f"{len(infinite)} periodic {kind}s (tree end {'in' if in_psi else 'not in'} psi)")
            for pv in infinite:
                for f in partners:
                    pairs += 1
                    k = pv.expr.intersection_size(EdgeSetExpr(fam, frozenset(f)))
                    if k == math.inf or k % 2:
                        violations.append((pv.expr.to_text(), _fmt(f), k))
    return OrthogonalityVerdict(not violations, pairs, violations, notes)
